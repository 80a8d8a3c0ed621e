#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace sparseact {

enum class CodeSystem { Orpha, Icd10, Icd11, Omim, Hpo, Gene, Local };

const char* to_string(CodeSystem s);
std::optional<CodeSystem> code_system_from(std::string_view name);

// A standardized identifier. Codes are stored trimmed and ASCII-uppercased,
// so case-insensitive equality reduces to plain equality.
struct ConceptID {
    CodeSystem system = CodeSystem::Local;
    std::string code;

    // Accepts "ORPHA:558", "OMIM:154700", "ICD10:E75.2", "ICD11:5C56",
    // "HP:0001250" (or "HPO:HP:0001250"), "GENE:GLA", "LOCAL:x" and,
    // for bare text, the ICD-10 letter+digits shape. Returns nullopt when
    // the text is not a well-formed code.
    static std::optional<ConceptID> parse(std::string_view text);

    // Like parse for a known system; throws Error on a syntax violation.
    static ConceptID make(CodeSystem system, std::string_view code);

    std::string str() const;

    auto operator<=>(const ConceptID&) const = default;
};

// Whether `code` (already canonical) satisfies the system's syntax:
// ORPHA decimal digits, OMIM exactly 6 digits, ICD10 letter + 2 digits with
// an optional dotted extension, HPO "HP:" + 7 digits, GENE uppercase
// alphanumeric with at least one letter, LOCAL any nonempty token.
bool code_syntax_ok(CodeSystem system, std::string_view code);

} // namespace sparseact
