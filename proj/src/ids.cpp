#include "sparseact/ids.hpp"

#include "sparseact/error.hpp"

#include <algorithm>
#include <cctype>

namespace sparseact {

namespace {

std::string canonical(std::string_view raw) {
    std::size_t b = 0, e = raw.size();
    while (b < e && std::isspace(static_cast<unsigned char>(raw[b])))
        ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(raw[e - 1])))
        --e;
    std::string out(raw.substr(b, e - b));
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return out;
}

bool all_digits(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) {
        return std::isdigit(c) != 0;
    });
}

bool alnum_upper(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) {
        return std::isdigit(c) || (std::isalpha(c) && std::isupper(c));
    });
}

bool icd10_shape(std::string_view s) {
    if (s.size() < 3 || !std::isalpha(static_cast<unsigned char>(s[0])))
        return false;
    if (!std::isdigit(static_cast<unsigned char>(s[1])) ||
        !std::isdigit(static_cast<unsigned char>(s[2])))
        return false;
    if (s.size() == 3)
        return true;
    if (s[3] != '.')
        return false;
    std::string_view ext = s.substr(4);
    return !ext.empty() && ext.size() <= 4 && alnum_upper(ext);
}

bool icd11_shape(std::string_view s) {
    std::size_t dot = s.find('.');
    std::string_view stem = dot == std::string_view::npos ? s : s.substr(0, dot);
    if (stem.size() < 2 || stem.size() > 6 || !alnum_upper(stem))
        return false;
    if (dot == std::string_view::npos)
        return true;
    std::string_view ext = s.substr(dot + 1);
    return !ext.empty() && ext.size() <= 4 && alnum_upper(ext) && ext.find('.') == std::string_view::npos;
}

} // namespace

const char* to_string(CodeSystem s) {
    switch (s) {
    case CodeSystem::Orpha: return "ORPHA";
    case CodeSystem::Icd10: return "ICD10";
    case CodeSystem::Icd11: return "ICD11";
    case CodeSystem::Omim: return "OMIM";
    case CodeSystem::Hpo: return "HPO";
    case CodeSystem::Gene: return "GENE";
    case CodeSystem::Local: return "LOCAL";
    }
    return "LOCAL";
}

std::optional<CodeSystem> code_system_from(std::string_view name) {
    std::string n = canonical(name);
    if (n == "ORPHA") return CodeSystem::Orpha;
    if (n == "ICD10") return CodeSystem::Icd10;
    if (n == "ICD11") return CodeSystem::Icd11;
    if (n == "OMIM") return CodeSystem::Omim;
    if (n == "HPO") return CodeSystem::Hpo;
    if (n == "GENE") return CodeSystem::Gene;
    if (n == "LOCAL") return CodeSystem::Local;
    return std::nullopt;
}

bool code_syntax_ok(CodeSystem system, std::string_view code) {
    switch (system) {
    case CodeSystem::Orpha:
        return all_digits(code);
    case CodeSystem::Omim:
        return code.size() == 6 && all_digits(code);
    case CodeSystem::Icd10:
        return icd10_shape(code);
    case CodeSystem::Icd11:
        return icd11_shape(code);
    case CodeSystem::Hpo:
        return code.size() == 10 && code.substr(0, 3) == "HP:" && all_digits(code.substr(3));
    case CodeSystem::Gene:
        return alnum_upper(code) &&
               std::any_of(code.begin(), code.end(),
                           [](unsigned char c) { return std::isalpha(c) != 0; });
    case CodeSystem::Local:
        return !code.empty() &&
               std::none_of(code.begin(), code.end(),
                            [](unsigned char c) { return std::isspace(c) != 0; });
    }
    return false;
}

std::optional<ConceptID> ConceptID::parse(std::string_view text) {
    std::string t = canonical(text);
    if (t.empty())
        return std::nullopt;

    auto strip_sep = [](std::string_view s) -> std::string_view {
        if (!s.empty() && (s[0] == ':' || s[0] == '#'))
            s.remove_prefix(1);
        return s;
    };
    auto try_make = [](CodeSystem sys, std::string_view code) -> std::optional<ConceptID> {
        if (code_syntax_ok(sys, code))
            return ConceptID{sys, std::string(code)};
        return std::nullopt;
    };

    std::string_view v = t;
    if (v.starts_with("ORPHA"))
        return try_make(CodeSystem::Orpha, strip_sep(v.substr(5)));
    if (v.starts_with("OMIM"))
        return try_make(CodeSystem::Omim, strip_sep(v.substr(4)));
    if (v.starts_with("ICD10:"))
        return try_make(CodeSystem::Icd10, v.substr(6));
    if (v.starts_with("ICD11:"))
        return try_make(CodeSystem::Icd11, v.substr(6));
    if (v.starts_with("GENE:"))
        return try_make(CodeSystem::Gene, v.substr(5));
    if (v.starts_with("LOCAL:"))
        return try_make(CodeSystem::Local, v.substr(6));
    if (v.starts_with("HPO:")) {
        std::string_view rest = v.substr(4);
        if (rest.starts_with("HP:"))
            return try_make(CodeSystem::Hpo, rest);
        if (rest.size() == 7 && all_digits(rest))
            return try_make(CodeSystem::Hpo, "HP:" + std::string(rest));
        return std::nullopt;
    }
    if (v.starts_with("HP")) {
        std::string_view rest = v.substr(2);
        if (!rest.empty() && rest[0] == ':')
            rest.remove_prefix(1);
        if (rest.size() == 7 && all_digits(rest))
            return try_make(CodeSystem::Hpo, "HP:" + std::string(rest));
        return std::nullopt;
    }
    // bare ICD-10 shaped token, e.g. "E75.2"
    if (icd10_shape(v))
        return ConceptID{CodeSystem::Icd10, t};
    return std::nullopt;
}

ConceptID ConceptID::make(CodeSystem system, std::string_view code) {
    std::string c = canonical(code);
    if (system == CodeSystem::Hpo && c.size() == 7 && all_digits(c))
        c = "HP:" + c;
    if (!code_syntax_ok(system, c))
        throw Error(std::string("invalid ") + to_string(system) + " code '" + std::string(code) +
                    "'");
    return ConceptID{system, std::move(c)};
}

std::string ConceptID::str() const {
    if (system == CodeSystem::Hpo)
        return code; // already carries the HP: prefix
    return std::string(to_string(system)) + ":" + code;
}

} // namespace sparseact
