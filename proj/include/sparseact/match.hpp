#pragma once

#include "sparseact/ids.hpp"
#include "sparseact/kg.hpp"

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace sparseact {

enum class MatchMethod { Code, Term, Variant, Multilingual };
const char* to_string(MatchMethod m);

struct MatchScore {
    double value = 0.0;
    MatchMethod method = MatchMethod::Code;
    std::vector<std::string> evidence;
};

struct SemanticUnit {
    std::string text;       // normalized
    double weight = 0.5;    // in (0,1]
    bool lexicon_hit = false;
    std::size_t token_count = 1;
};

struct QueryTerm {
    std::string raw_text;
    std::string language = "und";
    std::vector<std::string> tokens; // normalized
    std::vector<ConceptID> extracted_codes;
    std::vector<SemanticUnit> semantic_units;
};

// Multiword terms kept as normalized token sequences; longest match wins.
class Lexicon {
public:
    void add(std::string_view term);
    static Lexicon from_file(const std::string& path);
    // All multiword standard names and aliases in the graph.
    static Lexicon from_graph(const KnowledgeGraph& g);

    // Length of the longest term starting at tokens[pos], 0 if none.
    std::size_t longest_match(const std::vector<std::string>& tokens, std::size_t pos) const;

    std::size_t size() const { return terms_.size(); }
    bool empty() const { return terms_.empty(); }

private:
    std::set<std::vector<std::string>> terms_;
    std::size_t max_len_ = 0;
};

class StopwordSet {
public:
    static const StopwordSet& defaults(); // shipped multilingual list
    static StopwordSet from_file(const std::string& path);
    bool contains(std::string_view token) const;
    void add(std::string_view token);
    std::size_t size() const { return words_.size(); }

private:
    std::set<std::string, std::less<>> words_;
};

// Grapheme -> phonetic key substitution (longest match) followed by a
// consonant-skeleton fold: non-leading vowels dropped, consecutive repeats
// collapsed.
class PhoneticTable {
public:
    static const PhoneticTable& defaults();
    static PhoneticTable from_file(const std::string& path); // TSV grapheme<TAB>key
    std::string key_for(std::string_view text) const;

private:
    void add(std::string_view grapheme, std::string_view key);
    std::map<std::u32string, std::string> map_;
    std::size_t max_grapheme_ = 1;
};

// All code patterns found in the text (ORPHA:n, OMIM with a six-digit code,
// ICD-10 shaped tokens, HP: codes), deduplicated in order of appearance.
std::vector<ConceptID> extract_codes(std::string_view text);

// Greedy longest-match over the lexicon; leftover tokens become single
// units. Weights: 1.0 lexicon hit, 0.5 residual token, 0.1 stopword.
std::vector<SemanticUnit> segment(std::string_view text, const Lexicon& lexicon,
                                  const StopwordSet& stopwords);

// 1.0 on normalized equality, else Dice over character bigram multisets;
// 0 when either side is shorter than two characters and the texts differ.
double unit_similarity(const SemanticUnit& a, const SemanticUnit& b);

// Weighted all-pairs unit similarity, normalized by the weight mass of both
// sides. Throws on an empty unit list.
MatchScore term_match(const std::vector<SemanticUnit>& source,
                      const std::vector<SemanticUnit>& target);

// 1.0 when the fewer-token side equals the initials of the other side,
// 0.8 when it is a subsequence of those initials covering >= 2 letters.
double abbr_similarity(std::string_view a, std::string_view b);

// Shared normalized tokens over the token count of the shorter side.
double partial_similarity(std::string_view a, std::string_view b);

// Cosine over character trigram counts of the normalized texts.
double semantic_similarity(std::string_view a, std::string_view b);

// Semantic-equivalence scoring is behind an interface so a learned
// embedding can stand in for the default trigram cosine.
class SemanticScorer {
public:
    virtual ~SemanticScorer() = default;
    virtual double similarity(std::string_view a, std::string_view b) const = 0;
};

class TrigramSemanticScorer final : public SemanticScorer {
public:
    double similarity(std::string_view a, std::string_view b) const override {
        return semantic_similarity(a, b);
    }
    static const TrigramSemanticScorer& instance();
};

// 1 - normalized edit distance over folded codepoints.
double char_similarity(std::string_view a, std::string_view b);

// Dice over bigrams of the phonetic keys of both sides.
double translit_similarity(std::string_view a, std::string_view b, const PhoneticTable& table);

// Convex combination of the three multilingual components.
struct CombineWeights {
    double transliteration = 1.0 / 3.0;
    double character = 1.0 / 3.0;
    double embedding = 1.0 / 3.0;
    static CombineWeights normalized(double t, double c, double e);
};
double combine_similarity(const CombineWeights& w, double translit, double chr, double emb);

// Standardized code matching: 1.0 on a code hit, 0.8 on a standard-name hit,
// otherwise the clamped sum of authority weights of exactly-matching aliases.
MatchScore code_match(const QueryTerm& source, const Concept& target);

// Max of abbreviation, partial and semantic similarity over the target's
// standard name and aliases.
MatchScore variant_match(const QueryTerm& source, const Concept& target,
                         const SemanticScorer& semantic = TrigramSemanticScorer::instance());

// Combined transliteration/character/embedding similarity against the best
// target name.
MatchScore multilingual_match(const QueryTerm& source, const Concept& target,
                              const PhoneticTable& table, const CombineWeights& weights,
                              const SemanticScorer& semantic = TrigramSemanticScorer::instance());

QueryTerm make_query_term(std::string_view text, std::string_view language,
                          const Lexicon& lexicon, const StopwordSet& stopwords);

} // namespace sparseact
