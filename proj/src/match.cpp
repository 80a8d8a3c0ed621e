#include "sparseact/match.hpp"

#include "sparseact/error.hpp"
#include "sparseact/text.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace sparseact {

const char* to_string(MatchMethod m) {
    switch (m) {
    case MatchMethod::Code: return "code";
    case MatchMethod::Term: return "term";
    case MatchMethod::Variant: return "variant";
    case MatchMethod::Multilingual: return "multilingual";
    }
    return "code";
}

namespace {

double clamp01(double v) {
    return std::max(0.0, std::min(1.0, v));
}

std::string join_tokens(const std::vector<std::string>& toks, std::size_t begin,
                        std::size_t end) {
    std::string out;
    for (std::size_t i = begin; i < end; ++i) {
        if (i > begin)
            out.push_back(' ');
        out += toks[i];
    }
    return out;
}

} // namespace

// ---------------------------------------------------------------------------
// Lexicon

void Lexicon::add(std::string_view term) {
    std::vector<std::string> toks = text::tokenize(term);
    if (toks.empty())
        return;
    max_len_ = std::max(max_len_, toks.size());
    terms_.insert(std::move(toks));
}

Lexicon Lexicon::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open lexicon file '" + path + "'");
    Lexicon lex;
    std::string line;
    while (std::getline(in, line))
        lex.add(line);
    return lex;
}

Lexicon Lexicon::from_graph(const KnowledgeGraph& g) {
    Lexicon lex;
    for (const auto& [id, c] : g.concepts()) {
        if (text::tokenize(c.standard_name).size() >= 2)
            lex.add(c.standard_name);
        for (const auto& a : c.aliases)
            if (text::tokenize(a.text).size() >= 2)
                lex.add(a.text);
    }
    return lex;
}

std::size_t Lexicon::longest_match(const std::vector<std::string>& tokens,
                                   std::size_t pos) const {
    std::size_t best = 0;
    std::vector<std::string> probe;
    std::size_t limit = std::min(max_len_, tokens.size() - pos);
    for (std::size_t len = 1; len <= limit; ++len) {
        probe.push_back(tokens[pos + len - 1]);
        if (terms_.count(probe))
            best = len;
    }
    return best;
}

// ---------------------------------------------------------------------------
// Stopwords

namespace {
const char* const kDefaultStopwords[] = {
    // English
    "a", "about", "above", "after", "again", "against", "all", "am", "an", "and", "any", "are",
    "as", "at", "be", "because", "been", "before", "being", "below", "between", "both", "but",
    "by", "can", "could", "did", "do", "does", "doing", "down", "during", "each", "few", "for",
    "from", "further", "had", "has", "have", "having", "he", "her", "here", "hers", "him", "his",
    "how", "i", "if", "in", "into", "is", "it", "its", "just", "me", "more", "most", "my", "no",
    "nor", "not", "now", "of", "off", "on", "once", "only", "or", "other", "our", "ours", "out",
    "over", "own", "same", "she", "should", "so", "some", "such", "than", "that", "the", "their",
    "theirs", "them", "then", "there", "these", "they", "this", "those", "through", "to", "too",
    "under", "until", "up", "very", "was", "we", "were", "what", "when", "where", "which",
    "while", "who", "whom", "why", "will", "with", "would", "you", "your", "yours",
    // Spanish
    "al", "como", "con", "de", "del", "el", "ella", "en", "entre", "es", "esta", "este", "la",
    "las", "lo", "los", "mas", "para", "pero", "por", "que", "se", "sin", "sobre", "su", "un",
    "una", "unas", "unos", "y",
    // French
    "au", "aux", "avec", "ce", "ces", "dans", "des", "du", "elle", "et", "il", "le", "les",
    "leur", "mais", "ne", "ou", "pas", "pour", "qui", "sa", "ses", "son", "sur", "une",
    // German
    "aber", "auch", "auf", "aus", "bei", "das", "dem", "den", "der", "die", "ein", "eine",
    "einer", "er", "ist", "mit", "nach", "nicht", "oder", "sich", "sie", "sind", "und", "von",
    "vor", "zu", "zum", "zur",
    // Italian
    "alla", "che", "chi", "come", "dei", "della", "di", "ed", "gli", "ha", "hanno", "nel",
    "non", "per", "piu", "sono", "tra",
};
} // namespace

const StopwordSet& StopwordSet::defaults() {
    static const StopwordSet instance = [] {
        StopwordSet s;
        for (const char* w : kDefaultStopwords)
            s.add(w);
        return s;
    }();
    return instance;
}

StopwordSet StopwordSet::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open stopword file '" + path + "'");
    StopwordSet s;
    std::string line;
    while (std::getline(in, line)) {
        std::string folded = text::normalize(line);
        if (!folded.empty())
            s.add(folded);
    }
    return s;
}

void StopwordSet::add(std::string_view token) {
    words_.insert(std::string(token));
}

bool StopwordSet::contains(std::string_view token) const {
    return words_.find(token) != words_.end();
}

// ---------------------------------------------------------------------------
// Code extraction

namespace {

bool run_char(char c) {
    unsigned char u = static_cast<unsigned char>(c);
    return std::isalnum(u) || c == ':' || c == '#' || c == '.';
}

std::string upper_ascii(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return out;
}

bool digits_only(std::string_view s, std::size_t exact = 0) {
    if (s.empty())
        return false;
    if (exact && s.size() != exact)
        return false;
    return std::all_of(s.begin(), s.end(),
                       [](unsigned char c) { return std::isdigit(c) != 0; });
}

} // namespace

std::vector<ConceptID> extract_codes(std::string_view raw) {
    // split into runs of code-ish characters, then classify each run
    std::vector<std::string> runs;
    std::string cur;
    for (char c : raw) {
        if (run_char(c)) {
            cur.push_back(c);
        } else if (!cur.empty()) {
            runs.push_back(cur);
            cur.clear();
        }
    }
    if (!cur.empty())
        runs.push_back(cur);

    std::vector<ConceptID> out;
    std::set<ConceptID> seen;
    auto emit = [&](ConceptID id) {
        if (seen.insert(id).second)
            out.push_back(std::move(id));
    };
    auto strip_sep = [](std::string_view s) -> std::string_view {
        if (!s.empty() && (s[0] == ':' || s[0] == '#'))
            s.remove_prefix(1);
        return s;
    };

    for (std::size_t i = 0; i < runs.size(); ++i) {
        std::string run = upper_ascii(runs[i]);
        while (!run.empty() && (run.back() == '.' || run.back() == ':' || run.back() == '#'))
            run.pop_back();
        if (run.empty())
            continue;

        std::string_view v = run;
        if (v.starts_with("ORPHA")) {
            std::string_view rest = strip_sep(v.substr(5));
            if (digits_only(rest))
                emit(ConceptID{CodeSystem::Orpha, std::string(rest)});
            continue;
        }
        if (v.starts_with("HP")) {
            std::string_view rest = v.substr(2);
            if (!rest.empty() && rest[0] == ':')
                rest.remove_prefix(1);
            if (digits_only(rest, 7))
                emit(ConceptID{CodeSystem::Hpo, "HP:" + std::string(rest)});
            continue;
        }
        if (v == "OMIM") {
            // six-digit code in the next run
            if (i + 1 < runs.size() && digits_only(runs[i + 1], 6)) {
                emit(ConceptID{CodeSystem::Omim, runs[i + 1]});
                ++i;
            }
            continue;
        }
        if (v.starts_with("OMIM")) {
            std::string_view rest = strip_sep(v.substr(4));
            if (digits_only(rest, 6))
                emit(ConceptID{CodeSystem::Omim, std::string(rest)});
            continue;
        }
        if (code_syntax_ok(CodeSystem::Icd10, run))
            emit(ConceptID{CodeSystem::Icd10, run});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Segmentation

std::vector<SemanticUnit> segment(std::string_view raw, const Lexicon& lexicon,
                                  const StopwordSet& stopwords) {
    std::vector<std::string> toks = text::tokenize(raw);
    std::vector<SemanticUnit> units;
    std::size_t pos = 0;
    while (pos < toks.size()) {
        std::size_t len = lexicon.longest_match(toks, pos);
        if (len > 0) {
            units.push_back({join_tokens(toks, pos, pos + len), 1.0, true, len});
            pos += len;
        } else {
            const std::string& t = toks[pos];
            double w = stopwords.contains(t) ? 0.1 : 0.5;
            units.push_back({t, w, false, 1});
            ++pos;
        }
    }
    return units;
}

// ---------------------------------------------------------------------------
// Similarity primitives

double unit_similarity(const SemanticUnit& a, const SemanticUnit& b) {
    std::string na = text::normalize(a.text);
    std::string nb = text::normalize(b.text);
    if (na == nb && !na.empty())
        return 1.0;
    std::size_t la = text::decode_utf8(na).size();
    std::size_t lb = text::decode_utf8(nb).size();
    if (la < 2 || lb < 2)
        return 0.0;
    return clamp01(text::dice(text::bigram_multiset(na), text::bigram_multiset(nb)));
}

MatchScore term_match(const std::vector<SemanticUnit>& source,
                      const std::vector<SemanticUnit>& target) {
    if (source.empty() || target.empty())
        throw Error("unsegmentable term");
    double num = 0.0, ws = 0.0, wt = 0.0;
    for (const auto& s : source)
        ws += s.weight;
    for (const auto& t : target)
        wt += t.weight;
    if (ws <= 0.0 || wt <= 0.0)
        throw Error("unit weights must be positive");
    for (const auto& s : source)
        for (const auto& t : target)
            num += unit_similarity(s, t) * s.weight * t.weight;
    MatchScore score;
    score.method = MatchMethod::Term;
    score.value = clamp01(num / (ws * wt));
    return score;
}

double abbr_similarity(std::string_view a, std::string_view b) {
    std::vector<std::string> ta = text::tokenize(a);
    std::vector<std::string> tb = text::tokenize(b);
    if (ta.empty() || tb.empty())
        return 0.0;

    const std::vector<std::string>& short_side = ta.size() <= tb.size() ? ta : tb;
    const std::vector<std::string>& long_side = ta.size() <= tb.size() ? tb : ta;

    std::vector<char32_t> abbrev;
    for (const auto& t : short_side)
        for (char32_t cp : text::decode_utf8(t))
            abbrev.push_back(cp);
    std::vector<char32_t> initials;
    for (const auto& t : long_side)
        initials.push_back(text::decode_utf8(t).front());

    if (abbrev == initials)
        return 1.0;
    if (abbrev.size() >= 2) {
        std::size_t j = 0;
        for (char32_t cp : initials)
            if (j < abbrev.size() && abbrev[j] == cp)
                ++j;
        if (j == abbrev.size())
            return 0.8;
    }
    return 0.0;
}

double partial_similarity(std::string_view a, std::string_view b) {
    std::vector<std::string> ta = text::tokenize(a);
    std::vector<std::string> tb = text::tokenize(b);
    std::set<std::string> sa(ta.begin(), ta.end());
    std::set<std::string> sb(tb.begin(), tb.end());
    if (sa.empty() || sb.empty())
        return 0.0;
    std::size_t shared = 0;
    for (const auto& t : sa)
        shared += sb.count(t);
    return static_cast<double>(shared) / static_cast<double>(std::min(sa.size(), sb.size()));
}

double semantic_similarity(std::string_view a, std::string_view b) {
    std::string na = text::normalize(a);
    std::string nb = text::normalize(b);
    if (na == nb && !na.empty())
        return 1.0;
    return clamp01(text::cosine(text::trigram_counts(na), text::trigram_counts(nb)));
}

const TrigramSemanticScorer& TrigramSemanticScorer::instance() {
    static const TrigramSemanticScorer scorer;
    return scorer;
}

double char_similarity(std::string_view a, std::string_view b) {
    std::string na = text::normalize(a);
    std::string nb = text::normalize(b);
    std::size_t la = text::decode_utf8(na).size();
    std::size_t lb = text::decode_utf8(nb).size();
    std::size_t longest = std::max(la, lb);
    if (longest == 0)
        return 1.0;
    std::size_t dist = text::levenshtein(na, nb);
    return clamp01(1.0 - static_cast<double>(dist) / static_cast<double>(longest));
}

// ---------------------------------------------------------------------------
// Phonetic keys

namespace {
struct GraphemeKey {
    const char* grapheme;
    const char* key;
};

// Romanization folds: Latin digraph/letter folds plus Greek and Cyrillic
// letters. Unmapped ASCII alphanumerics pass through; anything else is
// dropped.
const GraphemeKey kDefaultPhonetics[] = {
    // Latin digraphs and spelling folds
    {"ph", "f"}, {"ae", "e"}, {"oe", "e"}, {"ch", "ch"}, {"ck", "k"}, {"qu", "kw"},
    {"c", "k"}, {"q", "k"}, {"w", "v"}, {"y", "i"}, {"x", "ks"},
    // accented Latin
    {"à", "a"}, {"â", "a"}, {"ä", "a"}, {"å", "a"}, {"á", "a"}, {"ã", "a"},
    {"é", "e"}, {"è", "e"}, {"ê", "e"}, {"ë", "e"},
    {"í", "i"}, {"î", "i"}, {"ï", "i"}, {"ì", "i"},
    {"ó", "o"}, {"ô", "o"}, {"ö", "o"}, {"ø", "o"}, {"õ", "o"}, {"ò", "o"},
    {"ú", "u"}, {"û", "u"}, {"ü", "u"}, {"ù", "u"},
    {"ç", "s"}, {"ñ", "n"}, {"ß", "s"}, {"æ", "e"},
    // Greek
    {"α", "a"}, {"β", "b"}, {"γ", "g"}, {"δ", "d"}, {"ε", "e"}, {"ζ", "z"}, {"η", "e"},
    {"θ", "t"}, {"ι", "i"}, {"κ", "k"}, {"λ", "l"}, {"μ", "m"}, {"ν", "n"}, {"ξ", "ks"},
    {"ο", "o"}, {"π", "p"}, {"ρ", "r"}, {"σ", "s"}, {"ς", "s"}, {"τ", "t"}, {"υ", "i"},
    {"φ", "f"}, {"χ", "ch"}, {"ψ", "ps"}, {"ω", "o"},
    {"ά", "a"}, {"έ", "e"}, {"ή", "e"}, {"ί", "i"}, {"ό", "o"}, {"ύ", "i"}, {"ώ", "o"},
    // Cyrillic
    {"а", "a"}, {"б", "b"}, {"в", "v"}, {"г", "g"}, {"д", "d"}, {"е", "e"}, {"ё", "e"},
    {"ж", "zh"}, {"з", "z"}, {"и", "i"}, {"й", "i"}, {"к", "k"}, {"л", "l"}, {"м", "m"},
    {"н", "n"}, {"о", "o"}, {"п", "p"}, {"р", "r"}, {"с", "s"}, {"т", "t"}, {"у", "u"},
    {"ф", "f"}, {"х", "h"}, {"ц", "ts"}, {"ч", "ch"}, {"ш", "sh"}, {"щ", "sh"},
    {"ы", "i"}, {"э", "e"}, {"ю", "yu"}, {"я", "ya"},
};

bool skeleton_vowel(char c) {
    return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u' || c == 'y';
}
} // namespace

void PhoneticTable::add(std::string_view grapheme, std::string_view key) {
    std::vector<char32_t> cps = text::decode_utf8(text::fold(grapheme));
    if (cps.empty())
        return;
    max_grapheme_ = std::max(max_grapheme_, cps.size());
    map_[std::u32string(cps.begin(), cps.end())] = std::string(key);
}

const PhoneticTable& PhoneticTable::defaults() {
    static const PhoneticTable instance = [] {
        PhoneticTable t;
        for (const auto& e : kDefaultPhonetics)
            t.add(e.grapheme, e.key);
        return t;
    }();
    return instance;
}

PhoneticTable PhoneticTable::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open phonetic table '" + path + "'");
    PhoneticTable t;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#')
            continue;
        std::size_t tab = line.find('\t');
        if (tab == std::string::npos)
            throw Error(path + ":" + std::to_string(lineno) + ": expected grapheme<TAB>key");
        t.add(line.substr(0, tab), line.substr(tab + 1));
    }
    return t;
}

std::string PhoneticTable::key_for(std::string_view raw) const {
    std::vector<std::string> toks = text::tokenize(raw);
    std::string out;
    for (const auto& tok : toks) {
        std::vector<char32_t> cps = text::decode_utf8(tok);
        std::string mapped;
        std::size_t i = 0;
        while (i < cps.size()) {
            std::size_t limit = std::min(max_grapheme_, cps.size() - i);
            std::size_t used = 0;
            for (std::size_t len = limit; len >= 1; --len) {
                auto it = map_.find(std::u32string(cps.begin() + i, cps.begin() + i + len));
                if (it != map_.end()) {
                    mapped += it->second;
                    used = len;
                    break;
                }
            }
            if (!used) {
                char32_t cp = cps[i];
                if (cp < 0x80 && std::isalnum(static_cast<unsigned char>(cp)))
                    mapped.push_back(static_cast<char>(cp));
                used = 1;
            }
            i += used;
        }
        // consonant skeleton: drop non-leading vowels, collapse repeats
        std::string key;
        for (std::size_t k = 0; k < mapped.size(); ++k) {
            char c = mapped[k];
            if (k > 0 && skeleton_vowel(c))
                continue;
            if (!key.empty() && key.back() == c)
                continue;
            key.push_back(c);
        }
        if (key.empty())
            continue;
        if (!out.empty())
            out.push_back(' ');
        out += key;
    }
    return out;
}

double translit_similarity(std::string_view a, std::string_view b, const PhoneticTable& table) {
    std::string ka = table.key_for(a);
    std::string kb = table.key_for(b);
    if (ka.empty() && kb.empty())
        return 0.0;
    if (ka == kb)
        return 1.0;
    return clamp01(text::dice(text::bigram_multiset(ka), text::bigram_multiset(kb)));
}

CombineWeights CombineWeights::normalized(double t, double c, double e) {
    if (t < 0 || c < 0 || e < 0)
        throw Error("combination weights must be non-negative");
    double sum = t + c + e;
    if (sum <= 0)
        throw Error("combination weights must not all be zero");
    return CombineWeights{t / sum, c / sum, e / sum};
}

double combine_similarity(const CombineWeights& w, double translit, double chr, double emb) {
    return clamp01(w.transliteration * translit + w.character * chr + w.embedding * emb);
}

// ---------------------------------------------------------------------------
// The four matchers

MatchScore code_match(const QueryTerm& source, const Concept& target) {
    MatchScore score;
    score.method = MatchMethod::Code;

    for (const auto& code : source.extracted_codes) {
        if (code == target.primary_id || target.cross_refs.count(code)) {
            score.value = 1.0;
            score.evidence.push_back("code " + code.str());
            return score;
        }
    }

    std::string nq = text::normalize(source.raw_text);
    if (nq.empty())
        return score;
    if (nq == text::normalize(target.standard_name)) {
        score.value = 0.8;
        score.evidence.push_back("standard name '" + target.standard_name + "'");
        return score;
    }

    double sum = 0.0;
    for (const auto& alias : target.aliases) {
        if (nq == text::normalize(alias.text)) {
            sum += alias.authority_weight;
            score.evidence.push_back("alias '" + alias.text + "'");
        }
    }
    score.value = clamp01(sum);
    return score;
}

namespace {
std::vector<const std::string*> target_names(const Concept& target) {
    std::vector<const std::string*> names;
    names.push_back(&target.standard_name);
    for (const auto& a : target.aliases)
        names.push_back(&a.text);
    return names;
}
} // namespace

MatchScore variant_match(const QueryTerm& source, const Concept& target,
                         const SemanticScorer& semantic) {
    MatchScore score;
    score.method = MatchMethod::Variant;

    const char* best_kind = nullptr;
    const std::string* best_name = nullptr;
    for (const std::string* name : target_names(target)) {
        struct {
            const char* kind;
            double value;
        } sims[] = {
            {"abbreviation", abbr_similarity(source.raw_text, *name)},
            {"partial", partial_similarity(source.raw_text, *name)},
            {"semantic", clamp01(semantic.similarity(source.raw_text, *name))},
        };
        for (const auto& s : sims) {
            if (s.value > score.value) {
                score.value = s.value;
                best_kind = s.kind;
                best_name = name;
            }
        }
    }
    if (best_kind)
        score.evidence.push_back(std::string(best_kind) + " vs '" + *best_name + "'");
    return score;
}

MatchScore multilingual_match(const QueryTerm& source, const Concept& target,
                              const PhoneticTable& table, const CombineWeights& weights,
                              const SemanticScorer& semantic) {
    MatchScore score;
    score.method = MatchMethod::Multilingual;

    const std::string* best_name = nullptr;
    for (const std::string* name : target_names(target)) {
        double t = translit_similarity(source.raw_text, *name, table);
        double c = char_similarity(source.raw_text, *name);
        double e = clamp01(semantic.similarity(source.raw_text, *name));
        double v = combine_similarity(weights, t, c, e);
        if (v > score.value) {
            score.value = v;
            best_name = name;
        }
    }
    if (best_name)
        score.evidence.push_back("best name '" + *best_name + "'");
    return score;
}

QueryTerm make_query_term(std::string_view raw, std::string_view language, const Lexicon& lexicon,
                          const StopwordSet& stopwords) {
    QueryTerm q;
    q.raw_text = std::string(raw);
    q.language = language.empty() ? "und" : std::string(language);
    q.tokens = text::tokenize(raw);
    q.extracted_codes = extract_codes(raw);
    q.semantic_units = segment(raw, lexicon, stopwords);
    return q;
}

} // namespace sparseact
