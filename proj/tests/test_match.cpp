#include "sparseact/error.hpp"
#include "sparseact/match.hpp"
#include "sparseact/text.hpp"

#include <doctest.h>

#include "support.hpp"

#include <cmath>
#include <map>
#include <random>
#include <regex>

using namespace sparseact;

namespace {

Concept make_concept(const std::string& id, const std::string& name,
                     std::vector<Alias> aliases = {},
                     std::vector<std::string> xrefs = {}) {
    Concept c;
    c.primary_id = *ConceptID::parse(id);
    c.standard_name = name;
    c.aliases = std::move(aliases);
    for (const auto& x : xrefs)
        c.cross_refs.insert(*ConceptID::parse(x));
    return c;
}

QueryTerm query_of(const std::string& text, const Lexicon& lex = Lexicon{}) {
    return make_query_term(text, "und", lex, StopwordSet::defaults());
}

} // namespace

// ---------------------------------------------------------------------------
// extract_codes

TEST_CASE("extract_codes finds the supported patterns") {
    auto codes = extract_codes("ORPHA:558 suspected");
    REQUIRE(codes.size() == 1);
    CHECK(codes[0].str() == "ORPHA:558");

    CHECK(extract_codes("no codes here").empty());

    codes = extract_codes("HP:0001250 and OMIM 154700");
    REQUIRE(codes.size() == 2);
    CHECK(codes[0].str() == "HP:0001250");
    CHECK(codes[1].str() == "OMIM:154700");

    codes = extract_codes("history of E75.2, twice E75.2.");
    REQUIRE(codes.size() == 1); // deduplicated
    CHECK(codes[0].str() == "ICD10:E75.2");

    // a six-digit number without the OMIM cue is not a code
    CHECK(extract_codes("saw 154700 patients").empty());
    CHECK(extract_codes("omim:301500 plus orpha#98896").size() == 2);
}

TEST_CASE("extract_codes agrees with a regex oracle on fixture strings") {
    const std::vector<std::string> fixtures = {
        "ORPHA:558 suspected",
        "patient with HP:0001250 and OMIM 154700",
        "codes E75.2 and G71.0 noted",
        "OMIM:230800; ORPHA:355!",
        "nothing to see",
        "hp:0003560 lower case",
        "OMIM 12345 too short, OMIM 9876543 too long",
    };

    std::regex orpha(R"(ORPHA[:#]?(\d+))", std::regex::icase);
    std::regex hp(R"(HP:?(\d{7}))", std::regex::icase);
    std::regex omim(R"(OMIM[:# ]?(\d{6})(?!\d))", std::regex::icase);
    std::regex icd(R"(([A-Za-z]\d{2}(\.[A-Za-z0-9]{1,4})?))");

    for (const auto& s : fixtures) {
        std::set<std::string> expected;
        for (auto it = std::sregex_iterator(s.begin(), s.end(), orpha);
             it != std::sregex_iterator(); ++it)
            expected.insert("ORPHA:" + (*it)[1].str());
        for (auto it = std::sregex_iterator(s.begin(), s.end(), hp); it != std::sregex_iterator();
             ++it)
            expected.insert("HP:" + (*it)[1].str());
        for (auto it = std::sregex_iterator(s.begin(), s.end(), omim);
             it != std::sregex_iterator(); ++it)
            expected.insert("OMIM:" + (*it)[1].str());
        for (auto it = std::sregex_iterator(s.begin(), s.end(), icd); it != std::sregex_iterator();
             ++it) {
            std::string tok = (*it)[1].str();
            // oracle applies the same standalone-token rule
            auto b = static_cast<std::size_t>(it->position(1));
            auto e = b + tok.size();
            bool left_ok = b == 0 || !std::isalnum(static_cast<unsigned char>(s[b - 1]));
            bool right_ok = e >= s.size() ||
                            (!std::isalnum(static_cast<unsigned char>(s[e])) && s[e] != '.') ||
                            (s[e] == '.' && (e + 1 >= s.size() ||
                                             !std::isalnum(static_cast<unsigned char>(s[e + 1]))));
            if (left_ok && right_ok) {
                std::string upper = tok;
                for (auto& ch : upper)
                    ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
                expected.insert("ICD10:" + upper);
            }
        }

        std::set<std::string> got;
        for (const auto& id : extract_codes(s))
            got.insert(id.str());
        CAPTURE(s);
        CHECK(got == expected);
    }
}

// ---------------------------------------------------------------------------
// code matching

TEST_CASE("code_match branches") {
    Concept target = make_concept("ORPHA:558", "Aspartylglucosaminuria",
                                  {{"Glycosylasparaginase deficiency", "en", 0.6, "t"}},
                                  {"OMIM:208400"});

    SUBCASE("identifier hit scores 1.0") {
        MatchScore s = code_match(query_of("workup for ORPHA:558 today"), target);
        CHECK(s.value == 1.0);
    }
    SUBCASE("cross ref hit scores 1.0") {
        CHECK(code_match(query_of("OMIM 208400"), target).value == 1.0);
    }
    SUBCASE("standard name equality scores 0.8, case-insensitive") {
        CHECK(code_match(query_of("ASPARTYLGLUCOSAMINURIA"), target).value == 0.8);
    }
    SUBCASE("alias equality sums authority weights") {
        MatchScore s = code_match(query_of("glycosylasparaginase DEFICIENCY"), target);
        CHECK(s.value == doctest::Approx(0.6).epsilon(1e-12));
    }
    SUBCASE("no relation scores 0") {
        CHECK(code_match(query_of("unrelated words"), target).value == 0.0);
    }
    SUBCASE("alias weights clamp at 1.0") {
        Concept multi = make_concept("ORPHA:9", "x disease",
                                     {{"shared alias", "en", 0.7, "a"},
                                      {"shared alias", "es", 0.8, "b"}});
        CHECK(code_match(query_of("shared alias"), multi).value == 1.0);
    }
}

// ---------------------------------------------------------------------------
// segmentation

TEST_CASE("segment applies longest lexicon match and default weights") {
    Lexicon lex;
    lex.add("amyotrophic lateral sclerosis");

    SUBCASE("full trigram becomes one unit") {
        auto units = segment("amyotrophic lateral sclerosis", lex, StopwordSet::defaults());
        REQUIRE(units.size() == 1);
        CHECK(units[0].text == "amyotrophic lateral sclerosis");
        CHECK(units[0].weight == 1.0);
        CHECK(units[0].lexicon_hit);
        CHECK(units[0].token_count == 3);
    }
    SUBCASE("stopwords and residual tokens get their default weights") {
        auto units = segment("the rare disease", lex, StopwordSet::defaults());
        REQUIRE(units.size() == 3);
        CHECK(units[0].weight == doctest::Approx(0.1));
        CHECK(units[1].weight == doctest::Approx(0.5));
        CHECK(units[2].weight == doctest::Approx(0.5));
    }
    SUBCASE("longest of overlapping entries wins") {
        Lexicon overlap;
        overlap.add("lateral sclerosis");
        overlap.add("amyotrophic lateral sclerosis");
        auto units = segment("amyotrophic lateral sclerosis onset", overlap,
                             StopwordSet::defaults());
        REQUIRE(units.size() == 2);
        CHECK(units[0].text == "amyotrophic lateral sclerosis");
        CHECK(units[1].text == "onset");
    }
}

TEST_CASE("segment agrees with the exhaustive oracle on short strings") {
    std::vector<std::vector<std::string>> terms = {
        {"renal", "cyst"}, {"cyst", "growth"}, {"renal", "cyst", "growth"}, {"bone", "pain"},
    };
    Lexicon lex;
    lex.add("renal cyst");
    lex.add("cyst growth");
    lex.add("renal cyst growth");
    lex.add("bone pain");

    std::vector<std::string> vocab = {"renal", "cyst", "growth", "bone", "pain", "the"};
    const StopwordSet& stop = StopwordSet::defaults();

    // all strings of length up to 3 over the vocabulary
    for (std::size_t a = 0; a < vocab.size(); ++a) {
        for (std::size_t b = 0; b <= vocab.size(); ++b) {
            for (std::size_t c = 0; c <= vocab.size(); ++c) {
                if (b == vocab.size() && c != vocab.size())
                    continue;
                std::vector<std::string> tokens = {vocab[a]};
                std::string text = vocab[a];
                if (b < vocab.size()) {
                    tokens.push_back(vocab[b]);
                    text += " " + vocab[b];
                }
                if (c < vocab.size()) {
                    tokens.push_back(vocab[c]);
                    text += " " + vocab[c];
                }
                auto got = segment(text, lex, stop);
                auto expected = testsupport::oracle_segment(tokens, terms, stop);
                CAPTURE(text);
                CHECK(testsupport::units_equal(got, expected));
            }
        }
    }
}

// ---------------------------------------------------------------------------
// unit and term similarity

TEST_CASE("unit_similarity") {
    auto unit = [](const std::string& t) { return SemanticUnit{t, 1.0, false, 1}; };
    CHECK(unit_similarity(unit("sclerosis"), unit("sclerosis")) == 1.0);
    CHECK(unit_similarity(unit("abcd"), unit("wxyz")) == 0.0);
    CHECK(unit_similarity(unit("night"), unit("nacht")) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(unit_similarity(unit("a"), unit("b")) == 0.0); // too short to compare
    CHECK(unit_similarity(unit("Night"), unit("night")) == 1.0);
}

TEST_CASE("term_match evaluates the weighted quotient") {
    auto unit = [](const std::string& t, double w) { return SemanticUnit{t, w, false, 1}; };

    SUBCASE("single identical unit scores 1.0") {
        std::vector<SemanticUnit> u = {unit("fabry", 1.0)};
        CHECK(term_match(u, u).value == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("disjoint units score 0") {
        std::vector<SemanticUnit> a = {unit("abcd", 1.0)};
        std::vector<SemanticUnit> b = {unit("wxyz", 1.0)};
        CHECK(term_match(a, b).value == 0.0);
    }
    SUBCASE("2x2 mixed weights match the hand-computed value") {
        // unit similarities: fabry/fabri dice 0.75, disease/disorder dice 4/13,
        // cross pairs 0; numerator 0.75 + (4/13)*0.25, denominator 1.5*1.5
        std::vector<SemanticUnit> src = {unit("fabry", 1.0), unit("disease", 0.5)};
        std::vector<SemanticUnit> dst = {unit("fabri", 1.0), unit("disorder", 0.5)};
        CHECK(term_match(src, dst).value == doctest::Approx(43.0 / 117.0).epsilon(1e-9));
    }
    SUBCASE("second hand-computed 2x2 fixture") {
        // only night/nacht share a bigram (ht): dice 0.25; numerator
        // 0.25*0.8*1.0 = 0.2, denominator 1.2*1.6 = 1.92 -> 5/48
        std::vector<SemanticUnit> src = {unit("night", 0.8), unit("terror", 0.4)};
        std::vector<SemanticUnit> dst = {unit("nacht", 1.0), unit("fear", 0.6)};
        CHECK(term_match(src, dst).value == doctest::Approx(5.0 / 48.0).epsilon(1e-9));
    }
    SUBCASE("non-positive weights are rejected") {
        std::vector<SemanticUnit> src = {unit("fabry", 0.0)};
        std::vector<SemanticUnit> dst = {unit("fabry", 1.0)};
        CHECK_THROWS_AS(term_match(src, dst), Error);
    }
    SUBCASE("empty unit list is an error") {
        std::vector<SemanticUnit> some = {unit("fabry", 1.0)};
        std::vector<SemanticUnit> none;
        CHECK_THROWS_WITH_AS(term_match(none, some), "unsegmentable term", Error);
        CHECK_THROWS_WITH_AS(term_match(some, none), "unsegmentable term", Error);
    }
}

// ---------------------------------------------------------------------------
// variant similarity components

TEST_CASE("abbr_similarity") {
    CHECK(abbr_similarity("ALS", "amyotrophic lateral sclerosis") == 1.0);
    CHECK(abbr_similarity("AS", "amyotrophic lateral sclerosis") == 0.8);
    CHECK(abbr_similarity("XYZ", "amyotrophic lateral sclerosis") == 0.0);
    CHECK(abbr_similarity("amyotrophic lateral sclerosis", "ALS") == 1.0); // side-agnostic
    CHECK(abbr_similarity("A", "amyotrophic lateral sclerosis") == 0.0);   // single letter
    CHECK(abbr_similarity("", "anything") == 0.0);
}

TEST_CASE("partial_similarity") {
    CHECK(partial_similarity("fabry disease", "fabry disease") == 1.0);
    CHECK(partial_similarity("abc def", "uvw xyz") == 0.0);
    CHECK(partial_similarity("fabry disease", "fabry") == 1.0);
    CHECK(partial_similarity("fabry disease rare", "fabry disorder") == 0.5);
    CHECK(partial_similarity("", "fabry") == 0.0);
}

TEST_CASE("semantic_similarity matches an independent trigram oracle") {
    CHECK(semantic_similarity("fabry disease", "fabry disease") == 1.0);
    CHECK(semantic_similarity("abcde", "vwxyz") == 0.0);

    // independent oracle: string-keyed trigram counts and cosine
    auto oracle = [](const std::string& x, const std::string& y) {
        auto grams = [](const std::string& s) {
            std::map<std::string, int> m;
            auto cps = text::decode_utf8(text::normalize(s));
            for (std::size_t i = 0; i + 2 < cps.size(); ++i)
                ++m[text::encode_utf8({cps[i], cps[i + 1], cps[i + 2]})];
            return m;
        };
        auto ma = grams(x), mb = grams(y);
        double dot = 0, na = 0, nb = 0;
        for (const auto& [k, v] : ma) {
            na += double(v) * v;
            auto it = mb.find(k);
            if (it != mb.end())
                dot += double(v) * it->second;
        }
        for (const auto& [k, v] : mb)
            nb += double(v) * v;
        if (na == 0 || nb == 0)
            return 0.0;
        return dot / (std::sqrt(na) * std::sqrt(nb));
    };

    const std::vector<std::pair<std::string, std::string>> pairs = {
        {"fabry disease", "fabri disease"},
        {"gaucher disease", "gaucher syndrome"},
        {"myotonic dystrophy", "myotonia dystrophica"},
        {"anderson fabry", "fabry anderson"},
    };
    for (const auto& [x, y] : pairs) {
        CAPTURE(x);
        CAPTURE(y);
        CHECK(semantic_similarity(x, y) == doctest::Approx(oracle(x, y)).epsilon(1e-9));
    }
}

TEST_CASE("char_similarity") {
    CHECK(char_similarity("fabry", "fabry") == 1.0);
    CHECK(char_similarity("abc", "xyz") == 0.0);
    CHECK(char_similarity("fabry", "fabri") == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(char_similarity("", "") == 1.0);
    CHECK(char_similarity("FABRY", "fabry") == 1.0); // folded before comparison
}

TEST_CASE("translit_similarity over phonetic keys") {
    const PhoneticTable& table = PhoneticTable::defaults();
    CHECK(translit_similarity("fabry", "fabry", table) == 1.0);
    CHECK(translit_similarity("fabry", "фабри", table) == 1.0); // identical keys
    // hand-derived keys: "myopathy" -> mpth, "миопатия" -> mpt, dice 0.8
    CHECK(translit_similarity("myopathy", "миопатия", table) ==
          doctest::Approx(0.8).epsilon(1e-9));
    CHECK(translit_similarity("bd", "kg", table) == 0.0);
}

TEST_CASE("phonetic table file override") {
    testsupport::TempFile tsv("ä\tae\nx\tz\n", ".tsv");
    PhoneticTable table = PhoneticTable::from_file(tsv.path());
    CHECK(table.key_for("xal") == "zl");
    CHECK(translit_similarity("axa", "aza", PhoneticTable::defaults()) <
          translit_similarity("axa", "aza", table));
}

// ---------------------------------------------------------------------------
// combination and the composite matchers

TEST_CASE("combine_similarity is the convex combination") {
    CombineWeights w; // defaults 1/3 each
    CHECK(combine_similarity(w, 1.0, 1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(combine_similarity(w, 0.0, 0.0, 0.0) == 0.0);
    CHECK(combine_similarity(w, 0.6, 0.9, 0.3) == doctest::Approx(0.6).epsilon(1e-9));
    CombineWeights skew = CombineWeights::normalized(2.0, 1.0, 1.0);
    CHECK(combine_similarity(skew, 1.0, 0.0, 0.0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK_THROWS_AS(CombineWeights::normalized(0, 0, 0), Error);
}

TEST_CASE("variant_match equals the max of its components") {
    Concept target = make_concept("ORPHA:803", "amyotrophic lateral sclerosis",
                                  {{"Lou Gehrig disease", "en", 0.8, "t"},
                                   {"Charcot disease", "en", 0.5, "t"}});

    SUBCASE("abbreviation dominates") {
        CHECK(variant_match(query_of("ALS"), target).value == 1.0);
    }
    SUBCASE("all zero when nothing relates") {
        Concept plain = make_concept("ORPHA:9", "qqqq wwww");
        CHECK(variant_match(query_of("zz"), plain).value == 0.0);
    }
    SUBCASE("independent component oracle") {
        const std::vector<std::string> queries = {
            "ALS",  "lou gehrig",       "charcot", "lateral sclerosis of some kind",
            "amyo", "gehrig lou noise", "sclerosis",
        };
        for (const auto& q : queries) {
            QueryTerm qt = query_of(q);
            double expected = 0.0;
            std::vector<std::string> names = {target.standard_name};
            for (const auto& a : target.aliases)
                names.push_back(a.text);
            for (const auto& name : names) {
                expected = std::max(expected, abbr_similarity(q, name));
                expected = std::max(expected, partial_similarity(q, name));
                expected = std::max(expected, semantic_similarity(q, name));
            }
            CAPTURE(q);
            CHECK(variant_match(qt, target).value == doctest::Approx(expected).epsilon(1e-12));
        }
    }
}

TEST_CASE("a substituted semantic scorer feeds variant and multilingual matching") {
    struct ConstantScorer final : SemanticScorer {
        double similarity(std::string_view, std::string_view) const override { return 0.42; }
    } scorer;
    Concept target = make_concept("ORPHA:9", "qqqq wwww");
    QueryTerm q = query_of("zzzz");

    // abbreviation and partial are 0 here, so the scorer's value wins
    CHECK(variant_match(q, target, scorer).value == doctest::Approx(0.42));
    CombineWeights only_embedding = CombineWeights::normalized(0, 0, 1);
    CHECK(multilingual_match(q, target, PhoneticTable::defaults(), only_embedding, scorer).value ==
          doctest::Approx(0.42));
}

TEST_CASE("multilingual_match") {
    const PhoneticTable& table = PhoneticTable::defaults();
    CombineWeights w;

    Concept target = make_concept("ORPHA:324", "fabry disease");
    SUBCASE("identical text scores 1.0") {
        CHECK(multilingual_match(query_of("fabry disease"), target, table, w).value ==
              doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("fully unrelated scores 0") {
        Concept plain = make_concept("ORPHA:9", "bd");
        CHECK(multilingual_match(query_of("kg"), plain, table, w).value == 0.0);
    }
    SUBCASE("best name wins") {
        Concept with_alias =
            make_concept("ORPHA:324", "qqqq wwww", {{"fabry disease", "en", 0.9, "t"}});
        double via_alias = multilingual_match(query_of("fabry disease"), with_alias, table, w).value;
        CHECK(via_alias == doctest::Approx(1.0).epsilon(1e-12));
    }
}

// ---------------------------------------------------------------------------
// cross-cutting properties

TEST_CASE("identity: a concept's own standard name matches strongly") {
    KnowledgeGraph g = testsupport::load_synthetic_graph();
    Lexicon lex = Lexicon::from_graph(g);
    const PhoneticTable& table = PhoneticTable::defaults();
    CombineWeights w;

    for (const auto& [id, c] : g.concepts()) {
        QueryTerm qt = query_of(c.standard_name, lex);
        CHECK(code_match(qt, c).value == doctest::Approx(0.8));
        auto target_units = segment(c.standard_name, lex, StopwordSet::defaults());
        CHECK(term_match(qt.semantic_units, target_units).value ==
              doctest::Approx(1.0).epsilon(1e-12));
        CHECK(variant_match(qt, c).value == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(multilingual_match(qt, c, table, w).value == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("primitives are symmetric and bounded on random inputs") {
    std::mt19937 rng(42);
    const std::string pool = "abcdefghijklmnopqrstuvwxyz -0123456789";
    auto random_string = [&]() {
        std::uniform_int_distribution<int> len(0, 14);
        std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
        std::string s;
        int n = len(rng);
        for (int i = 0; i < n; ++i)
            s.push_back(pool[pick(rng)]);
        return s;
    };
    const PhoneticTable& table = PhoneticTable::defaults();

    for (int i = 0; i < 500; ++i) {
        std::string a = random_string();
        std::string b = random_string();
        double u = unit_similarity({a, 1.0, false, 1}, {b, 1.0, false, 1});
        double v = unit_similarity({b, 1.0, false, 1}, {a, 1.0, false, 1});
        CHECK(u == v);
        CHECK((u >= 0.0 && u <= 1.0));
        CHECK(char_similarity(a, b) == char_similarity(b, a));
        CHECK(semantic_similarity(a, b) == semantic_similarity(b, a));
        CHECK(translit_similarity(a, b, table) == translit_similarity(b, a, table));
    }
}

TEST_CASE("the term quotient never exceeds 1 under random weights") {
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> weight(0.05, 1.0);
    std::uniform_int_distribution<int> count(1, 5);
    const std::vector<std::string> words = {"alpha", "beta",  "gamma", "delta",
                                            "epsil", "zetas", "etaxx", "theta"};
    std::uniform_int_distribution<std::size_t> pick(0, words.size() - 1);

    for (int i = 0; i < 300; ++i) {
        std::vector<SemanticUnit> a, b;
        int na = count(rng), nb = count(rng);
        for (int k = 0; k < na; ++k)
            a.push_back({words[pick(rng)], weight(rng), false, 1});
        for (int k = 0; k < nb; ++k)
            b.push_back({words[pick(rng)], weight(rng), false, 1});
        double v = term_match(a, b).value;
        CHECK((v >= 0.0 && v <= 1.0));
    }
}
