#include "sparseact/error.hpp"
#include "sparseact/sparsity.hpp"

#include <doctest.h>

#include "support.hpp"

#include <random>
#include <sstream>

using namespace sparseact;

namespace {
QueryTerm query_of(const std::string& text, const Lexicon& lex = Lexicon{}) {
    return make_query_term(text, "und", lex, StopwordSet::defaults());
}
} // namespace

TEST_CASE("complexity_total is the weighted sum") {
    ComplexityWeights w; // 0.25 each
    CHECK(complexity_total(w, 0.4, 0.5, 0.2, 0.1) == doctest::Approx(0.3).epsilon(1e-12));
    ComplexityWeights skew = ComplexityWeights::normalized(1, 0, 0, 0);
    CHECK(complexity_total(skew, 0.4, 0.5, 0.2, 0.1) == doctest::Approx(0.4).epsilon(1e-12));
    CHECK_THROWS_AS(ComplexityWeights::normalized(0, 0, 0, 0), Error);
}

TEST_CASE("empty query has zero complexity") {
    ComplexityBreakdown b = complexity(query_of(""), OrganSystemTable::defaults(),
                                       ComplexityWeights{});
    CHECK(b.length_factor == 0.0);
    CHECK(b.term_density == 0.0);
    CHECK(b.semantic_complexity == 0.0);
    CHECK(b.multisystem_factor == 0.0);
    CHECK(b.total == 0.0);
}

TEST_CASE("every factor saturates at 1") {
    // 25 two-token lexicon terms, the first ten leading with an organ
    // keyword from a distinct system; joined with semicolons for clauses
    const std::vector<std::string> leads = {"seizure", "cardiac",  "pulmonary", "hepatic",
                                            "myopathy", "rash",    "renal",     "thyroid",
                                            "anemia",  "retinal",  "velka",     "tessa",
                                            "mirel",   "quopra",   "zenthi",    "ovrel",
                                            "duskin",  "yarrow",   "plim",      "croven",
                                            "basql",   "norvel",   "ithra",     "welkin",
                                            "sorbet"};
    Lexicon lex;
    std::string query;
    for (std::size_t i = 0; i < leads.size(); ++i) {
        std::string term = leads[i] + " marker" + std::to_string(i);
        lex.add(term);
        if (i)
            query += "; ";
        query += term;
    }
    QueryTerm qt = query_of(query, lex);
    REQUIRE(qt.tokens.size() == 50);

    ComplexityBreakdown b =
        complexity(qt, OrganSystemTable::defaults(), ComplexityWeights{});
    CHECK(b.length_factor == doctest::Approx(1.0));
    CHECK(b.term_density == doctest::Approx(1.0));
    CHECK(b.semantic_complexity == doctest::Approx(1.0));
    CHECK(b.multisystem_factor == doctest::Approx(1.0));
    CHECK(b.total == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("breakdown total stays consistent with its factors") {
    KnowledgeGraph g = testsupport::load_synthetic_graph();
    Lexicon lex = Lexicon::from_graph(g);
    ComplexityWeights w = ComplexityWeights::normalized(0.4, 0.3, 0.2, 0.1);
    const std::vector<std::string> queries = {
        "tessaraa velkaraaa syndrome",
        "seizure and cardiac arrest; renal failure",
        "short",
        "mireltaag disorder with chronic fatigue and anemia",
    };
    for (const auto& q : queries) {
        ComplexityBreakdown b = complexity(query_of(q, lex), OrganSystemTable::defaults(), w);
        CHECK(b.total == doctest::Approx(complexity_total(w, b.length_factor, b.term_density,
                                                          b.semantic_complexity,
                                                          b.multisystem_factor))
                             .epsilon(1e-12));
        for (double f : {b.length_factor, b.term_density, b.semantic_complexity,
                         b.multisystem_factor, b.total})
            CHECK((f >= 0.0 && f <= 1.0));
    }
}

TEST_CASE("adaptive_k clamps and rounds") {
    SparsityConfig cfg; // 3..20, scale 0.002

    SUBCASE("zero complexity hits the lower clamp") {
        CHECK(adaptive_k(cfg, 100000, 0.0) == 3);
    }
    SUBCASE("huge products hit the upper clamp") {
        CHECK(adaptive_k(cfg, 1000000, 1.0) == 20);
    }
    SUBCASE("interior value") {
        CHECK(adaptive_k(cfg, 10000, 0.5) == 10); // 0.002 * 10000 * 0.5
    }
    SUBCASE("round half up") {
        SparsityConfig wide{1, 100, 1.0};
        CHECK(adaptive_k(wide, 9, 0.5) == 5);  // 4.5 -> 5
        CHECK(adaptive_k(wide, 11, 0.5) == 6); // 5.5 -> 6
        CHECK(adaptive_k(wide, 9, 0.49) == 4); // 4.41 -> 4
    }
    SUBCASE("invalid config is rejected") {
        CHECK_THROWS_AS(adaptive_k(SparsityConfig{5, 4, 0.002}, 10, 0.5), Error);
        CHECK_THROWS_AS(adaptive_k(SparsityConfig{1, 4, 0.0}, 10, 0.5), Error);
    }
}

TEST_CASE("adaptive_k is monotone and always within bounds") {
    SparsityConfig cfg{2, 25, 0.003};
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> cx(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> count(0, 2000000);

    int last = adaptive_k(cfg, 5000, 0.0);
    for (double c = 0.0; c <= 1.0; c += 0.01) {
        int k = adaptive_k(cfg, 5000, c);
        CHECK(k >= last);
        last = k;
    }
    std::size_t sizes[] = {0, 10, 1000, 100000};
    for (std::size_t i = 1; i < 4; ++i)
        CHECK(adaptive_k(cfg, sizes[i], 0.7) >= adaptive_k(cfg, sizes[i - 1], 0.7));

    for (int i = 0; i < 500; ++i) {
        int k = adaptive_k(cfg, count(rng), cx(rng));
        CHECK(k >= cfg.min_concepts);
        CHECK(k <= cfg.max_concepts);
    }
}

TEST_CASE("organ table file override") {
    testsupport::TempFile table(
        R"({"category":"neurological","keywords":["seizure","ataxia"]})"
        "\n"
        R"({"category":"renal","keywords":["kidney"]})"
        "\n",
        ".jsonl");
    OrganSystemTable t = OrganSystemTable::from_file(table.path());
    CHECK(t.size() == 2);
    CHECK(t.categories_hit({"seizure", "kidney", "unrelated"}) == 2);
    CHECK(t.categories_hit({"nothing"}) == 0);
}
