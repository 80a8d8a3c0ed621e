#include "sparseact/text.hpp"

#include <doctest.h>

using namespace sparseact;

TEST_CASE("fold applies NFKC and case folding") {
    CHECK(text::fold("FABRY") == "fabry");
    CHECK(text::fold("Ｆａｂｒｙ") == "fabry");  // fullwidth compatibility forms
    CHECK(text::fold("ﬁbrosis") == "fibrosis"); // ligature
    CHECK(text::fold("Müller") == "müller");
    CHECK(text::fold("") == "");
}

TEST_CASE("tokenize strips punctuation in place and keeps inner hyphens") {
    CHECK(text::tokenize("Fabry disease") == std::vector<std::string>{"fabry", "disease"});
    CHECK(text::tokenize("Anderson-Fabry disease") ==
          std::vector<std::string>{"anderson-fabry", "disease"});
    CHECK(text::tokenize("ORPHA:558 suspected!") ==
          std::vector<std::string>{"orpha558", "suspected"});
    CHECK(text::tokenize("- leading, trailing- -") == std::vector<std::string>{"leading", "trailing"});
    CHECK(text::tokenize("...").empty());
    CHECK(text::tokenize("").empty());
}

TEST_CASE("normalize joins folded tokens") {
    CHECK(text::normalize("  Fabry   Disease ") == "fabry disease");
    CHECK(text::normalize("l'acidose lactique") == "lacidose lactique");
}

TEST_CASE("levenshtein over codepoints") {
    CHECK(text::levenshtein("", "") == 0);
    CHECK(text::levenshtein("abc", "abc") == 0);
    CHECK(text::levenshtein("abc", "") == 3);
    CHECK(text::levenshtein("fabry", "fabri") == 1);
    CHECK(text::levenshtein("kitten", "sitting") == 3);
    // two-codepoint strings, not byte comparisons
    CHECK(text::levenshtein("éé", "ée") == 1);
}

TEST_CASE("bigram dice") {
    CHECK(text::dice(text::bigram_multiset("night"), text::bigram_multiset("nacht")) ==
          doctest::Approx(0.25).epsilon(1e-12));
    CHECK(text::dice(text::bigram_multiset("abcd"), text::bigram_multiset("wxyz")) == 0.0);
    CHECK(text::dice(text::bigram_multiset("ab"), text::bigram_multiset("ab")) == 1.0);
}

TEST_CASE("trigram cosine") {
    auto a = text::trigram_counts("fabry disease");
    CHECK(text::cosine(a, a) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(text::cosine(text::trigram_counts("abcde"), text::trigram_counts("vwxyz")) == 0.0);
    CHECK(text::cosine(text::trigram_counts("ab"), text::trigram_counts("ab")) == 0.0); // too short
}
