#include <doctest.h>

#include "seedforge/text.hpp"

using namespace seedforge;

TEST_CASE("normalize_for_match folds case, punctuation, dashes and articles") {
  CHECK(text::normalize_for_match("Mexican.") == "mexican");
  CHECK(text::normalize_for_match("Italian--Scottish") == "italian scottish");
  CHECK(text::normalize_for_match("italian–scottish heritage") ==
        "italian scottish heritage");
  CHECK(text::normalize_for_match("The  Quick   Brown") == "quick brown");
  CHECK(text::normalize_for_match("a an the") == "");
  CHECK(text::normalize_for_match("  spaced\tout \n") == "spaced out");
}

TEST_CASE("normalize_for_match strips Latin diacritics") {
  CHECK(text::normalize_for_match("Jānis Strazdiņš") == "janis strazdins");
  CHECK(text::normalize_for_match("Café") == "cafe");
  CHECK(text::normalize_for_match("Ångström") == "angstrom");
}

TEST_CASE("token_subsequence is contiguous") {
  auto hay = text::normalize_tokens("the galician welsh singer");
  CHECK(text::token_subsequence(hay, text::normalize_tokens("Galician--Welsh")));
  CHECK_FALSE(text::token_subsequence(hay, text::normalize_tokens("galician singer")));
  CHECK_FALSE(text::token_subsequence(hay, {}));
}

TEST_CASE("case pattern classify and apply") {
  using text::CasePattern;
  CHECK(text::classify_case("PARIS") == CasePattern::upper);
  CHECK(text::classify_case("paris") == CasePattern::lower);
  CHECK(text::classify_case("New York City") == CasePattern::title);
  CHECK(text::classify_case("McDonald") == CasePattern::mixed);

  CHECK(text::apply_case_pattern(CasePattern::upper, "Veloria") == "VELORIA");
  CHECK(text::apply_case_pattern(CasePattern::lower, "Veloria") == "veloria");
  CHECK(text::apply_case_pattern(CasePattern::title, "mellow vibes harmony") ==
        "Mellow Vibes Harmony");
  CHECK(text::apply_case_pattern(CasePattern::mixed, "iPhone") == "iPhone");
}

TEST_CASE("entity_key collapses case and whitespace") {
  CHECK(text::entity_key("  Hurlingham   Reggae Band ") == "hurlingham reggae band");
  CHECK(text::entity_key("PARIS") == text::entity_key("paris"));
}

TEST_CASE("fnv1a64 is stable") {
  // frozen: the fingerprint scheme must not drift across builds
  CHECK(text::to_hex(text::fnv1a64("seedforge")) == "31dbb010bd0fa86b");
  CHECK(text::fnv1a64("") == 0xcbf29ce484222325ULL);
}

TEST_CASE("format_double round-trips shortest form") {
  CHECK(text::format_double(0.0) == "0");
  CHECK(text::format_double(0.7) == "0.7");
  CHECK(text::format_double(1.0) == "1");
}
