#pragma once

#include <string>
#include <vector>

#include "seedforge/model.hpp"

namespace seedforge::testing {

// Deterministic 2-hop fixture seeds. Context documents are clause-shaped
// ("<S> <relation phrase> <O>.") so the fake backend can parse them; the
// question mentions the head entity and the answer is the tail entity.
//
// leak markers: a question containing "glimmering" leaks on first-attempt
// replacements only; "radiant" leaks on every attempt.
struct FixtureSpec {
  int n_seeds = 20;
  std::vector<int> leak_first_attempt;  // seed indices
  std::vector<int> leak_always;
};

std::vector<Sample> make_fixture_seeds(const FixtureSpec& spec);

// surface -> semantic type for every entity used by make_fixture_seeds
std::vector<std::pair<std::string, std::string>> fixture_entity_types(
    const std::vector<Sample>& seeds);

}  // namespace seedforge::testing
