#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "branchforge/json_io.hpp"

namespace branchforge {

struct PropertyResult {
  std::string name;
  long long instances = 0;
  bool passed = true;
  std::string detail;  // failure description with the reproducing seed
};

std::vector<PropertyResult> run_selftest(std::uint64_t seed, long long count);
Json selftest_report(std::uint64_t seed, long long count, bool& all_passed);

// Seeded generators shared between cmd_selftest and the acceptance suite.
PuiseuxBranch random_branch(std::uint64_t seed, Exp conductor_cap);
std::vector<PuiseuxBranch> make_corpus(std::uint64_t seed, long long size,
                                       Exp conductor_cap);
VectorField random_eligible_field(std::uint64_t seed);

}  // namespace branchforge
