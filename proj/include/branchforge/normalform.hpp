#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "branchforge/flows.hpp"

namespace branchforge {

// Reduced parametrization (t^n, t^m + sum a_i t^i) whose support avoids
// every exponent the elimination flows can reach.
struct NormalForm {
  Exp n = 0;
  Exp m = 0;
  std::optional<Exp> lambda;            // nullopt = infinity
  std::map<Exp, Scalar> coefficients;   // exponents in (m, c), conductor-cut
  PuiseuxBranch branch;
  SemigroupData semigroup;
  LambdaData lambda_data;
  std::vector<EliminationStep> audit;
};

// Zeroes every coefficient at or above the conductor; semigroup data is
// asserted unchanged.
PuiseuxBranch truncate_at_conductor(const PuiseuxBranch& b);

struct NormalCheck {
  bool ok = true;
  std::optional<Exp> violation;  // smallest offending exponent
  std::string detail;
};

NormalCheck is_normal(const PuiseuxBranch& b);
NormalCheck is_normal(const PuiseuxBranch& b, const LambdaData& ld);

NormalForm reduce(const PuiseuxBranch& b);

// Certificate for the residual scaling action t -> rt on normal forms:
// each shared exponent i contributes the constraint r^{i-m} = a'_i / a_i.
struct EquivalenceCertificate {
  bool equivalent = false;
  std::string reason;
  std::vector<std::pair<Exp, Scalar>> constraints;
  std::optional<Scalar> r;  // set when the constraints pin r uniquely
};

EquivalenceCertificate equivalent(const NormalForm& a, const NormalForm& b);

// Random analytic change of coordinates applied to b, pushed back to Puiseux
// form and conductor-truncated: (x, y) -> (a x + P, d y + Q) with P, Q in
// (x,y)^2, optionally composed with a parameter scaling t -> rho t.
std::pair<PuiseuxBranch, PuiseuxBranch> random_equivalent_pair(
    const PuiseuxBranch& b, std::uint64_t seed);

}  // namespace branchforge
