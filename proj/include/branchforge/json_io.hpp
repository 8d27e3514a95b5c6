#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "branchforge/errors.hpp"
#include "branchforge/normalform.hpp"

namespace branchforge {

using Json = nlohmann::ordered_json;

// Wire form of a parametrization (t^n, sum a_e t^e).
struct BranchDocument {
  Exp n = 0;
  std::vector<std::pair<Exp, Scalar>> terms;
  std::optional<Exp> truncation;

  friend bool operator==(const BranchDocument& a,
                         const BranchDocument& b) = default;
};

BranchDocument document_from_json(const Json& j);
Json document_to_json(const BranchDocument& d);
Json document_for_branch(const PuiseuxBranch& b);

struct CommandOptions {
  std::optional<Exp> truncation;  // overrides the document's field
  bool primitive = false;         // divide out a common exponent gcd
};

Json analyze_report(const BranchDocument& doc, const CommandOptions& opt);
Json reduce_report(const BranchDocument& doc, const CommandOptions& opt);
Json equiv_report(const BranchDocument& da, const BranchDocument& db,
                  const CommandOptions& opt, bool& equivalent_out);

Json form_to_json(const DifferentialForm& w);
Json error_to_json(const BranchError& e);

}  // namespace branchforge
