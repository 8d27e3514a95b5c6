#pragma once

#include <stdexcept>
#include <string>

namespace branchforge {

// Failure taxonomy. The first block is domain/validation trouble (bad input,
// unmet precondition); the second block signals internal assertion failures,
// i.e. the implementation or the underlying theory broke a promise. The CLI
// maps the former to exit code 2 and the latter to exit code 3.
enum class Errc {
  parse_error,
  nonzero_constant_term,
  bad_valuation,
  not_unit_one,
  zero_constant_term,
  division_by_zero,
  truncation_insufficient,
  smooth_or_degenerate,
  bad_leading_coefficient,
  no_such_contact,
  precondition_violated,
  not_flow_eligible,
  not_normal_form,
  degenerate_change,

  non_termination,
  affine_law_violated,
  zero_beta,
  invariant_drift,
  internal,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::parse_error: return "ParseError";
    case Errc::nonzero_constant_term: return "NonzeroConstantTerm";
    case Errc::bad_valuation: return "BadValuation";
    case Errc::not_unit_one: return "NotUnitOne";
    case Errc::zero_constant_term: return "ZeroConstantTerm";
    case Errc::division_by_zero: return "DivisionByZero";
    case Errc::truncation_insufficient: return "TruncationInsufficient";
    case Errc::smooth_or_degenerate: return "SmoothOrDegenerate";
    case Errc::bad_leading_coefficient: return "BadLeadingCoefficient";
    case Errc::no_such_contact: return "NoSuchContact";
    case Errc::precondition_violated: return "PreconditionViolated";
    case Errc::not_flow_eligible: return "NotFlowEligible";
    case Errc::not_normal_form: return "NotNormalForm";
    case Errc::degenerate_change: return "DegenerateChange";
    case Errc::non_termination: return "NonTermination";
    case Errc::affine_law_violated: return "AffineLawViolated";
    case Errc::zero_beta: return "ZeroBeta";
    case Errc::invariant_drift: return "InvariantDrift";
    case Errc::internal: return "InternalError";
  }
  return "UnknownError";
}

// True for conditions that indicate a broken internal guarantee rather than
// rejectable input.
inline bool errc_is_internal(Errc c) {
  switch (c) {
    case Errc::non_termination:
    case Errc::affine_law_violated:
    case Errc::zero_beta:
    case Errc::invariant_drift:
    case Errc::internal:
      return true;
    default:
      return false;
  }
}

class BranchError : public std::runtime_error {
 public:
  BranchError(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what),
        code_(code) {}

  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) {
  throw BranchError(code, what);
}

inline void require(bool cond, Errc code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace branchforge
