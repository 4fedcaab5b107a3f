// SPDX-License-Identifier: Apache-2.0

#ifndef HPFAS_ACCEPTANCE_HPP
#define HPFAS_ACCEPTANCE_HPP

#include <string>
#include <vector>

namespace hpfas {

enum class AcceptanceLevel { quick, full };

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  /// Set when the failure is a documented property of the approximation under
  /// test rather than a defect; the text says which sub-check failed.
  std::string known_limitation;
  std::string measured;
  std::string allowed;
  double seconds = 0.0;
  double budget_seconds = 0.0;
};

struct AcceptanceOptions {
  AcceptanceLevel level = AcceptanceLevel::quick;
  std::vector<int> only; // empty: all criteria
};

/// Runs the suite; every criterion runs to completion even after failures.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt);

/// One line per criterion: id, PASS/FAIL, name, measured vs allowed, runtime.
std::string format_report(const std::vector<CriterionResult>& results);

/// Monte Carlo trials per estimate at the given level.
long acceptance_trials(AcceptanceLevel level);

} // namespace hpfas

#endif // HPFAS_ACCEPTANCE_HPP
