#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace polsim {

// One validation criterion of the release gate. Criteria are implemented
// exactly as stated; when a target is not reachable by the physics the
// criterion reports FAIL with the measured value rather than being loosened.
struct CriterionOutcome {
  int id = 0;
  std::string title;
  bool pass = false;
  std::vector<std::string> details;  // measured-vs-target lines
};

// Run one criterion (1..8). Throws config_error for an unknown id.
CriterionOutcome run_criterion(int id);

// Run every criterion in order.
std::vector<CriterionOutcome> run_all_criteria();

// "PASS criterion N: title" / "FAIL criterion N: title" plus indented detail
// lines.
void print_outcome(std::ostream& out, const CriterionOutcome& outcome);

}  // namespace polsim
