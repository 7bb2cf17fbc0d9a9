// Release gate: run the validation criteria and report PASS/FAIL per line.
// Usage: polsim_acceptance [--criterion N]   (no flag = all criteria)
#include <cstdlib>
#include <cstring>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "polsim/acceptance.hpp"
#include "polsim/errors.hpp"

int main(int argc, char** argv) {
  int criterion = 0;  // 0 = all
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--criterion" && i + 1 < argc) {
      criterion = std::atoi(argv[++i]);
    } else if (arg.rfind("--criterion=", 0) == 0) {
      criterion = std::atoi(arg.c_str() + std::strlen("--criterion="));
    } else if (arg == "--help" || arg == "-h") {
      std::cout << "usage: polsim_acceptance [--criterion N]\n";
      return 0;
    } else {
      std::cerr << "unknown argument: " << arg << "\n";
      return 1;
    }
  }

  try {
    std::vector<polsim::CriterionOutcome> outcomes;
    if (criterion == 0) {
      outcomes = polsim::run_all_criteria();
    } else {
      outcomes.push_back(polsim::run_criterion(criterion));
    }
    bool all_pass = true;
    for (const auto& outcome : outcomes) {
      polsim::print_outcome(std::cout, outcome);
      all_pass = all_pass && outcome.pass;
    }
    return all_pass ? 0 : 3;
  } catch (const polsim::config_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
