#pragma once

#include <string>
#include <vector>

namespace cvqd::verify {

enum class Fault {
  None,
  EtaBar,  // perturb one cumulative transmissivity before the direct jump
};

Fault fault_from_string(const std::string& s);

struct CheckResult {
  std::string suite;
  std::string name;
  double measured = 0;
  double bound = 0;
  bool pass = false;
};

// theorem1, variance_law, gates, channel, fidelity, gradients
const std::vector<std::string>& suite_names();

std::vector<CheckResult> run_suite(const std::string& name, Fault fault);
std::vector<CheckResult> run_all(Fault fault);

bool all_passed(const std::vector<CheckResult>& results);
std::string report_text(const std::vector<CheckResult>& results);
std::string report_json(const std::vector<CheckResult>& results);

}  // namespace cvqd::verify
