#pragma once

#include <string>
#include <vector>

namespace mfglg::verify {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

// fast invariant checks shared by the CLI `verify` command and the test suite
std::vector<CheckResult> run_checks(const std::string& scratch_dir);

} // namespace mfglg::verify
