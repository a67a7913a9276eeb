// One-shot execution of the library's invariant and oracle checks, as run by
// `nhota check`.
#pragma once

#include <functional>
#include <string>
#include <vector>

namespace nhota {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;  // measured margins
};

enum class CheckScale { quick, full };

using CheckObserver = std::function<void(const CheckResult&)>;

std::vector<CheckResult> run_check_suite(CheckScale scale, const CheckObserver& on_result = {});

}  // namespace nhota
