#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace adaptive_mls {

struct SelftestOptions {
  /// Negative control: zero every smoothness indicator before the WENO suppression suite.
  bool corrupt_indicators = false;
};

struct SuiteResult {
  std::string name;
  std::size_t checks = 0;
  std::size_t failures = 0;
  std::string detail;  ///< worst observed deviation, or the first failure

  bool passed() const noexcept { return checks > 0 && failures == 0; }
};

struct SelftestReport {
  std::vector<SuiteResult> suites;

  bool passed() const noexcept {
    for (const auto& s : suites)
      if (!s.passed()) return false;
    return !suites.empty();
  }
};

/// Oracle equivalence, partition-of-unity sums, polynomial reproduction and WENO suppression.
SelftestReport run_selftest(const SelftestOptions& options = {});

}  // namespace adaptive_mls
