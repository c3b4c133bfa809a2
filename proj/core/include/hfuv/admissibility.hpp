#pragma once

#include <string>
#include <vector>

#include "hfuv/kernel.hpp"

namespace hfuv {

enum class CheckStatus { Pass, Fail, Unverified };

struct AdmissibilityItem {
  std::string hypothesis;
  CheckStatus status = CheckStatus::Pass;
  std::string detail;
};

struct AdmissibilityReport {
  Regime regime = Regime::JumpLLN;
  std::vector<AdmissibilityItem> items;

  bool passed() const noexcept;
  /// "hypothesis: detail" of the first failing item, empty if none.
  std::string first_failure() const;
};

/// Checks every hypothesis of the kernel's declared regime. Power constraints
/// are symbolic; the vanishing conditions are probed numerically on shrinking
/// sequences; growth exponents are tracked per catalog atom.
AdmissibilityReport check_admissibility(const KernelSpec& k);

}  // namespace hfuv
