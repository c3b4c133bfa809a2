#pragma once

#include <cstddef>
#include <span>

namespace hfuv {

/// Pairwise (tree) summation with a fixed split rule, so the result only
/// depends on the input order and length.
double pairwise_sum(std::span<const double> values) noexcept;

}  // namespace hfuv
