#pragma once

#include <cstdint>
#include <span>

#include "hfuv/kernel.hpp"

namespace hfuv {

enum class RhoMethod { Auto, ClosedForm, Tensorized, MonteCarlo };

struct RhoResult {
  double value = 0.0;
  double std_error = 0.0;  // Monte Carlo only
  RhoMethod method = RhoMethod::Auto;
};

/// rho_H(sigma, y) = E[H(sigma_1 U_1, ..., sigma_l U_l, y)], U ~ N(0, I_l).
/// Auto picks the closed form when L ignores the x-block, tensorized
/// quadrature for l <= 2 and Monte Carlo (2^17 draws, fixed sub-seed) beyond.
RhoResult rho(const KernelSpec& k, std::span<const double> sigmas, std::span<const double> y,
              RhoMethod method = RhoMethod::Auto);

/// E[f(sigma U)] for one separable factor; pure powers use m_p sigma^p unless
/// closed_form is false.
double factor_expectation(const UnaryFactor& f, double sigma, bool closed_form = true);

}  // namespace hfuv
