#pragma once

#include <cstddef>
#include <span>
#include <string>

#include "hfuv/kernel.hpp"
#include "hfuv/path.hpp"

namespace hfuv {

enum class StatKind { V, Y, U, QV, PV, ECDF, EP };
enum class Strategy { Auto, Factorized, Nested, Hybrid };

std::string_view to_string(StatKind k) noexcept;
std::string_view to_string(Strategy s) noexcept;

struct IndexWindow {
  std::size_t n = 1;
  double t = 1.0;
  std::size_t count = 0;  // floor(nt)
};

struct StatValue {
  StatKind kind = StatKind::V;
  double value = 0.0;
  IndexWindow window;
  std::string kernel_id;
  Strategy strategy = Strategy::Factorized;
};

/// Raw increments Delta_i^n X (unscaled) together with the sampling frequency.
struct IncrementData {
  std::span<const double> dx;
  std::size_t n = 1;
};

IndexWindow make_window(std::size_t n, double t, std::size_t available);

/// V(H,X,l)_t^n = n^{-(d-l)} sum over B_t^n(d) of H(Delta_i X).
StatValue v_stat(IncrementData data, const KernelSpec& k, double t, Strategy s = Strategy::Auto);
StatValue v_stat(const SamplePath& path, const KernelSpec& k, double t, Strategy s = Strategy::Auto);

/// Y_t^n(H,X,l) = n^{-l} sum H(sqrt(n) Delta_i X, Delta_j X).
StatValue y_stat(IncrementData data, const KernelSpec& k, double t, Strategy s = Strategy::Auto);
StatValue y_stat(const SamplePath& path, const KernelSpec& k, double t, Strategy s = Strategy::Auto);

/// U(X,H)_t^n = C(floor(nt), d)^{-1} sum_{i_1<...<i_d} H(sqrt(n) Delta_i X).
StatValue u_stat(IncrementData data, const KernelSpec& k, double t, Strategy s = Strategy::Auto);
StatValue u_stat(const SamplePath& path, const KernelSpec& k, double t, Strategy s = Strategy::Auto);

StatValue realized_qv(IncrementData data, double t);
StatValue realized_qv(const SamplePath& path, double t);

/// scaled: n^{-1} sum |sqrt(n) Delta_i X|^p; unscaled: sum |Delta_i X|^p.
StatValue power_variation(IncrementData data, double p, bool scaled, double t);
StatValue power_variation(const SamplePath& path, double p, bool scaled, double t);

struct EmpiricalProcessValue {
  double f_n = 0.0;    // n^{-1} sum 1{alpha_i <= x}
  double f_bar = 0.0;  // n^{-1} sum Phi_{sigma_{(i-1)/n}}(x)
  double g_n = 0.0;    // n^{-1/2} sum (1{alpha_i <= x} - Phi_{sigma_{(i-1)/n}}(x))
};

EmpiricalProcessValue empirical_process(const SamplePath& path, double t, double x);

/// E[V 1{z V <= x}] for V ~ N(0,1).
double phi_bar(double z, double x) noexcept;

}  // namespace hfuv
