#include "hfuv/model.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "hfuv/error.hpp"

namespace hfuv {
namespace {

[[noreturn]] void fail(const std::string& key, const std::string& constraint) {
  throw ConfigError("model." + key + ": " + constraint);
}

void validate_sizes(const JumpModel& j) {
  if (const auto* atoms = std::get_if<AtomList>(&j.size)) {
    if (atoms->atoms.empty()) fail("jumps.size.atoms", "must list at least one atom");
    double total = 0.0;
    for (const auto& [value, prob] : atoms->atoms) {
      if (value == 0.0 || !std::isfinite(value)) fail("jumps.size.atoms", "jump sizes must be finite and nonzero");
      if (std::abs(value) > j.max_abs) fail("jumps.size.atoms", "|value| <= jumps.max_abs required");
      if (!(prob >= 0.0)) fail("jumps.size.atoms", "probabilities must be >= 0");
      total += prob;
    }
    if (std::abs(total - 1.0) > 1e-9) fail("jumps.size.atoms", "probabilities must sum to 1");
  } else if (const auto* u = std::get_if<UniformSize>(&j.size)) {
    if (!(u->a < u->b)) fail("jumps.size", "uniform requires a < b");
    if (std::max(std::abs(u->a), std::abs(u->b)) > j.max_abs) fail("jumps.size", "uniform support must lie in [-max_abs, max_abs]");
  } else if (const auto* tn = std::get_if<TruncNormalSize>(&j.size)) {
    if (!(tn->s > 0.0)) fail("jumps.size", "truncnormal requires s > 0");
    if (!(tn->min_abs >= 0.0) || !(tn->min_abs < j.max_abs)) fail("jumps.size", "truncnormal requires 0 <= min_abs < max_abs");
  }
}

}  // namespace

void validate(const ModelConfig& cfg) {
  const auto& v = cfg.vol;
  if (!std::isfinite(cfg.drift)) fail("drift", "must be finite");
  if (!(cfg.bound_A > 0.0)) fail("bound_A", "must be > 0");
  if (std::abs(cfg.drift) > cfg.bound_A) fail("drift", "|drift| <= bound_A required");
  if (v.kind == VolKind::Constant) {
    if (!(v.sigma0 >= 0.0)) fail("volatility.sigma0", "must be >= 0 for a constant volatility");
    if (v.tilde_b != 0.0 || v.tilde_sigma != 0.0 || v.tilde_v != 0.0)
      fail("volatility", "constant volatility requires tilde_b = tilde_sigma = tilde_v = 0");
  } else {
    if (!(v.sigma0 > 0.0)) fail("volatility.sigma0", "must be > 0");
    if (!std::isfinite(v.tilde_b) || !std::isfinite(v.tilde_sigma) || !std::isfinite(v.tilde_v))
      fail("volatility", "coefficients must be finite");
  }
  if (!(v.floor_eps > 0.0)) fail("volatility.floor_eps", "must be > 0");
  if (v.sigma0 > cfg.bound_A) fail("volatility.sigma0", "sigma0 <= bound_A required");
  const auto& j = cfg.jumps;
  if (!(j.intensity >= 0.0) || !std::isfinite(j.intensity)) fail("jumps.intensity", "must be finite and >= 0");
  if (!(j.max_abs > 0.0)) fail("jumps.max_abs", "must be > 0");
  if (j.max_abs > cfg.bound_A) fail("jumps.max_abs", "max_abs <= bound_A required");
  validate_sizes(j);
}

}  // namespace hfuv
