#pragma once

#include <cmath>
#include <vector>

#include "hfuv/path.hpp"

namespace fixture {

// Path with constant sigma, no Brownian motion, and the given jumps.
inline hfuv::SamplePath synthetic_path(std::size_t n, double sigma, const std::vector<double>& sizes,
                                       const std::vector<double>& times, double T = 1.0) {
  hfuv::SamplePath p;
  p.n = n;
  p.T = T;
  const std::size_t N = hfuv::window_count(n, T);
  p.x_grid.assign(N + 1, 0.0);
  p.sigma_grid.assign(N + 1, sigma);
  p.w_increments.assign(N, 0.0);
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    hfuv::JumpRecord j;
    j.time = times[k];
    j.size = sizes[k];
    j.sigma_pre = j.sigma_post = sigma;
    j.interval = static_cast<std::size_t>(std::ceil(times[k] * static_cast<double>(n)));
    p.jumps.push_back(j);
  }
  for (std::size_t i = 1; i <= N; ++i) {
    double js = 0.0;
    for (const auto& j : p.jumps)
      if (j.interval == i) js += j.size;
    p.x_grid[i] = p.x_grid[i - 1] + js;
  }
  return p;
}

}  // namespace fixture
