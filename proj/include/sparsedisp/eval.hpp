#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "sparsedisp/grid.hpp"

namespace sparsedisp {

struct EvalConfig {
  double delta_d = 1.0;  // error tolerance in disparity units
  int border = 0;        // pixels excluded along every image edge

  void validate() const {
    if (!(delta_d > 0.0)) throw std::invalid_argument("delta_d must be positive");
    if (border < 0) throw std::invalid_argument("border must be >= 0");
  }
};

struct EvalReport {
  double bad_percent = 0.0;
  std::int64_t n_evaluated = 0;
  std::int64_t n_bad = 0;
  std::string method_name;
};

struct SparsityReport {
  std::int64_t raw_boundary_count = 0;
  std::int64_t refined_boundary_count = 0;
  /// Pixels where a disparity is measured: refined boundary plus the first
  /// and last columns.
  std::int64_t computed_pixel_count = 0;
  std::int64_t image_pixel_count = 0;
  double refined_fraction_of_image = 0.0;
  double computed_fraction_of_image = 0.0;
  double reduction_percent = 0.0;
};

/// Percentage of evaluated pixels whose disparity is off by more than
/// delta_d. Evaluated pixels have truth > 0 and lie at least `border` pixels
/// inside every edge.
inline EvalReport bad_pixel_rate(const DisparityMap& computed, const DisparityMap& truth,
                                 const EvalConfig& cfg, std::string method_name = {}) {
  cfg.validate();
  require_same_shape(computed, truth, "bad_pixel_rate");
  const int w = truth.width(), h = truth.height();
  EvalReport rep;
  rep.method_name = std::move(method_name);
  for (int y = cfg.border; y < h - cfg.border; ++y) {
    for (int x = cfg.border; x < w - cfg.border; ++x) {
      if (truth(x, y) <= 0) continue;
      ++rep.n_evaluated;
      if (std::abs(static_cast<double>(computed(x, y) - truth(x, y))) > cfg.delta_d) ++rep.n_bad;
    }
  }
  if (rep.n_evaluated == 0) {
    throw std::invalid_argument("bad_pixel_rate: no pixel left to evaluate");
  }
  rep.bad_percent = 100.0 * static_cast<double>(rep.n_bad) / static_cast<double>(rep.n_evaluated);
  return rep;
}

inline SparsityReport sparsity_stats(const BinaryMap& raw, const BinaryMap& refined) {
  require_same_shape(raw, refined, "sparsity_stats");
  const int w = raw.width(), h = raw.height();
  SparsityReport rep;
  rep.raw_boundary_count = static_cast<std::int64_t>(count_ones(raw));
  rep.refined_boundary_count = static_cast<std::int64_t>(count_ones(refined));
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      rep.computed_pixel_count += refined(x, y) != 0 || x == 0 || x == w - 1;
    }
  }
  rep.image_pixel_count = static_cast<std::int64_t>(w) * h;
  const auto n = static_cast<double>(rep.image_pixel_count);
  rep.refined_fraction_of_image = static_cast<double>(rep.refined_boundary_count) / n;
  rep.computed_fraction_of_image = static_cast<double>(rep.computed_pixel_count) / n;
  rep.reduction_percent =
      rep.raw_boundary_count == 0
          ? 0.0
          : 100.0 * static_cast<double>(rep.raw_boundary_count - rep.refined_boundary_count) /
                static_cast<double>(rep.raw_boundary_count);
  return rep;
}

}  // namespace sparsedisp
