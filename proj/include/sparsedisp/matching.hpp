#pragma once

// Window-based disparity search over lightness maps. The left image is the
// target; candidate d samples the right image at column x - d.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "sparsedisp/grid.hpp"

namespace sparsedisp {

struct MatchConfig {
  int block = 7;  // odd window side
  int d_max = 15;

  void validate() const {
    if (block < 1 || block % 2 == 0) {
      throw std::invalid_argument("block size must be odd and >= 1, got " + std::to_string(block));
    }
    if (d_max < 0) throw std::invalid_argument("d_max must be >= 0");
  }
  int radius() const { return block / 2; }
};

inline constexpr double kInvalidCost = std::numeric_limits<double>::infinity();

/// SAD over the block window centered at (x,y); clamp-to-edge in both
/// images. kInvalidCost when x - d < 0.
inline double sad_cost(const LightnessMap& left, const LightnessMap& right, int x, int y, int d,
                       int block) {
  if (x - d < 0) return kInvalidCost;
  const int r = block / 2;
  double sum = 0.0;
  for (int v = y - r; v <= y + r; ++v) {
    for (int u = x - r; u <= x + r; ++u) {
      sum += std::abs(left.clamped(u, v) - right.clamped(u - d, v));
    }
  }
  return sum;
}

/// Zero-mean normalized cross-correlation of the two windows; 0 when
/// either window is flat. Returns -infinity when x - d < 0.
inline double ncc_score(const LightnessMap& left, const LightnessMap& right, int x, int y, int d,
                        int block) {
  if (x - d < 0) return -std::numeric_limits<double>::infinity();
  const int r = block / 2;
  const double n = static_cast<double>(block) * block;
  double sum_l = 0.0, sum_r = 0.0;
  for (int v = y - r; v <= y + r; ++v) {
    for (int u = x - r; u <= x + r; ++u) {
      sum_l += left.clamped(u, v);
      sum_r += right.clamped(u - d, v);
    }
  }
  const double mean_l = sum_l / n, mean_r = sum_r / n;
  double cross = 0.0, var_l = 0.0, var_r = 0.0;
  for (int v = y - r; v <= y + r; ++v) {
    for (int u = x - r; u <= x + r; ++u) {
      const double a = left.clamped(u, v) - mean_l;
      const double b = right.clamped(u - d, v) - mean_r;
      cross += a * b;
      var_l += a * a;
      var_r += b * b;
    }
  }
  // Flat window: lightness spread below ~1e-6 L units per sample.
  constexpr double kFlat = 1e-12;
  if (var_l <= kFlat * n || var_r <= kFlat * n) return 0.0;
  return cross / std::sqrt(var_l * var_r);
}

/// Winner-take-all SAD disparity at one pixel: smallest d on ties, 0 when
/// every candidate is invalid.
inline int sad_disparity(const LightnessMap& left, const LightnessMap& right, int x, int y,
                         const MatchConfig& cfg) {
  int best_d = 0;
  double best = kInvalidCost;
  for (int d = 0; d <= cfg.d_max; ++d) {
    const double c = sad_cost(left, right, x, y, d, cfg.block);
    if (c < best) {
      best = c;
      best_d = d;
    }
  }
  return best_d;
}

/// SAD disparities at mask pixels and at the first and last columns; every
/// other cell is kUnknownDisparity.
inline DisparityMap match_sparse(const LightnessMap& left, const LightnessMap& right,
                                 const BinaryMap& mask, const MatchConfig& cfg) {
  cfg.validate();
  require_same_shape(left, right, "match_sparse");
  require_same_shape(left, mask, "match_sparse");
  const int w = left.width();
  DisparityMap out(w, left.height(), kUnknownDisparity);
  for (int y = 0; y < left.height(); ++y) {
    for (int x = 0; x < w; ++x) {
      if (mask(x, y) != 0 || x == 0 || x == w - 1) {
        out(x, y) = sad_disparity(left, right, x, y, cfg);
      }
    }
  }
  return out;
}

inline DisparityMap match_dense_sad(const LightnessMap& left, const LightnessMap& right,
                                    const MatchConfig& cfg) {
  cfg.validate();
  require_same_shape(left, right, "match_dense_sad");
  DisparityMap out(left.width(), left.height(), 0);
  for (int y = 0; y < left.height(); ++y) {
    for (int x = 0; x < left.width(); ++x) out(x, y) = sad_disparity(left, right, x, y, cfg);
  }
  return out;
}

inline DisparityMap match_dense_ncc(const LightnessMap& left, const LightnessMap& right,
                                    const MatchConfig& cfg) {
  cfg.validate();
  require_same_shape(left, right, "match_dense_ncc");
  DisparityMap out(left.width(), left.height(), 0);
  for (int y = 0; y < left.height(); ++y) {
    for (int x = 0; x < left.width(); ++x) {
      int best_d = 0;
      double best = -std::numeric_limits<double>::infinity();
      for (int d = 0; d <= cfg.d_max; ++d) {
        const double s = ncc_score(left, right, x, y, d, cfg.block);
        if (s > best) {
          best = s;
          best_d = d;
        }
      }
      out(x, y) = best_d;
    }
  }
  return out;
}

}  // namespace sparsedisp
