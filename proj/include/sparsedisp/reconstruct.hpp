#pragma once

// Dense reconstruction of a sparse disparity map: scan-line propagation
// followed by a mode-of-neighbors estimate for whatever remains unknown.

#include <algorithm>
#include <span>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "sparsedisp/grid.hpp"

namespace sparsedisp {

struct PeekConfig {
  int window = 5;  // odd neighbor window side, centered on the target cell

  void validate() const {
    if (window < 3 || window % 2 == 0) {
      throw std::invalid_argument("peek window must be odd and >= 3, got " +
                                  std::to_string(window));
    }
  }
};

/// Scan-line propagation on a single row, in place.
///
/// Interior columns j = 1 .. n-2 are scanned for known values:
///   - the run before the first interior known takes row[0];
///   - a run between two equal knowns takes that value;
///   - the run after the last interior known takes row[n-1].
/// Unknown runs between two unequal knowns are left untouched.
inline void propagate_row(std::span<int> row) {
  const int n = static_cast<int>(row.size());
  if (n == 0) return;
  if (row[0] == kUnknownDisparity || row[n - 1] == kUnknownDisparity) {
    throw std::invalid_argument("propagate_rows: first and last columns must be known");
  }
  int prev = kUnknownDisparity;
  int fill_from = 1;
  for (int j = 1; j <= n - 2; ++j) {
    const int v = row[j];
    if (v == kUnknownDisparity) continue;
    if (prev != kUnknownDisparity) {
      if (v == prev) std::fill(row.begin() + fill_from, row.begin() + j, prev);
    } else {
      std::fill(row.begin() + fill_from, row.begin() + j, row[0]);
    }
    prev = v;
    fill_from = j + 1;
  }
  if (fill_from < n - 1) std::fill(row.begin() + fill_from, row.begin() + (n - 1), row[n - 1]);
}

/// Rows are independent.
inline DisparityMap propagate_rows(DisparityMap map) {
  for (int y = 0; y < map.height(); ++y) propagate_row(map.row(y));
  return map;
}

/// Statistical mode; ties go to the smallest value.
inline int mode_of(const std::vector<int>& values) {
  if (values.empty()) throw std::invalid_argument("mode of an empty multiset");
  std::map<int, int> freq;
  for (int v : values) ++freq[v];
  int best = freq.begin()->first, best_n = 0;
  for (auto [v, n] : freq) {
    if (n > best_n) {
      best = v;
      best_n = n;
    }
  }
  return best;
}

/// Fills every unknown cell with the mode of the known values in its
/// window x window neighborhood (clipped at the image edges). One raster
/// scan, updating in place, so cells filled earlier count as known for later
/// ones. The scan order is part of the result; do not parallelize.
inline DisparityMap peek_fill(DisparityMap map, const PeekConfig& cfg) {
  cfg.validate();
  const int r = cfg.window / 2;
  std::vector<int> known;
  known.reserve(static_cast<std::size_t>(cfg.window) * cfg.window);
  for (int y = 0; y < map.height(); ++y) {
    for (int x = 0; x < map.width(); ++x) {
      if (map(x, y) != kUnknownDisparity) continue;
      known.clear();
      for (int v = std::max(0, y - r); v <= std::min(map.height() - 1, y + r); ++v) {
        for (int u = std::max(0, x - r); u <= std::min(map.width() - 1, x + r); ++u) {
          if (map(u, v) != kUnknownDisparity) known.push_back(map(u, v));
        }
      }
      if (known.empty()) {
        throw std::logic_error("peek_fill: no known disparity around (" + std::to_string(x) +
                               "," + std::to_string(y) + "); first column must be known");
      }
      map(x, y) = mode_of(known);
    }
  }
  return map;
}

}  // namespace sparsedisp
