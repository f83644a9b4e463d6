#pragma once

// Segment boundary detection and refinement: Moore-neighborhood boundary
// detection, the fill and remove 3x3 morphological filters, and pruning of
// the smallest 8-connected components.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "sparsedisp/grid.hpp"

namespace sparsedisp {

struct ComponentLabels {
  Grid<int> ids;                 // 0 = background, components are 1..n
  int n_components = 0;
  std::vector<std::int64_t> sizes;  // sizes[id - 1]
};

/// 1 where any in-image Moore neighbor carries a different label.
inline BinaryMap detect_boundaries(const LabelMap& labels) {
  const int w = labels.width(), h = labels.height();
  BinaryMap out(w, h, 0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int self = labels(x, y);
      bool edge = false;
      for (int dy = -1; dy <= 1 && !edge; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          if ((dx || dy) && labels.contains(x + dx, y + dy) && labels(x + dx, y + dy) != self) {
            edge = true;
            break;
          }
        }
      }
      out(x, y) = edge ? 1 : 0;
    }
  }
  return out;
}

/// Sets isolated interior 0s (all eight neighbors 1) to 1. Image-border
/// pixels are never changed. Reads only the input.
inline BinaryMap morph_fill(const BinaryMap& in) {
  BinaryMap out = in;
  for (int y = 1; y + 1 < in.height(); ++y) {
    for (int x = 1; x + 1 < in.width(); ++x) {
      if (in(x, y) != 0) continue;
      bool ring = true;
      for (int dy = -1; dy <= 1 && ring; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          if ((dx || dy) && in(x + dx, y + dy) == 0) {
            ring = false;
            break;
          }
        }
      }
      if (ring) out(x, y) = 1;
    }
  }
  return out;
}

/// Clears 1s whose four 4-neighbors are all 1, leaving only outlines.
/// Image-border pixels are never changed. Reads only the input.
inline BinaryMap morph_remove(const BinaryMap& in) {
  BinaryMap out = in;
  for (int y = 1; y + 1 < in.height(); ++y) {
    for (int x = 1; x + 1 < in.width(); ++x) {
      if (in(x, y) != 0 && in(x - 1, y) && in(x + 1, y) && in(x, y - 1) && in(x, y + 1)) {
        out(x, y) = 0;
      }
    }
  }
  return out;
}

/// 8-connected labeling; ids are assigned in raster order of each
/// component's first pixel.
inline ComponentLabels label_components(const BinaryMap& map) {
  const int w = map.width(), h = map.height();
  ComponentLabels out{Grid<int>(w, h, 0), 0, {}};
  std::vector<std::pair<int, int>> stack;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (map(x, y) == 0 || out.ids(x, y) != 0) continue;
      const int id = ++out.n_components;
      std::int64_t size = 0;
      out.ids(x, y) = id;
      stack.assign(1, {x, y});
      while (!stack.empty()) {
        auto [cx, cy] = stack.back();
        stack.pop_back();
        ++size;
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = cx + dx, ny = cy + dy;
            if (map.contains(nx, ny) && map(nx, ny) != 0 && out.ids(nx, ny) == 0) {
              out.ids(nx, ny) = id;
              stack.emplace_back(nx, ny);
            }
          }
        }
      }
      out.sizes.push_back(size);
    }
  }
  return out;
}

/// Removes the smallest components (ties: lower id first) for as long as the
/// cumulative removed pixel count stays within fraction * foreground pixels.
/// Stops at the first component that would overrun the budget.
inline BinaryMap prune_components(const BinaryMap& map, double fraction) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw std::invalid_argument("prune fraction must lie in (0,1)");
  }
  auto comps = label_components(map);
  std::int64_t total = 0;
  for (auto s : comps.sizes) total += s;
  // Slack absorbs rounding in fraction * total (0.04 * 100 must admit 4).
  const double budget = fraction * static_cast<double>(total) + 1e-9;

  std::vector<int> order(comps.n_components);
  std::iota(order.begin(), order.end(), 1);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return comps.sizes[a - 1] < comps.sizes[b - 1];
  });
  std::vector<char> drop(comps.n_components + 1, 0);
  std::int64_t removed = 0;
  for (int id : order) {
    const auto s = comps.sizes[id - 1];
    if (static_cast<double>(removed + s) > budget) break;
    removed += s;
    drop[id] = 1;
  }
  BinaryMap out = map;
  auto id_it = comps.ids.begin();
  for (auto& v : out) {
    if (drop[*id_it++]) v = 0;
  }
  return out;
}

}  // namespace sparsedisp
