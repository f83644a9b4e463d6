#pragma once

// Histogram-accelerated 1-D K-Means over CIELAB lightness.
//
// The pixels are binned once; every Lloyd iteration then works on the bin
// centers weighted by their counts, so an iteration costs O(n_bins * k)
// regardless of image size. Labels are recovered per pixel through the
// pixel -> bin -> cluster mapping.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "sparsedisp/grid.hpp"

namespace sparsedisp {

struct Histogram {
  int n_bins = 0;
  std::vector<double> bin_edges;    // n_bins + 1, spanning [0,100]
  std::vector<std::int64_t> counts;  // n_bins
  std::vector<double> bin_centers;   // n_bins

  /// Bin of a lightness value; L == 100 falls in the last bin.
  int bin_of(double lightness) const {
    int b = static_cast<int>(std::floor(lightness / 100.0 * n_bins));
    return std::clamp(b, 0, n_bins - 1);
  }

  std::int64_t total() const {
    return std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
  }

  int occupied_bins() const {
    return static_cast<int>(std::count_if(counts.begin(), counts.end(),
                                          [](std::int64_t c) { return c > 0; }));
  }
};

struct ClusterModel {
  int k = 0;
  std::vector<double> centroids;    // ascending
  std::vector<int> bin_assignment;  // n_bins entries in [0,k)
  int iterations = 0;
  /// Weighted within-cluster sum of squares after each centroid update.
  std::vector<double> objective_trace;
};

struct KMeansOptions {
  int max_iter = 100;
  double tol = 1e-6;
};

inline Histogram build_histogram(const LightnessMap& map, int n_bins) {
  if (n_bins < 2) throw std::invalid_argument("histogram needs at least 2 bins");
  Histogram h;
  h.n_bins = n_bins;
  h.bin_edges.resize(n_bins + 1);
  for (int i = 0; i <= n_bins; ++i) h.bin_edges[i] = 100.0 * i / n_bins;
  h.bin_centers.resize(n_bins);
  for (int i = 0; i < n_bins; ++i) h.bin_centers[i] = 0.5 * (h.bin_edges[i] + h.bin_edges[i + 1]);
  h.counts.assign(n_bins, 0);
  for (double l : map) ++h.counts[h.bin_of(l)];
  return h;
}

namespace detail {

// Lloyd iterations run in exact arithmetic. Positions are measured in
// half-bin units, where bin b sits at 2b+1, and each centroid is kept as the
// fraction num/den. Distance comparisons are therefore exact and the
// lower-index tie rule holds even at exact midpoints.
struct Fraction {
  std::int64_t num = 0;
  std::int64_t den = 1;
};

using Wide = __int128;

inline Wide abs_wide(Wide v) { return v < 0 ? -v : v; }

/// |u - c| scaled by c.den.
inline Wide scaled_distance(std::int64_t u, const Fraction& c) {
  return abs_wide(Wide(u) * c.den - c.num);
}

/// Nearest centroid to position u; ties go to the lower index.
inline int nearest_centroid(std::int64_t u, const std::vector<Fraction>& centroids) {
  int best = 0;
  for (int j = 1; j < static_cast<int>(centroids.size()); ++j) {
    const auto& b = centroids[best];
    const auto& c = centroids[j];
    if (scaled_distance(u, c) * b.den < scaled_distance(u, b) * c.den) best = j;
  }
  return best;
}

inline bool less(const Fraction& a, const Fraction& b) {
  return Wide(a.num) * b.den < Wide(b.num) * a.den;
}

inline double to_lightness(const Fraction& f, int n_bins) {
  return static_cast<double>(f.num) * 50.0 / (static_cast<double>(f.den) * n_bins);
}

}  // namespace detail

/// Lloyd iterations over occupied bins.
///
/// Initialization places the k centroids evenly between the lowest and highest
/// occupied bin centers. When a cluster ends an assignment step empty, its
/// centroid is moved onto the occupied bin center farthest from that bin's
/// current centroid and the assignment is redone. Iteration stops once no
/// centroid moves by tol or more, or after max_iter updates. The returned
/// centroids are sorted ascending and bin_assignment is relabeled to match.
inline ClusterModel kmeans_histogram(const Histogram& hist, int k, KMeansOptions opts = {}) {
  using detail::Fraction;
  using detail::Wide;
  if (k <= 0) throw std::invalid_argument("k must be positive");
  if (opts.max_iter <= 0 || !(opts.tol > 0.0)) {
    throw std::invalid_argument("max_iter and tol must be positive");
  }
  std::vector<int> occupied;
  for (int i = 0; i < hist.n_bins; ++i) {
    if (hist.counts[i] > 0) occupied.push_back(i);
  }
  if (static_cast<int>(occupied.size()) < k) {
    throw std::invalid_argument("k=" + std::to_string(k) + " exceeds the " +
                                std::to_string(occupied.size()) + " occupied histogram bins");
  }
  auto pos = [](int b) { return std::int64_t{2} * b + 1; };

  const std::int64_t lo = pos(occupied.front());
  const std::int64_t hi = pos(occupied.back());
  std::vector<Fraction> centroids(k);
  for (int j = 0; j < k; ++j) {
    centroids[j] = k == 1 ? Fraction{lo, 1} : Fraction{lo * (k - 1) + (hi - lo) * j, k - 1};
  }

  std::vector<int> assign(hist.n_bins, 0);
  auto assign_all = [&] {
    for (int b : occupied) assign[b] = detail::nearest_centroid(pos(b), centroids);
  };
  auto repair_empty = [&] {
    // Bounded: each pass fixes at least one empty cluster.
    for (int pass = 0; pass < k; ++pass) {
      std::vector<std::int64_t> mass(k, 0);
      for (int b : occupied) mass[assign[b]] += hist.counts[b];
      int empty = -1;
      for (int j = 0; j < k && empty < 0; ++j) {
        if (mass[j] == 0) empty = j;
      }
      if (empty < 0) return;
      int far_bin = occupied.front();
      for (int b : occupied) {
        const auto& cb = centroids[assign[b]];
        const auto& cf = centroids[assign[far_bin]];
        if (detail::scaled_distance(pos(b), cb) * cf.den >
            detail::scaled_distance(pos(far_bin), cf) * cb.den) {
          far_bin = b;
        }
      }
      centroids[empty] = {pos(far_bin), 1};
      assign_all();
    }
  };

  ClusterModel model;
  model.k = k;
  const double unit = 50.0 / hist.n_bins;  // lightness per half-bin unit
  for (int it = 0; it < opts.max_iter; ++it) {
    assign_all();
    repair_empty();
    std::vector<std::int64_t> sum(k, 0), mass(k, 0);
    for (int b : occupied) {
      sum[assign[b]] += pos(b) * hist.counts[b];
      mass[assign[b]] += hist.counts[b];
    }
    double moved = 0.0;
    for (int j = 0; j < k; ++j) {
      if (mass[j] == 0) continue;
      const Fraction next{sum[j], mass[j]};
      const Wide diff = detail::abs_wide(Wide(next.num) * centroids[j].den -
                                         Wide(centroids[j].num) * next.den);
      const double step = static_cast<double>(diff) /
                          (static_cast<double>(next.den) * centroids[j].den) * unit;
      moved = std::max(moved, step);
      centroids[j] = next;
    }
    double objective = 0.0;
    for (int b : occupied) {
      double d = hist.bin_centers[b] - detail::to_lightness(centroids[assign[b]], hist.n_bins);
      objective += d * d * static_cast<double>(hist.counts[b]);
    }
    model.objective_trace.push_back(objective);
    model.iterations = it + 1;
    if (moved < opts.tol) break;
  }
  assign_all();

  // Sort ascending and relabel.
  std::vector<int> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return detail::less(centroids[a], centroids[b]);
  });
  std::vector<int> rank(k);
  for (int r = 0; r < k; ++r) rank[order[r]] = r;
  model.centroids.resize(k);
  for (int r = 0; r < k; ++r) {
    model.centroids[r] = detail::to_lightness(centroids[order[r]], hist.n_bins);
  }
  model.bin_assignment.resize(hist.n_bins);
  for (int b = 0; b < hist.n_bins; ++b) {
    int c = hist.counts[b] > 0 ? assign[b] : detail::nearest_centroid(pos(b), centroids);
    model.bin_assignment[b] = rank[c];
  }
  return model;
}

inline LabelMap assign_labels(const LightnessMap& map, const Histogram& hist,
                              const ClusterModel& model) {
  if (static_cast<int>(model.bin_assignment.size()) != hist.n_bins) {
    throw std::invalid_argument("cluster model and histogram disagree on bin count");
  }
  if (hist.total() != static_cast<std::int64_t>(map.size())) {
    throw std::invalid_argument("histogram mass does not match the lightness map's pixel count");
  }
  LabelMap out(map.width(), map.height());
  auto dst = out.begin();
  for (double l : map) *dst++ = model.bin_assignment[hist.bin_of(l)];
  return out;
}

}  // namespace sparsedisp
