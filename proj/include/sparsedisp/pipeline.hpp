#pragma once

// End-to-end flow: lightness -> K-Means segmentation of the left image ->
// boundary detection and refinement -> sparse SAD at boundaries ->
// propagation -> peek fill -> evaluation.

#include <chrono>
#include <optional>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "sparsedisp/boundary.hpp"
#include "sparsedisp/colorspace.hpp"
#include "sparsedisp/eval.hpp"
#include "sparsedisp/grid.hpp"
#include "sparsedisp/matching.hpp"
#include "sparsedisp/reconstruct.hpp"
#include "sparsedisp/segmentation.hpp"

namespace sparsedisp {

struct PipelineConfig {
  int k = 10;
  int block = 7;
  int peek_window = 5;
  int d_max = 15;
  int n_bins = 256;
  double prune_fraction = 0.04;
  int gt_scale = 16;
  EvalConfig eval;
  KMeansOptions kmeans;

  MatchConfig match() const { return {block, d_max}; }
  PeekConfig peek() const { return {peek_window}; }

  void validate() const {
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    match().validate();
    peek().validate();
    if (n_bins < 2) throw std::invalid_argument("n_bins must be >= 2");
    if (!(prune_fraction > 0.0 && prune_fraction < 1.0)) {
      throw std::invalid_argument("prune_fraction must lie in (0,1)");
    }
    if (gt_scale < 1) throw std::invalid_argument("gt_scale must be >= 1");
    eval.validate();
  }
};

/// Per-dataset parameters for the Middlebury 2001 pairs. Ground-truth scale
/// and search range follow the dataset's own encoding.
inline std::optional<PipelineConfig> preset(const std::string& name) {
  PipelineConfig c;
  if (name == "tsukuba") {
    c.k = 10, c.block = 7, c.peek_window = 5, c.d_max = 15, c.gt_scale = 16;
  } else if (name == "sawtooth") {
    c.k = 12, c.block = 9, c.peek_window = 5, c.d_max = 19, c.gt_scale = 8;
  } else if (name == "venus") {
    c.k = 10, c.block = 9, c.peek_window = 5, c.d_max = 19, c.gt_scale = 8;
  } else {
    return std::nullopt;
  }
  return c;
}

inline const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"tsukuba", "sawtooth", "venus"};
  return names;
}

/// A failure inside one pipeline stage.
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::string& what)
      : std::runtime_error("[" + stage + "] " + what), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

struct StageTiming {
  std::string stage;
  double milliseconds = 0.0;
};

enum class Method { proposed, dense_sad, dense_ncc };

inline const char* to_string(Method m) {
  switch (m) {
    case Method::proposed: return "proposed";
    case Method::dense_sad: return "dense-sad";
    case Method::dense_ncc: return "dense-ncc";
  }
  return "?";
}

struct PipelineResult {
  Method method = Method::proposed;
  DisparityMap disparity;

  // Intermediates; boundary/segmentation members stay empty for baselines.
  LightnessMap left_lightness;
  LightnessMap right_lightness;
  Histogram histogram;
  ClusterModel clusters;
  LabelMap labels;
  BinaryMap boundary_raw;
  BinaryMap boundary_filled;
  BinaryMap boundary_removed;
  BinaryMap boundary_pruned;
  DisparityMap sparse;
  DisparityMap propagated;

  std::optional<EvalReport> eval;
  std::optional<SparsityReport> sparsity;
  std::vector<StageTiming> timings;
};

namespace detail {

class StageRunner {
 public:
  explicit StageRunner(std::vector<StageTiming>& timings) : timings_(timings) {}

  template <typename F>
  auto operator()(const char* stage, F&& f) {
    const auto start = std::chrono::steady_clock::now();
    try {
      if constexpr (std::is_void_v<decltype(f())>) {
        f();
        record(stage, start);
      } else {
        auto out = f();
        record(stage, start);
        return out;
      }
    } catch (const StageError&) {
      throw;
    } catch (const std::exception& e) {
      throw StageError(stage, e.what());
    }
  }

 private:
  void record(const char* stage, std::chrono::steady_clock::time_point start) {
    const std::chrono::duration<double, std::milli> dt = std::chrono::steady_clock::now() - start;
    timings_.push_back({stage, dt.count()});
  }
  std::vector<StageTiming>& timings_;
};

inline void check_inputs(const RgbImage& left, const RgbImage& right,
                         const std::optional<DisparityMap>& truth) {
  if (!left.same_shape(right)) {
    throw StageError("input", "left and right images differ in size");
  }
  if (truth && !truth->same_shape(left)) {
    throw StageError("input", "ground truth size differs from the input images");
  }
}

}  // namespace detail

inline PipelineResult run_pipeline(const RgbImage& left, const RgbImage& right,
                                   const std::optional<DisparityMap>& truth,
                                   const PipelineConfig& cfg) {
  try {
    cfg.validate();
  } catch (const std::exception& e) {
    throw StageError("config", e.what());
  }
  detail::check_inputs(left, right, truth);

  PipelineResult res;
  res.method = Method::proposed;
  detail::StageRunner stage(res.timings);

  stage("lightness", [&] {
    res.left_lightness = rgb_to_lightness(left);
    res.right_lightness = rgb_to_lightness(right);
  });
  stage("segmentation", [&] {
    res.histogram = build_histogram(res.left_lightness, cfg.n_bins);
    res.clusters = kmeans_histogram(res.histogram, cfg.k, cfg.kmeans);
    res.labels = assign_labels(res.left_lightness, res.histogram, res.clusters);
  });
  stage("boundary", [&] {
    res.boundary_raw = detect_boundaries(res.labels);
    res.boundary_filled = morph_fill(res.boundary_raw);
    res.boundary_removed = morph_remove(res.boundary_filled);
    res.boundary_pruned = prune_components(res.boundary_removed, cfg.prune_fraction);
  });
  stage("matching", [&] {
    res.sparse = match_sparse(res.left_lightness, res.right_lightness, res.boundary_pruned,
                              cfg.match());
  });
  stage("propagation", [&] { res.propagated = propagate_rows(res.sparse); });
  stage("peek", [&] { res.disparity = peek_fill(res.propagated, cfg.peek()); });
  stage("evaluation", [&] {
    res.sparsity = sparsity_stats(res.boundary_raw, res.boundary_pruned);
    if (truth) res.eval = bad_pixel_rate(res.disparity, *truth, cfg.eval, to_string(res.method));
  });
  return res;
}

/// Lightness conversion followed by a dense SAD or NCC search.
inline PipelineResult run_baseline(const RgbImage& left, const RgbImage& right,
                                   const std::optional<DisparityMap>& truth,
                                   const PipelineConfig& cfg, Method which) {
  if (which == Method::proposed) {
    throw std::invalid_argument("run_baseline expects dense-sad or dense-ncc");
  }
  try {
    cfg.validate();
  } catch (const std::exception& e) {
    throw StageError("config", e.what());
  }
  detail::check_inputs(left, right, truth);

  PipelineResult res;
  res.method = which;
  detail::StageRunner stage(res.timings);
  stage("lightness", [&] {
    res.left_lightness = rgb_to_lightness(left);
    res.right_lightness = rgb_to_lightness(right);
  });
  stage("matching", [&] {
    res.disparity = which == Method::dense_sad
                        ? match_dense_sad(res.left_lightness, res.right_lightness, cfg.match())
                        : match_dense_ncc(res.left_lightness, res.right_lightness, cfg.match());
  });
  if (truth) {
    stage("evaluation", [&] {
      res.eval = bad_pixel_rate(res.disparity, *truth, cfg.eval, to_string(res.method));
    });
  }
  return res;
}

}  // namespace sparsedisp
