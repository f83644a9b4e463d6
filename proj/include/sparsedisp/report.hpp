#pragma once

// Flat run reports: every effective parameter plus the evaluation and
// sparsity statistics, as one JSON object or as `name = value` lines.
// Wall-clock timings are deliberately absent so that reports of identical
// runs are byte-identical.

#include <algorithm>
#include <optional>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "sparsedisp/pipeline.hpp"

namespace sparsedisp {

using FlatReport = nlohmann::ordered_json;

inline void add_parameters(FlatReport& r, const PipelineConfig& cfg, Method method) {
  r["block"] = cfg.block;
  r["d_max"] = cfg.d_max;
  r["gt_scale"] = cfg.gt_scale;
  r["delta_d"] = cfg.eval.delta_d;
  r["border"] = cfg.eval.border;
  if (method == Method::proposed) {
    r["k"] = cfg.k;
    r["peek_window"] = cfg.peek_window;
    r["n_bins"] = cfg.n_bins;
    r["prune_fraction"] = cfg.prune_fraction;
    r["kmeans_max_iter"] = cfg.kmeans.max_iter;
    r["kmeans_tol"] = cfg.kmeans.tol;
    r["kmeans_init"] = "evenly-spaced-over-occupied-range";
    r["peek_update"] = "in-place-raster";
    r["peek_tie_rule"] = "smallest-disparity";
  }
  r["colorspace"] = "sRGB-D65-CIELAB-L";
  r["window_padding"] = "clamp-to-edge";
  r["eval_mask"] = "truth>0";
}

inline FlatReport make_report(const PipelineResult& res, const PipelineConfig& cfg,
                              const std::string& dataset = {}) {
  FlatReport r = FlatReport::object();
  r["method"] = to_string(res.method);
  if (!dataset.empty()) {
    r["dataset"] = dataset;
    r["dataset_version"] = "middlebury-2001-native-resolution";
  }
  r["width"] = res.disparity.width();
  r["height"] = res.disparity.height();
  add_parameters(r, cfg, res.method);
  if (res.eval) {
    r["bad_percent"] = res.eval->bad_percent;
    r["n_evaluated"] = res.eval->n_evaluated;
    r["n_bad"] = res.eval->n_bad;
  }
  if (res.method == Method::proposed) {
    r["kmeans_iterations"] = res.clusters.iterations;
  }
  if (res.sparsity) {
    const auto& s = *res.sparsity;
    r["raw_boundary_count"] = s.raw_boundary_count;
    r["refined_boundary_count"] = s.refined_boundary_count;
    r["computed_pixel_count"] = s.computed_pixel_count;
    r["refined_fraction_of_image"] = s.refined_fraction_of_image;
    r["computed_fraction_of_image"] = s.computed_fraction_of_image;
    r["reduction_percent"] = s.reduction_percent;
  }
  return r;
}

inline FlatReport make_eval_report(const EvalReport& rep, const EvalConfig& cfg) {
  FlatReport r = FlatReport::object();
  r["method"] = rep.method_name.empty() ? "eval" : rep.method_name;
  r["delta_d"] = cfg.delta_d;
  r["border"] = cfg.border;
  r["eval_mask"] = "truth>0";
  r["bad_percent"] = rep.bad_percent;
  r["n_evaluated"] = rep.n_evaluated;
  r["n_bad"] = rep.n_bad;
  return r;
}

inline std::string to_json_text(const FlatReport& r) { return r.dump(2) + "\n"; }

/// One `name = value` line per entry, names padded to a common width.
inline std::string to_plain_text(const FlatReport& r) {
  std::size_t width = 0;
  for (const auto& [key, _] : r.items()) width = std::max(width, key.size());
  std::ostringstream out;
  for (const auto& [key, value] : r.items()) {
    out << key << std::string(width - key.size(), ' ') << " = "
        << (value.is_string() ? value.get<std::string>() : value.dump()) << "\n";
  }
  return out.str();
}

}  // namespace sparsedisp
