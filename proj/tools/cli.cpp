#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "fetch.hpp"
#include "sparsedisp/config.hpp"
#include "sparsedisp/imageio.hpp"
#include "sparsedisp/pipeline.hpp"
#include "sparsedisp/report.hpp"

namespace sparsedisp::tools {

namespace fs = std::filesystem;

namespace {

/// Error raised for inconsistent flag combinations detected after parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Tags an exception with the stage that raised it.
struct TaggedError : std::runtime_error {
  TaggedError(const std::string& stage, const std::string& what)
      : std::runtime_error("[" + stage + "] " + what) {}
};

template <typename F>
auto tagged(const std::string& stage, F&& f) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw TaggedError(stage, e.what());
  }
}

GrayImage render_lightness(const LightnessMap& m) {
  GrayImage g{Grid<std::uint16_t>(m.width(), m.height()), 255};
  std::transform(m.begin(), m.end(), g.samples.begin(), [](double l) {
    return static_cast<std::uint16_t>(std::lround(std::clamp(l, 0.0, 100.0) * 2.55));
  });
  return g;
}

GrayImage render_labels(const LabelMap& m, int k) {
  GrayImage g{Grid<std::uint16_t>(m.width(), m.height()), 255};
  std::transform(m.begin(), m.end(), g.samples.begin(), [k](int i) {
    return static_cast<std::uint16_t>(k <= 1 ? 0 : std::lround(255.0 * i / (k - 1)));
  });
  return g;
}

GrayImage render_binary(const BinaryMap& m) {
  GrayImage g{Grid<std::uint16_t>(m.width(), m.height()), 255};
  std::transform(m.begin(), m.end(), g.samples.begin(),
                 [](std::uint8_t b) { return static_cast<std::uint16_t>(b ? 255 : 0); });
  return g;
}

/// Unknown cells render black.
GrayImage render_sparse(const DisparityMap& m, int scale) {
  GrayImage g{Grid<std::uint16_t>(m.width(), m.height()), 255};
  std::transform(m.begin(), m.end(), g.samples.begin(), [scale](int d) {
    return static_cast<std::uint16_t>(d < 0 ? 0 : std::min(255, d * scale));
  });
  return g;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot create " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write error on " + path.string());
}

/// Flags shared by `run` and `baseline`.
struct RunFlags {
  std::string left, right, gt, out, preset, config;
  bool dump = false;
  std::string method;
  std::map<std::string, std::string> overrides;
};

void add_tuning_flags(CLI::App* cmd, std::map<std::string, std::string>& overrides) {
  const std::pair<const char*, const char*> knobs[] = {
      {"k", "number of K-Means clusters"},
      {"block", "SAD/NCC block size (odd)"},
      {"peek-window", "neighbor window for the peek stage (odd)"},
      {"d-max", "maximum disparity searched"},
      {"n-bins", "lightness histogram bins"},
      {"prune-fraction", "boundary pixel budget for component pruning"},
      {"gt-scale", "ground-truth / output disparity scale"},
      {"delta", "bad-pixel tolerance in disparity units"},
      {"border", "pixels excluded along each edge during evaluation"},
  };
  for (auto [name, help] : knobs) {
    cmd->add_option(std::string("--") + name, overrides[name], help);
  }
}

PipelineConfig resolve_config(const std::string& preset_name, const std::string& config_path,
                              std::map<std::string, std::string> overrides,
                              const CLI::App& cmd, bool writes_disparity = true) {
  PipelineConfig cfg;
  if (!preset_name.empty()) {
    auto p = preset(preset_name);
    if (!p) throw UsageError("unknown preset '" + preset_name + "' (tsukuba|sawtooth|venus)");
    cfg = *p;
  }
  if (!config_path.empty()) {
    apply_settings(cfg, tagged("config", [&] { return read_config_file(config_path); }));
  }
  for (const auto& [name, value] : overrides) {
    if (cmd.count("--" + name) > 0) {
      try {
        apply_setting(cfg, name, value);
      } catch (const ConfigError& e) {
        throw UsageError(e.what());
      }
    }
  }
  try {
    cfg.validate();
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
  if (writes_disparity && static_cast<long long>(cfg.d_max) * cfg.gt_scale > 255) {
    throw UsageError("d-max x gt-scale must not exceed 255 (8-bit disparity output)");
  }
  return cfg;
}

int do_run(const RunFlags& f, const CLI::App& cmd, std::ostream& out, bool baseline) {
  const PipelineConfig cfg = resolve_config(f.preset, f.config, f.overrides, cmd);
  Method method = Method::proposed;
  if (baseline) {
    if (f.method == "sad") method = Method::dense_sad;
    else if (f.method == "ncc") method = Method::dense_ncc;
    else throw UsageError("--method must be sad or ncc");
  }
  if (baseline && f.dump) throw UsageError("--dump-intermediates applies to run only");

  const auto left = tagged("read-left", [&] { return read_ppm(f.left); });
  const auto right = tagged("read-right", [&] { return read_ppm(f.right); });
  std::optional<DisparityMap> truth;
  if (!f.gt.empty()) {
    truth = tagged("read-gt", [&] { return decode_ground_truth(read_pgm(f.gt), cfg.gt_scale); });
  }

  const PipelineResult res = method == Method::proposed
                                 ? run_pipeline(left, right, truth, cfg)
                                 : run_baseline(left, right, truth, cfg, method);

  const fs::path dir = f.out;
  tagged("write-output", [&] {
    fs::create_directories(dir);
    write_pgm(dir / "disparity.pgm", encode_disparity(res.disparity, cfg.gt_scale));
    const auto report = make_report(res, cfg, f.preset);
    write_text(dir / "report.json", to_json_text(report));
    write_text(dir / "report.txt", to_plain_text(report));
    std::string timings;
    for (const auto& t : res.timings) {
      timings += t.stage + " = " + std::to_string(t.milliseconds) + " ms\n";
    }
    write_text(dir / "timings.txt", timings);
    if (f.dump) {
      write_pgm(dir / "01_left_lightness.pgm", render_lightness(res.left_lightness));
      write_pgm(dir / "02_right_lightness.pgm", render_lightness(res.right_lightness));
      write_pgm(dir / "03_labels.pgm", render_labels(res.labels, cfg.k));
      write_pgm(dir / "04_boundary_raw.pgm", render_binary(res.boundary_raw));
      write_pgm(dir / "05_boundary_filled.pgm", render_binary(res.boundary_filled));
      write_pgm(dir / "06_boundary_removed.pgm", render_binary(res.boundary_removed));
      write_pgm(dir / "07_boundary_pruned.pgm", render_binary(res.boundary_pruned));
      write_pgm(dir / "08_sparse_disparity.pgm", render_sparse(res.sparse, cfg.gt_scale));
      write_pgm(dir / "09_propagated_disparity.pgm", render_sparse(res.propagated, cfg.gt_scale));
    }
    return 0;
  });

  out << to_plain_text(make_report(res, cfg, f.preset));
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sparse-boundary stereo disparity estimation", "sparsedisp"};
  app.require_subcommand(1);

  RunFlags run_flags;
  auto* run = app.add_subcommand("run", "segment, match boundaries, reconstruct, evaluate");
  RunFlags base_flags;
  auto* base = app.add_subcommand("baseline", "dense SAD or NCC block matching");
  for (auto [cmd, f] : {std::pair{run, &run_flags}, std::pair{base, &base_flags}}) {
    cmd->add_option("--left", f->left, "left image (PPM)")->required();
    cmd->add_option("--right", f->right, "right image (PPM)")->required();
    cmd->add_option("--out", f->out, "output directory")->required();
    cmd->add_option("--gt", f->gt, "ground-truth disparity (PGM)");
    cmd->add_option("--preset", f->preset, "tsukuba | sawtooth | venus");
    cmd->add_option("--config", f->config, "key = value settings file");
    add_tuning_flags(cmd, f->overrides);
  }
  run->add_flag("--dump-intermediates", run_flags.dump, "write one PGM per pipeline stage");
  base->add_option("--method", base_flags.method, "sad | ncc")
      ->required()
      ->check(CLI::IsMember({"sad", "ncc"}));

  std::string eval_computed, eval_gt, eval_preset, eval_out;
  std::optional<int> eval_scale;
  std::map<std::string, std::string> eval_overrides;
  auto* ev = app.add_subcommand("eval", "bad-pixel percentage of a disparity PGM");
  ev->add_option("--computed", eval_computed, "computed disparity (PGM)")->required();
  ev->add_option("--gt", eval_gt, "ground-truth disparity (PGM)")->required();
  ev->add_option("--computed-scale", eval_scale, "scale of the computed PGM (default: gt-scale)");
  ev->add_option("--preset", eval_preset, "tsukuba | sawtooth | venus");
  ev->add_option("--out", eval_out, "also write report.json and report.txt here");
  for (const char* name : {"gt-scale", "delta", "border"}) {
    ev->add_option(std::string("--") + name, eval_overrides[name]);
  }

  std::string fetch_dest, fetch_url = kDefaultDatasetUrl;
  auto* fetch = app.add_subcommand("fetch-dataset", "download the Middlebury 2001 pairs");
  fetch->add_option("--dest", fetch_dest, "destination directory")->required();
  fetch->add_option("--url", fetch_url, "base URL of the dataset mirror");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*run) return do_run(run_flags, *run, out, false);
    if (*base) return do_run(base_flags, *base, out, true);
    if (*ev) {
      PipelineConfig cfg = resolve_config(eval_preset, "", eval_overrides, *ev, false);
      const int computed_scale = eval_scale.value_or(cfg.gt_scale);
      if (computed_scale < 1) throw UsageError("--computed-scale must be >= 1");
      const auto computed = tagged("read-computed", [&] {
        return decode_ground_truth(read_pgm(eval_computed), computed_scale);
      });
      const auto truth =
          tagged("read-gt", [&] { return decode_ground_truth(read_pgm(eval_gt), cfg.gt_scale); });
      const auto rep =
          tagged("evaluation", [&] { return bad_pixel_rate(computed, truth, cfg.eval, "eval"); });
      const auto report = make_eval_report(rep, cfg.eval);
      if (!eval_out.empty()) {
        tagged("write-output", [&] {
          fs::create_directories(eval_out);
          write_text(fs::path(eval_out) / "report.json", to_json_text(report));
          write_text(fs::path(eval_out) / "report.txt", to_plain_text(report));
          return 0;
        });
      }
      out << to_plain_text(report);
      return kExitOk;
    }
    if (*fetch) {
      const auto summary =
          tagged("fetch-dataset", [&] { return fetch_dataset(fetch_dest, fetch_url, out); });
      out << "downloaded=" << summary.downloaded << " skipped=" << summary.skipped << "\n";
      return kExitOk;
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace sparsedisp::tools
