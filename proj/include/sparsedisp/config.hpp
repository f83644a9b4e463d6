#pragma once

// Flat `key = value` configuration files. Keys use the command-line flag
// spelling without the leading dashes (e.g. `peek-window = 5`); `#` starts a
// comment. Unknown keys and malformed values are errors.

#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>

#include "sparsedisp/pipeline.hpp"

namespace sparsedisp {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto* ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
  T v{};
  const auto* end = text.data() + text.size();
  auto [p, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || p != end) {
    throw ConfigError("invalid value '" + std::string(text) + "' for " + std::string(key));
  }
  return v;
}

}  // namespace detail

using ConfigEntries = std::map<std::string, std::string>;

inline ConfigEntries parse_config_text(std::string_view text, const std::string& source = "config") {
  ConfigEntries out;
  int line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(source + ":" + std::to_string(line_no) + ": expected key=value");
    }
    auto key = detail::trim(line.substr(0, eq));
    auto value = detail::trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(source + ":" + std::to_string(line_no) + ": empty key");
    out[std::string(key)] = std::string(value);
  }
  return out;
}

inline ConfigEntries read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_config_text(text, path.string());
}

/// Applies one setting by its flag name.
inline void apply_setting(PipelineConfig& cfg, std::string_view key, std::string_view value) {
  using detail::parse_number;
  if (key == "k") cfg.k = parse_number<int>(key, value);
  else if (key == "block") cfg.block = parse_number<int>(key, value);
  else if (key == "peek-window") cfg.peek_window = parse_number<int>(key, value);
  else if (key == "d-max") cfg.d_max = parse_number<int>(key, value);
  else if (key == "n-bins") cfg.n_bins = parse_number<int>(key, value);
  else if (key == "prune-fraction") cfg.prune_fraction = parse_number<double>(key, value);
  else if (key == "gt-scale") cfg.gt_scale = parse_number<int>(key, value);
  else if (key == "delta") cfg.eval.delta_d = parse_number<double>(key, value);
  else if (key == "border") cfg.eval.border = parse_number<int>(key, value);
  else throw ConfigError("unknown setting '" + std::string(key) + "'");
}

inline void apply_settings(PipelineConfig& cfg, const ConfigEntries& entries) {
  for (const auto& [k, v] : entries) apply_setting(cfg, k, v);
}

}  // namespace sparsedisp
