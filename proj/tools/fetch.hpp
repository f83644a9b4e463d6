#pragma once

#include <filesystem>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

namespace sparsedisp::tools {

struct DatasetFile {
  std::string relative_path;  // "<pair>/<file>", also appended to the base URL
  bool color = false;         // PPM when true, PGM otherwise
};

/// Left image, right image and ground truth for each of the three pairs.
const std::vector<DatasetFile>& middlebury2001_inventory();

/// Paths, relative to the dataset root, of one stereo pair.
struct DatasetPair {
  std::string left;
  std::string right;
  std::string truth;
};

/// Throws std::invalid_argument for names other than tsukuba, sawtooth, venus.
DatasetPair middlebury2001_pair(const std::string& name);

inline constexpr const char* kDefaultDatasetUrl =
    "https://vision.middlebury.edu/stereo/data/scenes2001/data";

struct FetchSummary {
  int downloaded = 0;
  int skipped = 0;
};

/// Downloads every missing inventory file under `dest`, verifying each by
/// decoding it. Files that already exist and decode are skipped. Throws on
/// the first failure after removing the partially written file.
FetchSummary fetch_dataset(const std::filesystem::path& dest, const std::string& base_url,
                           std::ostream& log);

}  // namespace sparsedisp::tools
