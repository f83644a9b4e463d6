#include "fetch.hpp"

#include <curl/curl.h>

#include <cstdio>
#include <memory>
#include <stdexcept>
#include <system_error>

#include "sparsedisp/imageio.hpp"

namespace sparsedisp::tools {

namespace fs = std::filesystem;

const std::vector<DatasetFile>& middlebury2001_inventory() {
  static const std::vector<DatasetFile> files{
      {"tsukuba/scene1.row3.col3.ppm", true},
      {"tsukuba/scene1.row3.col4.ppm", true},
      {"tsukuba/truedisp.row3.col3.pgm", false},
      {"sawtooth/im2.ppm", true},
      {"sawtooth/im6.ppm", true},
      {"sawtooth/disp2.pgm", false},
      {"venus/im2.ppm", true},
      {"venus/im6.ppm", true},
      {"venus/disp2.pgm", false},
  };
  return files;
}

DatasetPair middlebury2001_pair(const std::string& name) {
  if (name == "tsukuba") {
    return {"tsukuba/scene1.row3.col3.ppm", "tsukuba/scene1.row3.col4.ppm",
            "tsukuba/truedisp.row3.col3.pgm"};
  }
  if (name == "sawtooth" || name == "venus") {
    return {name + "/im2.ppm", name + "/im6.ppm", name + "/disp2.pgm"};
  }
  throw std::invalid_argument("unknown dataset pair '" + name + "'");
}

namespace {

struct CurlGlobal {
  CurlGlobal() { curl_global_init(CURL_GLOBAL_DEFAULT); }
  ~CurlGlobal() { curl_global_cleanup(); }
};

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};

std::size_t write_to_file(char* data, std::size_t size, std::size_t n, void* user) {
  return std::fwrite(data, size, n, static_cast<std::FILE*>(user)) * size;
}

void download(const std::string& url, const fs::path& target) {
  static CurlGlobal global;
  std::unique_ptr<CURL, decltype(&curl_easy_cleanup)> curl(curl_easy_init(), curl_easy_cleanup);
  if (!curl) throw std::runtime_error("curl initialization failed");
  std::unique_ptr<std::FILE, FileCloser> out(std::fopen(target.c_str(), "wb"));
  if (!out) throw std::runtime_error("cannot create " + target.string());

  char errbuf[CURL_ERROR_SIZE] = {};
  curl_easy_setopt(curl.get(), CURLOPT_URL, url.c_str());
  curl_easy_setopt(curl.get(), CURLOPT_FOLLOWLOCATION, 1L);
  curl_easy_setopt(curl.get(), CURLOPT_FAILONERROR, 1L);
  curl_easy_setopt(curl.get(), CURLOPT_CONNECTTIMEOUT, 20L);
  curl_easy_setopt(curl.get(), CURLOPT_LOW_SPEED_LIMIT, 1L);
  curl_easy_setopt(curl.get(), CURLOPT_LOW_SPEED_TIME, 60L);
  curl_easy_setopt(curl.get(), CURLOPT_WRITEFUNCTION, write_to_file);
  curl_easy_setopt(curl.get(), CURLOPT_WRITEDATA, out.get());
  curl_easy_setopt(curl.get(), CURLOPT_ERRORBUFFER, errbuf);
  const CURLcode rc = curl_easy_perform(curl.get());
  if (std::fclose(out.release()) != 0) throw std::runtime_error("write error on " + target.string());
  if (rc != CURLE_OK) {
    throw std::runtime_error(url + ": " + (errbuf[0] ? errbuf : curl_easy_strerror(rc)));
  }
}

void verify(const fs::path& path, bool color) {
  if (color) {
    (void)read_ppm(path);
  } else {
    (void)read_pgm(path);
  }
}

bool present_and_valid(const fs::path& path, bool color) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) return false;
  try {
    verify(path, color);
    return true;
  } catch (const std::exception&) {
    return false;
  }
}

}  // namespace

FetchSummary fetch_dataset(const fs::path& dest, const std::string& base_url, std::ostream& log) {
  std::string base = base_url;
  while (!base.empty() && base.back() == '/') base.pop_back();
  FetchSummary summary;
  for (const auto& file : middlebury2001_inventory()) {
    const fs::path target = dest / file.relative_path;
    if (present_and_valid(target, file.color)) {
      ++summary.skipped;
      log << "present  " << file.relative_path << "\n";
      continue;
    }
    fs::create_directories(target.parent_path());
    fs::path part = target;
    part += ".part";
    try {
      download(base + "/" + file.relative_path, part);
      verify(part, file.color);
      fs::rename(part, target);
    } catch (const std::exception& e) {
      std::error_code ec;
      fs::remove(part, ec);
      throw std::runtime_error("fetch " + file.relative_path + ": " + e.what());
    }
    ++summary.downloaded;
    log << "fetched  " << file.relative_path << "\n";
  }
  return summary;
}

}  // namespace sparsedisp::tools
