#include <gtest/gtest.h>

#include <atomic>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <thread>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include "cli.hpp"
#include "fetch.hpp"
#include "httplib.h"
#include "nlohmann/json.hpp"
#include "sparsedisp/imageio.hpp"
#include "test_support.hpp"

namespace sparsedisp::tools {
namespace {

namespace fs = std::filesystem;
using sparsedisp::testing::TempDir;

struct CliRun {
  int code = 0;
  std::string out, err;
};

CliRun cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  CliRun r;
  r.code = run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// A small textured pair with a known shift and matching ground truth.
struct Fixture {
  TempDir dir{"cli"};
  fs::path left = dir.path() / "left.ppm";
  fs::path right = dir.path() / "right.ppm";
  fs::path gt = dir.path() / "gt.pgm";

  Fixture() {
    std::mt19937 rng(97);
    const auto l = testing::textured_image(rng, 64, 40);
    write_ppm(left, l);
    write_ppm(right, testing::shifted_right_image(rng, l, 3));
    write_pgm(gt, encode_disparity(DisparityMap(64, 40, 3), 16));
  }
};

TEST(Cli, RunWritesDisparityAndReports) {
  Fixture f;
  const auto out = f.dir.path() / "out";
  const auto r = cli({"run", "--preset", "tsukuba", "--k", "5", "--left", f.left.string(),
                      "--right", f.right.string(), "--gt", f.gt.string(), "--out", out.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(out / "disparity.pgm"));
  const auto report = nlohmann::json::parse(slurp(out / "report.json"));
  EXPECT_TRUE(report.contains("bad_percent"));
  EXPECT_EQ(report["k"], 5);      // flag overrides preset
  EXPECT_EQ(report["block"], 7);  // preset value kept
  EXPECT_NE(slurp(out / "report.txt").find("bad_percent"), std::string::npos);
  const auto disp = read_pgm(out / "disparity.pgm");
  EXPECT_EQ(disp.width(), 64);
}

TEST(Cli, MissingLeftIsUsageError) {
  const auto r = cli({"run", "--right", "r.ppm", "--out", "o"});
  EXPECT_NE(r.code, 0);
  EXPECT_EQ(r.code, kExitUsage);
}

TEST(Cli, InvalidCombinationsAreUsageErrors) {
  Fixture f;
  const auto out = (f.dir.path() / "o").string();
  EXPECT_EQ(cli({"run", "--left", f.left.string(), "--right", f.right.string(), "--out", out,
                 "--block", "4"})
                .code,
            kExitUsage);
  EXPECT_EQ(cli({"run", "--left", f.left.string(), "--right", f.right.string(), "--out", out,
                 "--preset", "nowhere"})
                .code,
            kExitUsage);
  EXPECT_EQ(cli({"run", "--left", f.left.string(), "--right", f.right.string(), "--out", out,
                 "--d-max", "30", "--gt-scale", "16"})
                .code,
            kExitUsage);
  EXPECT_EQ(cli({"baseline", "--method", "census", "--left", f.left.string(), "--right",
                 f.right.string(), "--out", out})
                .code,
            kExitUsage);
}

TEST(Cli, MissingInputReportsStage) {
  TempDir dir("cli_missing");
  const auto r = cli({"run", "--left", (dir.path() / "nope.ppm").string(), "--right",
                      (dir.path() / "nope.ppm").string(), "--out", (dir.path() / "o").string()});
  EXPECT_EQ(r.code, kExitFailure);
  EXPECT_NE(r.err.find("[read-left]"), std::string::npos) << r.err;
}

TEST(Cli, DumpIntermediatesWritesEveryStage) {
  Fixture f;
  const auto out = f.dir.path() / "dump";
  const auto r = cli({"run", "--k", "5", "--block", "5", "--d-max", "8", "--left",
                      f.left.string(), "--right", f.right.string(), "--out", out.string(),
                      "--dump-intermediates"});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* name : {"01_left_lightness.pgm", "02_right_lightness.pgm", "03_labels.pgm",
                           "04_boundary_raw.pgm", "05_boundary_filled.pgm",
                           "06_boundary_removed.pgm", "07_boundary_pruned.pgm",
                           "08_sparse_disparity.pgm", "09_propagated_disparity.pgm",
                           "disparity.pgm"}) {
    ASSERT_TRUE(fs::exists(out / name)) << name;
    EXPECT_EQ(read_pgm(out / name).width(), 64);
  }
  // Labels spread over the full gray range; boundaries are strictly binary.
  const auto labels = read_pgm(out / "03_labels.pgm");
  EXPECT_EQ(*std::max_element(labels.samples.begin(), labels.samples.end()), 255);
  for (auto v : read_pgm(out / "04_boundary_raw.pgm").samples) EXPECT_TRUE(v == 0 || v == 255);
}

TEST(Cli, ConfigFileIsOverriddenByFlags) {
  Fixture f;
  const auto cfg = f.dir.path() / "settings.cfg";
  std::ofstream(cfg) << "k = 4\nblock = 5\n";
  const auto out = f.dir.path() / "cfgout";
  const auto r = cli({"run", "--config", cfg.string(), "--block", "3", "--left", f.left.string(),
                      "--right", f.right.string(), "--out", out.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto report = nlohmann::json::parse(slurp(out / "report.json"));
  EXPECT_EQ(report["k"], 4);
  EXPECT_EQ(report["block"], 3);
}

TEST(Cli, BaselineRuns) {
  Fixture f;
  for (const char* method : {"sad", "ncc"}) {
    const auto out = f.dir.path() / method;
    const auto r = cli({"baseline", "--method", method, "--block", "5", "--d-max", "8", "--left",
                        f.left.string(), "--right", f.right.string(), "--gt", f.gt.string(),
                        "--out", out.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto report = nlohmann::json::parse(slurp(out / "report.json"));
    EXPECT_EQ(report["method"], std::string("dense-") + method);
    EXPECT_LT(report["bad_percent"].get<double>(), 20.0);
  }
}

TEST(Cli, EvalScoresFiles) {
  TempDir dir("cli_eval");
  DisparityMap truth(10, 10, 5);
  auto computed = truth;
  computed(3, 3) = 8;
  write_pgm(dir.path() / "t.pgm", encode_disparity(truth, 16));
  write_pgm(dir.path() / "c.pgm", encode_disparity(computed, 16));
  auto r = cli({"eval", "--computed", (dir.path() / "c.pgm").string(), "--gt",
                (dir.path() / "t.pgm").string(), "--gt-scale", "16"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("bad_percent = 1.0\n"), std::string::npos) << r.out;
  r = cli({"eval", "--computed", (dir.path() / "t.pgm").string(), "--gt",
           (dir.path() / "t.pgm").string()});
  EXPECT_NE(r.out.find("bad_percent = 0"), std::string::npos) << r.out;
  write_pgm(dir.path() / "small.pgm", encode_disparity(DisparityMap(4, 4, 1), 16));
  r = cli({"eval", "--computed", (dir.path() / "small.pgm").string(), "--gt",
           (dir.path() / "t.pgm").string()});
  EXPECT_EQ(r.code, kExitFailure);
}

/// Serves the dataset inventory from memory over HTTP on localhost.
class DatasetServer {
 public:
  explicit DatasetServer(bool corrupt_one = false) {
    for (const auto& f : middlebury2001_inventory()) {
      files_["/data/" + f.relative_path] =
          f.color ? encode_ppm(RgbImage(4, 3, Rgb{10, 20, 30}))
                  : encode_pgm(GrayImage{Grid<std::uint16_t>(4, 3, 32), 255});
    }
    if (corrupt_one) files_["/data/sawtooth/im6.ppm"] = "P6\n4 3\n255\nshort";
    server_.Get(R"(/data/.*)", [this](const httplib::Request& req, httplib::Response& res) {
      ++requests_;
      auto it = files_.find(req.path);
      if (it == files_.end()) {
        res.status = 404;
        return;
      }
      res.set_content(it->second, "application/octet-stream");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~DatasetServer() {
    server_.stop();
    thread_.join();
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/data"; }
  int requests() const { return requests_; }

 private:
  httplib::Server server_;
  std::map<std::string, std::string> files_;
  std::atomic<int> requests_{0};
  int port_ = 0;
  std::thread thread_;
};

TEST(FetchDataset, DownloadsVerifiesAndIsIdempotent) {
  DatasetServer server;
  TempDir dest("fetch");
  auto r = cli({"fetch-dataset", "--dest", dest.path().string(), "--url", server.url()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(server.requests(), 9);
  int files = 0;
  for (const auto& f : middlebury2001_inventory()) {
    const auto p = dest.path() / f.relative_path;
    ASSERT_TRUE(fs::exists(p)) << p;
    if (f.color) {
      EXPECT_NO_THROW(read_ppm(p));
    } else {
      EXPECT_NO_THROW(read_pgm(p));
    }
    ++files;
  }
  EXPECT_EQ(files, 9);
  r = cli({"fetch-dataset", "--dest", dest.path().string(), "--url", server.url()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(server.requests(), 9);
  EXPECT_NE(r.out.find("downloaded=0 skipped=9"), std::string::npos);
}

TEST(FetchDataset, UnreachableUrlFailsAndLeavesNoPartials) {
  TempDir dest("fetch_down");
  // Bind an ephemeral port and close it without listening.
  const int sock = ::socket(AF_INET, SOCK_STREAM, 0);
  ASSERT_GE(sock, 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  ASSERT_EQ(::bind(sock, reinterpret_cast<sockaddr*>(&addr), sizeof addr), 0);
  socklen_t len = sizeof addr;
  ASSERT_EQ(::getsockname(sock, reinterpret_cast<sockaddr*>(&addr), &len), 0);
  const int port = ntohs(addr.sin_port);
  ::close(sock);
  const auto r = cli({"fetch-dataset", "--dest", dest.path().string(), "--url",
                      "http://127.0.0.1:" + std::to_string(port) + "/data"});
  EXPECT_NE(r.code, 0);
  for (const auto& e : fs::recursive_directory_iterator(dest.path())) {
    EXPECT_FALSE(e.is_regular_file()) << e.path();
  }
}

TEST(FetchDataset, UndecodableDownloadIsRejected) {
  DatasetServer server(true);
  TempDir dest("fetch_bad");
  const auto r = cli({"fetch-dataset", "--dest", dest.path().string(), "--url", server.url()});
  EXPECT_EQ(r.code, kExitFailure);
  EXPECT_NE(r.err.find("sawtooth/im6.ppm"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(dest.path() / "sawtooth/im6.ppm"));
  EXPECT_FALSE(fs::exists(dest.path() / "sawtooth/im6.ppm.part"));
  EXPECT_TRUE(fs::exists(dest.path() / "sawtooth/im2.ppm"));
}

}  // namespace
}  // namespace sparsedisp::tools
