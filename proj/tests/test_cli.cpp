#include <doctest.h>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "gnsspred/cli.hpp"
#include "gnsspred/config.hpp"
#include "gnsspred/ingest.hpp"
#include "test_support.hpp"

using namespace gnsspred;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::size_t data_rows(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) n += !line.empty();
  return n - 1;
}

std::string roster_specs(std::size_t n, std::size_t length) {
  RosterOptions r;
  r.stations = n;
  r.length = length;
  return format_synth_specs(synthetic_roster(r));
}

const char* kStationFile =
    "ABCD 15JAN01 2015.0014 4000000.10 900000.20 4800000.30\n"
    "ABCD 15JAN02 2015.0041 4000000.11 900000.21 4800000.31\n";

const char* kFastModels =
    "mlp.epochs = 100\n"
    "bnn.epochs = 100\n"
    "bnn.ensemble_size = 2\n";

}  // namespace

TEST_CASE("usage errors exit 2") {
  CHECK(cli({}).code == kExitUsage);
  CHECK(cli({"frobnicate"}).code == kExitUsage);
  CHECK(cli({"run", "--no-such-flag"}).code == kExitUsage);
  CHECK(cli({"run", "--m", "many", "x.ini"}).code == kExitUsage);
  CHECK(cli({"run"}).code == kExitUsage);
  CHECK(cli({"synth"}).code == kExitUsage);
  CHECK(cli({"fetch"}).code == kExitUsage);
  const auto help = cli({"--help"});
  CHECK(help.code == kExitOk);
  CHECK(help.out.find("run") != std::string::npos);
  CHECK(cli({"--version"}).out.find('.') != std::string::npos);
}

TEST_CASE("fetch subcommand") {
  testing::TempDir dir("clifetch");
  testing::FileServer server(std::map<std::string, std::string>{{"/data/ABCD.txyz2", kStationFile}});
  const auto cache = (dir / "cache").string();

  atomic_write(dir / "one.txt", "ABCD\n");
  atomic_write(dir / "two.txt", "ABCD\nNOPE\n");
  atomic_write(dir / "empty.txt", "# nothing\n");

  SUBCASE("empty manifest is a usage error") {
    CHECK(cli({"fetch", "--manifest", (dir / "empty.txt").string()}).code == kExitUsage);
  }
  SUBCASE("download then offline cache hit") {
    auto r = cli({"fetch", "--manifest", (dir / "one.txt").string(), "--base-url", server.base_url(),
                  "--cache-dir", cache});
    CHECK(r.code == kExitOk);
    r = cli({"fetch", "--manifest", (dir / "one.txt").string(), "--base-url", testing::kUnroutableUrl,
             "--cache-dir", cache, "--offline"});
    CHECK(r.code == kExitOk);
    CHECK(r.out.find("ABCD") != std::string::npos);
  }
  SUBCASE("one 404 fails and names the station") {
    const auto r = cli({"fetch", "--manifest", (dir / "two.txt").string(), "--base-url",
                        server.base_url(), "--cache-dir", cache});
    CHECK(r.code == kExitFailure);
    CHECK(r.err.find("NOPE") != std::string::npos);
    CHECK(r.err.find("StationNotFound") != std::string::npos);
    CHECK(std::filesystem::exists(dir / "cache" / "ABCD.txyz2"));
  }
  SUBCASE("offline never touches the network") {
    const auto start = std::chrono::steady_clock::now();
    const auto r = cli({"fetch", "--manifest", (dir / "one.txt").string(), "--base-url",
                        testing::kUnroutableUrl, "--cache-dir", cache, "--offline"});
    CHECK(r.code == kExitFailure);
    CHECK(r.err.find("CacheMissOffline") != std::string::npos);
    CHECK(std::chrono::steady_clock::now() - start < std::chrono::seconds(2));
    CHECK(server.hits() == 0);
  }
  SUBCASE("cache directory from the environment") {
    atomic_write(dir / "envcache" / "ABCD.txyz2", kStationFile);
    ::setenv(kCacheDirEnv, (dir / "envcache").c_str(), 1);
    const auto r = cli({"fetch", "--manifest", (dir / "one.txt").string(), "--offline"});
    ::unsetenv(kCacheDirEnv);
    CHECK(r.code == kExitOk);
  }
}

TEST_CASE("synth subcommand") {
  testing::TempDir dir("clisynth");
  atomic_write(dir / "fourteen.ini", roster_specs(14, 40));
  atomic_write(dir / "none.ini", "# no stations\n");
  atomic_write(dir / "bad.ini", "[ABCD]\nlength = 1\n");

  auto r = cli({"synth", (dir / "fourteen.ini").string(), "--out", (dir / "a").string()});
  CHECK(r.code == kExitOk);
  std::size_t files = 0;
  for (auto& e : std::filesystem::directory_iterator(dir / "a")) files += e.path().extension() == ".txyz2";
  CHECK(files == 14);
  CHECK(std::filesystem::exists(dir / "a" / "manifest.txt"));

  CHECK(cli({"synth", "--spec", (dir / "fourteen.ini").string(), "--out", (dir / "b").string()}).code ==
        kExitOk);
  for (auto& e : std::filesystem::directory_iterator(dir / "a")) {
    CHECK(read_text_file(e.path()) == read_text_file(dir / "b" / e.path().filename()));
  }
  const auto parsed = read_station_file(dir / "a" / "S003.txyz2");
  CHECK(parsed.series.length() == 40);

  CHECK(cli({"synth", (dir / "none.ini").string(), "--out", (dir / "c").string()}).code == kExitUsage);
  r = cli({"synth", (dir / "bad.ini").string(), "--out", (dir / "c").string()});
  CHECK(r.code == kExitFailure);
  CHECK(r.err.find("InvalidSpec") != std::string::npos);
  CHECK(cli({"synth", (dir / "missing.ini").string()}).code == kExitFailure);
}

TEST_CASE("run and report subcommands") {
  testing::TempDir dir("clirun");
  atomic_write(dir / "specs.ini", roster_specs(2, 150));
  atomic_write(dir / "run.ini", std::string("synth_specs = specs.ini\nm = 100\nhorizon = 20\n") +
                                    "output_dir = out\n" + kFastModels);

  auto r = cli({"run", "--config", (dir / "run.ini").string(), "--threads", "1"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("first rmse ranking") != std::string::npos);
  CHECK(r.out.find("second rmse ranking") != std::string::npos);
  for (const char* f : {"first_mase.csv", "first_mae.csv", "first_rmse.csv", "second_mase.csv",
                        "second_mae.csv", "second_rmse.csv"}) {
    CHECK(data_rows(dir / "out" / f) == 7);
  }

  SUBCASE("positional config and overrides") {
    r = cli({"run", (dir / "run.ini").string(), "--methods", "GP", "--out", (dir / "gp").string(),
             "--seed", "5", "--m", "90", "--horizon", "10"});
    CHECK(r.code == kExitOk);
    CHECK(data_rows(dir / "gp" / "first_rmse.csv") == 1);
    CHECK(read_text_file(dir / "gp" / "second_mae.csv").find("GP,") != std::string::npos);
    const auto json = read_text_file(dir / "gp" / "report.json");
    CHECK(json.find("\"seed\": 5") != std::string::npos);
    CHECK(json.find("\"m\": 90") != std::string::npos);
  }
  SUBCASE("m + horizon too large names the station") {
    r = cli({"run", (dir / "run.ini").string(), "--m", "140", "--horizon", "20"});
    CHECK(r.code == kExitFailure);
    CHECK(r.err.find("S000") != std::string::npos);
    CHECK(r.err.find("S001") != std::string::npos);
  }
  SUBCASE("config errors") {
    atomic_write(dir / "broken.ini", "m = lots\n");
    CHECK(cli({"run", (dir / "broken.ini").string()}).code == kExitFailure);
    CHECK(cli({"run", (dir / "nonexistent.ini").string()}).code == kExitFailure);
    CHECK(cli({"run", (dir / "run.ini").string(), "--methods", "RBF"}).code == kExitFailure);
    CHECK(cli({"run", (dir / "run.ini").string(), "--config", (dir / "run.ini").string()}).code ==
          kExitUsage);
  }
  SUBCASE("report rebuilds tables from report.json") {
    r = cli({"report", (dir / "out").string(), "--out", (dir / "again").string()});
    CHECK(r.code == kExitOk);
    CHECK(r.out.find("first rmse ranking") != std::string::npos);
    CHECK(read_text_file(dir / "again" / "first_rmse.csv") == read_text_file(dir / "out" / "first_rmse.csv"));
    CHECK(cli({"report", (dir / "nothing").string()}).code == kExitFailure);
  }
}
