#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code{-1};
  std::string out;  // stdout and stderr
};

Outcome run(const std::string& args) {
  const std::string cmd = std::string(MARINETRACK_BIN) + " " + args + " 2>&1";
  Outcome o;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe);
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) o.out.append(buf.data(), n);
  const int status = ::pclose(pipe);
  o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return o;
}

fs::path workdir() {
  static const fs::path p = [] {
    const fs::path d = fs::temp_directory_path() / ("marinetrack_cli_" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return p;
}

fs::path write_file(const std::string& name, const std::string& text) {
  const fs::path p = workdir() / name;
  std::ofstream(p, std::ios::binary) << text;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

const char* kShort = R"({"scenario": {"category": "Linear3", "course_length": 60, "seed": 3},
  "noise": {"pixel_sigma": 2.0, "dropout_prob": 0.05}})";

const char* kQuiet = R"({"scenario": {"category": "Linear3", "course_length": 60}})";

}  // namespace

TEST_CASE("noiseless run reports sub-millimetre error") {
  const fs::path out = workdir() / "noiseless";
  const Outcome o = run("run --config " + std::string(CONFIG_DIR) + "/linear3_noiseless.json --out " + out.string());
  INFO(o.out);
  REQUIRE(o.code == 0);
  const auto report = nlohmann::json::parse(slurp(out / "report.json"));
  CHECK(report["mean_error_m"].get<double>() < 1e-3);
  CHECK(report["id_switches"]["total"].get<long>() == 0);
}

TEST_CASE("same config and seed give byte-identical CSVs") {
  const fs::path cfg = write_file("short.json", kShort);
  const fs::path a = workdir() / "a", b = workdir() / "b";
  REQUIRE(run("run --config " + cfg.string() + " --out " + a.string()).code == 0);
  REQUIRE(run("run --config " + cfg.string() + " --out " + b.string()).code == 0);
  for (const char* f : {"truth.csv", "estimates.csv", "fused.csv"}) {
    INFO(f);
    CHECK(!slurp(a / f).empty());
    CHECK(slurp(a / f) == slurp(b / f));
  }
  const fs::path c = workdir() / "c";
  REQUIRE(run("run --config " + cfg.string() + " --seed 4 --out " + c.string()).code == 0);
  CHECK(slurp(a / "estimates.csv") != slurp(c / "estimates.csv"));
  const auto manifest = nlohmann::json::parse(slurp(c / "manifest.json"));
  CHECK(manifest["seed"] == 4);
}

TEST_CASE("malformed config exits 1 and names the field") {
  const fs::path bad = write_file("bad.json", R"({"scenario": {"n_drones": "three"}})");
  const Outcome o = run("run --config " + bad.string() + " --out " + (workdir() / "bad").string());
  CHECK(o.code == 1);
  CHECK(o.out.find("scenario.n_drones") != std::string::npos);

  const fs::path unknown = write_file("unknown.json", R"({"tracker": {"dmax": 3}})");
  const Outcome u = run("run --config " + unknown.string() + " --out " + (workdir() / "bad2").string());
  CHECK(u.code == 1);
  CHECK(u.out.find("tracker.dmax") != std::string::npos);

  const Outcome missing = run("run --config " + (workdir() / "nope.json").string() + " --out x");
  CHECK(missing.code == 1);
}

TEST_CASE("usage errors exit 1") {
  CHECK(run("").code == 1);
  CHECK(run("run --out somewhere").code == 1);
  CHECK(run("frobnicate").code == 1);
  CHECK(run("--help").code == 0);
}

TEST_CASE("existing outputs need --force") {
  const fs::path cfg = write_file("quiet.json", kQuiet);
  const fs::path out = workdir() / "force";
  REQUIRE(run("run --config " + cfg.string() + " --out " + out.string()).code == 0);
  const Outcome again = run("run --config " + cfg.string() + " --out " + out.string());
  CHECK(again.code == 1);
  CHECK(again.out.find("--force") != std::string::npos);
  CHECK(run("run --config " + cfg.string() + " --out " + out.string() + " --force").code == 0);
}

TEST_CASE("compare-matchers prints the fixed table") {
  const fs::path cfg = write_file("quiet_cmp.json", kQuiet);
  const Outcome o = run("compare-matchers --config " + cfg.string() + " --out " + (workdir() / "cmp").string());
  INFO(o.out);
  REQUIRE(o.code == 0);
  CHECK(o.out.rfind("matcher,switches_per_500m,mean_error_m\niou,0.000000,", 0) == 0);
  CHECK(o.out.find("\nhybrid,0.000000,") != std::string::npos);
  CHECK(fs::exists(workdir() / "cmp" / "compare.csv"));
}

TEST_CASE("sweep-drones prints rows from three drones down") {
  const fs::path cfg = write_file("quiet_sweep.json", kQuiet);
  const Outcome o = run("sweep-drones --seeds 1 --config " + cfg.string() + " --out " + (workdir() / "sweep").string());
  INFO(o.out);
  REQUIRE(o.code == 0);
  const auto l1 = o.out.find("\n3,");
  const auto l2 = o.out.find("\n2,");
  const auto l3 = o.out.find("\n1,");
  CHECK(o.out.rfind("n_drones,mean_error_m,std_error_m,seeds\n", 0) == 0);
  CHECK(l1 < l2);
  CHECK(l2 < l3);
  CHECK(l3 != std::string::npos);
}

TEST_CASE("eval scores two CSV files") {
  const fs::path cfg = write_file("quiet_eval.json", kQuiet);
  const fs::path out = workdir() / "for_eval";
  REQUIRE(run("run --config " + cfg.string() + " --out " + out.string()).code == 0);
  const Outcome o = run("eval --estimated " + (out / "fused.csv").string() + " --truth " + (out / "truth.csv").string());
  INFO(o.out);
  REQUIRE(o.code == 0);
  const auto j = nlohmann::json::parse(o.out);
  CHECK(j["mean_error_m"].get<double>() < 1e-3);

  const fs::path junk = write_file("junk.csv", "a,b\n1,2\n");
  CHECK(run("eval --estimated " + junk.string() + " --truth " + (out / "truth.csv").string()).code == 1);
}
