#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <nlohmann/json.hpp>

#include "eprenorm/config.hpp"
#include "eprenorm/output.hpp"
#include "eprenorm/units.hpp"

using namespace eprenorm;

namespace {

struct Run {
  int status;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(EPRENORM_CLI) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  std::array<char, 4096> buf{};
  while (std::size_t n = std::fread(buf.data(), 1, buf.size(), pipe)) out.append(buf.data(), n);
  const int raw = pclose(pipe);
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, out};
}

std::string data(const std::string& name) { return std::string(EPRENORM_TEST_DATA) + "/" + name; }

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "eprenorm_cli_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("config parsing") {
  const cli::Config c = cli::load_config(data("with_drive.yaml"));
  CHECK(c.system.omega_m() == doctest::Approx(units::hz_to_angular(1e6)));
  REQUIRE(c.drive.has_value());
  CHECK(c.drive->g() == doctest::Approx(units::hz_to_angular(48.75e3)));

  SUBCASE("g_c cannot be set, with line context") {
    try {
      cli::load_config(data("gc_key.yaml"));
      FAIL("expected ConfigError");
    } catch (const cli::ConfigError& e) {
      CHECK(std::string(e.what()).find("gc_key.yaml:8:") != std::string::npos);
    }
  }
  SUBCASE("unknown keys and bad values") {
    CHECK_THROWS_AS(cli::parse_config("mechanics: {freq_hz: 1e6, gamma_hz: 5e3, q: 1}\ncavity: {kappa_hz: 2e5}\nbath: {cutoff_hz: 1e6}\n", "x"),
                    cli::ConfigError);
    CHECK_THROWS_AS(cli::parse_config("mechanics: {freq_hz: -1, gamma_hz: 5e3}\ncavity: {kappa_hz: 2e5}\nbath: {cutoff_hz: 1e6}\n", "x"),
                    cli::ConfigError);
    CHECK_THROWS_AS(cli::parse_config("mechanics: {freq_hz: abc, gamma_hz: 5e3}\ncavity: {kappa_hz: 2e5}\nbath: {cutoff_hz: 1e6}\n", "x"),
                    cli::ConfigError);
    CHECK_THROWS_AS(cli::parse_config("mechanics: {freq_hz: 1e6}\ncavity: {kappa_hz: 2e5}\nbath: {cutoff_hz: 1e6}\n", "x"),
                    cli::ConfigError);
    CHECK_THROWS_AS(cli::parse_config("[1, 2]", "x"), cli::ConfigError);
  }
  SUBCASE("shipped default equals the built-in parameters") {
    const cli::Config d = cli::load_config(EPRENORM_DEFAULT_CONFIG);
    const cli::Config b = cli::default_config();
    CHECK(d.system.omega_m() == b.system.omega_m());
    CHECK(d.system.kappa() == b.system.kappa());
    CHECK(d.system.gamma() == b.system.gamma());
    CHECK(d.system.omega_c() == b.system.omega_c());
  }
}

TEST_CASE("number formatting is fixed at 12 significant digits") {
  CHECK(cli::format_number(1.0 / 3.0) == "0.333333333333");
  CHECK(cli::format_number(-998685.0325947269) == "-998685.032595");
  CHECK(cli::format_number(0.0) == "0");
  CHECK(cli::format_number(std::nan("")) == "nan");
}

TEST_CASE("ep subcommand") {
  const Run r = run("ep --json");
  REQUIRE(r.status == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["markovian"]["g_khz"].get<double>() == doctest::Approx(48.75).epsilon(1e-12));
  CHECK(j["exact"]["g_khz"].get<double>() == doctest::Approx(49.37501085439698).epsilon(1e-9));
  CHECK(j["exact"]["delta_khz"].get<double>() == doctest::Approx(-998.6850325947269).epsilon(1e-9));
  CHECK(j["certificate"]["passed"].get<bool>());

  const Run text = run("ep");
  CHECK(text.out.find("49.37501085") != std::string::npos);
  CHECK(text.out.find("-998.6850326") != std::string::npos);

  const Run bad = run("--config " + data("kappa_le_gamma.yaml") + " ep");
  CHECK(bad.status == 2);
  CHECK(bad.out.find("NoMarkovianEp") != std::string::npos);

  const Run flat = run("--config " + data("gamma_zero.yaml") + " ep --json");
  REQUIRE(flat.status == 0);
  const auto f = nlohmann::json::parse(flat.out);
  CHECK(f["exact"]["g_khz"].get<double>() == doctest::Approx(f["markovian"]["g_khz"].get<double>()).epsilon(1e-10));
  CHECK(f["exact"]["delta_khz"].get<double>() == doctest::Approx(f["markovian"]["delta_khz"].get<double>()).epsilon(1e-10));
}

TEST_CASE("validation errors exit with status 1") {
  CHECK(run("--config " + data("gc_key.yaml") + " ep").status == 1);
  CHECK(run("--config /nonexistent.yaml ep").status == 1);
  CHECK(run("eigs --g-min 60 --g-max 40").status == 1);
  CHECK(run("eigs --delta-mode sideways").status == 1);
  CHECK(run("frobnicate").status == 1);
  CHECK(run("embedcheck --dt-divisor 10").out.find("use dt <=") != std::string::npos);
  CHECK(run("embedcheck --dt-divisor 10").status == 1);
  CHECK(run("spectrum --at config").status == 1);
}

TEST_CASE("eigs writes a two-row file for a two-point grid") {
  const auto out = scratch("two.csv");
  REQUIRE(run("eigs --g-points 2 --out " + out.string()).status == 0);
  std::ifstream in(out);
  int data_rows = 0;
  bool header = false;
  for (std::string line; std::getline(in, line);) {
    if (line.rfind("#", 0) == 0) continue;
    if (!header) {
      CHECK(line.rfind("g_khz,re_l1,re_l2,re_l3,im_l1,im_l2,im_l3", 0) == 0);
      header = true;
      continue;
    }
    ++data_rows;
  }
  CHECK(data_rows == 2);
  CHECK(std::filesystem::exists(out.string() + ".manifest.json"));
  CHECK(slurp(out).find("# output: two.csv.manifest.json") != std::string::npos);
}

TEST_CASE("data files are byte-identical across runs and thread counts") {
  const auto a = scratch("a.csv");
  const auto b = scratch("b.csv");
  REQUIRE(run("petermann --both-calibrations --json --quiet --out " + a.string()).status == 0);
  REQUIRE(run("petermann --both-calibrations --json --quiet --out " + b.string()).status == 0);
  // The file names differ, so compare everything after the output lines.
  const auto strip = [](const std::string& s) {
    std::string r;
    std::istringstream in(s);
    for (std::string line; std::getline(in, line);) {
      if (line.rfind("# output:", 0) != 0) r += line + "\n";
    }
    return r;
  };
  CHECK(strip(slurp(a)) == strip(slurp(b)));
  CHECK(nlohmann::json::parse(slurp(a.string() + ".json"))["rows"] == nlohmann::json::parse(slurp(b.string() + ".json"))["rows"]);

  const auto c = scratch("c.csv");
  REQUIRE(run("spectrum --quiet --out " + c.string()).status == 0);
  const std::string first = slurp(c);
  REQUIRE(std::system(("EPRENORM_THREADS=3 " + std::string(EPRENORM_CLI) + " spectrum --quiet --out " + c.string()).c_str()) == 0);
  CHECK(slurp(c) == first);
  CHECK(run("spectrum --quiet --out " + c.string()).status == 0);
  CHECK(slurp(c) == first);
  CHECK(std::system(("EPRENORM_THREADS=zero " + std::string(EPRENORM_CLI) + " ep >/dev/null 2>&1").c_str()) != 0);
}

TEST_CASE("petermann queries") {
  const Run at = run("petermann --at-ep --json --quiet");
  REQUIRE(at.status == 0);
  const auto j = nlohmann::json::parse(at.out);
  REQUIRE(j["rows"].size() == 1);
  const auto& row = j["rows"][0];
  CHECK(row[6].get<int>() == 1);
  CHECK(row[7].get<int>() == 1);
  CHECK(row[8].get<int>() == 0);
  CHECK(row[5].get<double>() == doctest::Approx(1.0025).epsilon(0.0005));

  const auto weak = nlohmann::json::parse(run("petermann --g-min 5 --g-max 5 --g-points 1 --json --quiet").out);
  for (int k = 3; k <= 5; ++k) CHECK(weak["rows"][0][k].get<double>() < 2.0);

  const auto fine = nlohmann::json::parse(run("petermann --g-min 49.37 --g-max 49.38 --g-points 1001 --json --quiet").out);
  CHECK(fine["summary"]["exact"]["max_k_pm"].get<double>() >= 1e6);
  const auto gray = nlohmann::json::parse(run("petermann --delta-mode markovian --json --quiet").out);
  CHECK(gray["summary"]["markovian"]["max_k_pm"].get<double>() < 1e3);
}

TEST_CASE("spectrum summary and markovian-only output") {
  const auto j = nlohmann::json::parse(run("spectrum --json --quiet").out);
  CHECK(std::abs(j["summary"]["dip_markovian"]["r_sq_min"].get<double>() - 0.65) < 0.01);
  CHECK(std::abs(j["summary"]["dip_nonmarkovian"]["r_sq_min"].get<double>() - 0.81) < 0.01);
  CHECK(j["summary"]["cooperativity"]["ratio"].get<double>() == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(j["rows"].size() == 4001);

  const auto m = nlohmann::json::parse(run("spectrum --markovian-only --omega-points 11 --json --quiet").out);
  CHECK(m["columns"].size() == 2);
  CHECK(m["rows"].size() == 11);

  const Run cfg = run("--config " + data("with_drive.yaml") + " spectrum --at config --omega-points 5 --quiet");
  CHECK(cfg.status == 0);
  CHECK(cfg.out.find("# drive: detuning_hz=-1000000 coupling_hz=48750") != std::string::npos);
}

TEST_CASE("embedcheck default passes") {
  const Run r = run("embedcheck --json");
  REQUIRE(r.status == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["max_rel_err"].get<double>() < 1e-6);
  CHECK(j["order"].get<double>() == doctest::Approx(4.0).epsilon(0.1));
  CHECK(j["passed"].get<bool>());
}
