#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "ptun/experiment.hpp"

using namespace ptun;
namespace ex = ptun::experiment;

namespace {

/// A configuration cheap enough for unit tests.
ex::ExperimentConfig small(double up_ev) {
  ex::ExperimentConfig c = ex::defaults();
  c.up_ev = up_ev;
  c.mode = SpectralMode::onshell;
  c.policy.margin_1 = 4;
  c.policy.margin_2 = 4;
  c.policy.auto_double = false;
  c.threads = 1;
  return c;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("defaults describe the zero-field operating point") {
  const auto c = ex::defaults();
  CHECK(c.up_ev.has_value());
  CHECK_FALSE(c.up_ratio.has_value());
  CHECK(*c.up_ev == 0.0);
  CHECK(c.e0_ev == 0.54);
  CHECK(c.wavelength_um == 1.064);
  CHECK(c.sigma_um == 6.0);
  CHECK_NOTHROW(ex::validate(c));
}

TEST_CASE("presets") {
  CHECK(*ex::preset("fig2").up_ev == 2.9);
  CHECK(*ex::preset("fig3").up_ev == 2.9);
  const auto f4 = ex::preset("fig4");
  CHECK_FALSE(f4.up_ev.has_value());
  CHECK(f4.resonance.up_min == 0.5);
  CHECK(f4.resonance.up_max == 4.5);
  CHECK(f4.resonance.steps >= 81);
  CHECK(f4.mode == SpectralMode::onshell);
  CHECK_THROWS_AS(ex::preset("fig9"), ex::ConfigError);
}

TEST_CASE("configuration round-trips through JSON") {
  ex::ExperimentConfig c = ex::preset("fig2");
  c.e0_ev = 0.61;
  c.transit = TransitTime::explicit_value(3.5e-11);
  c.mode = SpectralMode::onshell;
  c.threads = 3;
  c.baseline.energies_ev = {0.1, 0.2};
  c.resonance.steps = 21;
  const auto j = ex::to_json(c);
  const auto back = ex::from_json(j);
  CHECK(ex::to_json(back) == j);
  CHECK(back.transit.mode == TransitTime::Mode::explicit_seconds);
  CHECK(back.transit.seconds == 3.5e-11);
  // Through text as well: doubles are printed with round-trip precision.
  CHECK(ex::to_json(ex::from_json(ex::json::parse(j.dump()))) == j);

  ex::ExperimentConfig r = ex::preset("fig4");
  CHECK(ex::to_json(ex::from_json(ex::to_json(r))) == ex::to_json(r));
}

TEST_CASE("configuration errors") {
  using ex::json;
  CHECK_THROWS_AS(ex::from_json(json{{"laser", {{"up_ev", 1.0}, {"up_ratio", 1.0}}}}), ex::ConfigError);
  CHECK_THROWS_AS(ex::from_json(json{{"lazer", json::object()}}), ex::ConfigError);
  CHECK_THROWS_AS(ex::from_json(json{{"laser", {{"colour", 1}}}}), ex::ConfigError);
  CHECK_THROWS_AS(ex::from_json(json{{"electron", {{"e0_ev", "fast"}}}}), ex::ConfigError);
  CHECK_THROWS_AS(ex::from_json(json{{"mode", "sideways"}}), ex::ConfigError);
  CHECK_THROWS_AS(ex::from_json(json{{"transit", "sometimes"}}), ex::ConfigError);
  CHECK_THROWS_AS(ex::parse_transit("-1e-11"), ex::ConfigError);
  CHECK_THROWS_AS(ex::parse_transit("1e-11s"), ex::ConfigError);
  CHECK(ex::parse_transit("2e-11").seconds == 2e-11);
  CHECK(ex::parse_transit("paper").mode == TransitTime::Mode::paper);

  ex::ExperimentConfig both = ex::defaults();
  both.up_ratio = 1.0;
  CHECK_THROWS_AS(ex::validate(both), ex::ConfigError);
  ex::ExperimentConfig none = ex::defaults();
  none.up_ev.reset();
  CHECK_THROWS_AS(ex::validate(none), ex::ConfigError);
  ex::ExperimentConfig bad = ex::defaults();
  bad.e0_ev = -1.0;
  CHECK_THROWS_AS(ex::validate(bad), ex::ConfigError);
  bad = ex::defaults();
  bad.band_points = 4;
  CHECK_THROWS_AS(ex::validate(bad), ex::ConfigError);
  CHECK_THROWS_AS(ex::parse_command("plot"), ex::ConfigError);
  CHECK(ex::command_name(ex::parse_command("resonance")) == "resonance");
}

TEST_CASE("a later u_p replaces an earlier U_p") {
  using ex::json;
  const auto c = ex::from_json(json{{"laser", {{"up_ratio", 2.0}}}}, ex::preset("fig2"));
  CHECK_FALSE(c.up_ev.has_value());
  CHECK(*c.up_ratio == 2.0);
  CHECK(ex::operating_point(c).laser.up_ratio() == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("numbers are printed with 17 significant digits") {
  CHECK(ex::format_number(1.0) == "1.0000000000000000e+00");
  CHECK(ex::format_number(-0.1) == "-1.0000000000000001e-01");
  CHECK(ex::format_number(0.0) == "0.0000000000000000e+00");
  for (double v : {1.0 / 3.0, 6.02214076e23, -1.602176634e-19, 4.9406564584124654e-324}) {
    CHECK(std::strtod(ex::format_number(v).c_str(), nullptr) == v);
  }
}

TEST_CASE("local maxima") {
  CHECK(ex::local_maxima({1, 3, 2, 4, 5, 1}) == std::vector<std::size_t>{1, 4});
  CHECK(ex::local_maxima({1, 2, 3}).empty());
  CHECK(ex::local_maxima({}).empty());
  // A plateau counts once, at its first point.
  CHECK(ex::local_maxima({0, 2, 2, 0}) == std::vector<std::size_t>{1});
}

TEST_CASE("config file and metadata sidecar both load") {
  const auto dir = std::filesystem::temp_directory_path() / "ptun_test_experiment";
  std::filesystem::create_directories(dir);
  ex::ExperimentConfig c = small(0.3);
  c.out_dir = dir.string();
  {
    std::ofstream f(dir / "cfg.json");
    f << ex::to_json(c).dump(2);
  }
  CHECK(ex::to_json(ex::load_file((dir / "cfg.json").string())) == ex::to_json(c));
  {
    ex::json meta;
    meta["command"] = "spectrum";
    meta["config"] = ex::to_json(c);
    std::ofstream f(dir / "meta.json");
    f << meta.dump(2);
  }
  CHECK(ex::to_json(ex::load_file((dir / "meta.json").string())) == ex::to_json(c));
  CHECK_THROWS_AS(ex::load_file((dir / "missing.json").string()), ex::ConfigError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("spectrum run writes a deterministic table") {
  const auto dir = std::filesystem::temp_directory_path() / "ptun_test_spectrum";
  ex::ExperimentConfig c = small(0.3);
  const auto a = ex::run_spectrum(c);
  c.threads = 2;
  const auto b = ex::run_spectrum(c);
  REQUIRE(a.files.size() == 1);
  CHECK(a.files[0].first == "spectrum.csv");
  CHECK(a.files[0].second == b.files[0].second);
  CHECK(a.files[0].second.rfind("j_pp,final_energy_eV,", 0) == 0);
  CHECK(a.metadata["diagnostics"]["entry_channels"].get<int>() >= 1);

  ex::write_outputs(a, dir.string(), "spectrum");
  CHECK(read_file(dir / "spectrum.csv") == a.files[0].second);
  CHECK(ex::json::parse(read_file(dir / "spectrum.json")) == a.metadata);
  std::filesystem::remove_all(dir);
}

TEST_CASE("diffraction run lists closed channels") {
  const auto out = ex::run_diffraction(small(0.3));
  REQUIRE(out.files.size() == 1);
  const std::string& csv = out.files[0].second;
  CHECK(csv.rfind("j_pp,p_zf,rate_per_s,open\n", 0) == 0);
  // E_0 = 0.54 eV cannot emit a photon of 1.17 eV: j_pp = -1 is closed.
  CHECK(csv.find("\n-1,") != std::string::npos);
  CHECK(csv.find(",0\n") != std::string::npos);
  CHECK(out.metadata["diagnostics"].contains("negative_to_positive_rate_ratio"));
}

TEST_CASE("resonance run reports maxima and finiteness") {
  ex::ExperimentConfig c = small(0.0);
  c.up_ev.reset();
  c.up_ratio = 0.5;
  c.resonance.up_min = 0.2;
  c.resonance.up_max = 0.4;
  c.resonance.steps = 3;
  const auto out = ex::run_resonance(c);
  const auto& d = out.metadata["diagnostics"];
  CHECK(d["points"].get<int>() == 3);
  CHECK(d["all_finite"].get<bool>());
  CHECK(out.files[0].second.rfind("u_p,total_rate,", 0) == 0);
}
