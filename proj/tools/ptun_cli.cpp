// Command-line runner: ptun <spectrum|diffraction|resonance|baseline|convergence> [options]
//
// Configuration precedence (later wins): built-in defaults, --preset,
// --config file, individual flags. Exit codes: 0 success, 2 configuration
// error, 3 a result did not converge (outputs are still written), 1 any other
// failure.

#include <chrono>
#include <ctime>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "ptun/experiment.hpp"
#include "ptun/kernels.hpp"

namespace {

namespace ex = ptun::experiment;

constexpr int kExitConfig = 2;
constexpr int kExitUnconverged = 3;

struct Flags {
  std::optional<std::string> preset;
  std::optional<std::string> config;
  std::optional<double> up;
  std::optional<double> up_ratio;
  std::optional<double> e0;
  std::optional<double> sigma;
  std::optional<double> lambda;
  std::optional<std::string> transit;
  std::optional<std::string> mode;
  std::optional<std::string> out;
  std::optional<int> threads;
  std::optional<int> points;
};

void add_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--preset", f.preset, "Named parameter set: fig2, fig3 or fig4");
  cmd->add_option("--config", f.config, "JSON configuration file (or a metadata sidecar of an earlier run)");
  cmd->add_option("--up", f.up, "Peak ponderomotive energy U_p in eV");
  cmd->add_option("--up-ratio", f.up_ratio, "Peak ponderomotive energy in photon units, u_p = U_p / hbar omega");
  cmd->add_option("--e0", f.e0, "Initial electron energy in eV");
  cmd->add_option("--sigma", f.sigma, "Beam width in micrometres");
  cmd->add_option("--lambda", f.lambda, "Laser wavelength in micrometres");
  cmd->add_option("--transit", f.transit, "Interaction time: formula, paper or a value in seconds");
  cmd->add_option("--mode", f.mode, "Spectral treatment: onshell or band");
  cmd->add_option("--out", f.out, "Output directory");
  cmd->add_option("--threads", f.threads, "Worker threads (default: hardware concurrency)");
}

ex::ExperimentConfig resolve(const Flags& f) {
  ex::ExperimentConfig c = f.preset ? ex::preset(*f.preset) : ex::defaults();
  if (f.config) c = ex::load_file(*f.config, c);
  if (f.up && f.up_ratio) throw ex::ConfigError("give only one of --up and --up-ratio");
  if (f.up) {
    c.up_ev = *f.up;
    c.up_ratio.reset();
  }
  if (f.up_ratio) {
    c.up_ratio = *f.up_ratio;
    c.up_ev.reset();
  }
  if (f.e0) c.e0_ev = *f.e0;
  if (f.sigma) c.sigma_um = *f.sigma;
  if (f.lambda) c.wavelength_um = *f.lambda;
  if (f.transit) c.transit = ex::parse_transit(*f.transit);
  if (f.mode) c.mode = ex::parse_mode(*f.mode);
  if (f.out) c.out_dir = *f.out;
  if (f.threads) c.threads = *f.threads;
  if (f.points) c.resonance.steps = *f.points;
  ex::validate(c);
  return c;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ponderomotive tunnelling rates of electrons crossing a standing-wave laser focus"};
  app.require_subcommand(1);
  Flags flags;
  for (const char* name : {"spectrum", "diffraction", "resonance", "baseline", "convergence"}) {
    CLI::App* cmd = app.add_subcommand(name);
    add_flags(cmd, flags);
    if (std::string(name) == "resonance") cmd->add_option("--points", flags.points, "Number of sweep points");
  }
  app.get_subcommand("spectrum")->description("Rate per exit channel j'' at one operating point");
  app.get_subcommand("diffraction")->description("Rates by exchanged photon momentum, closed channels included");
  app.get_subcommand("resonance")->description("Total rate versus u_p");
  app.get_subcommand("baseline")->description("Static-barrier transmission and classical deflection");
  app.get_subcommand("convergence")->description("Stability of every rate under doubled numerical settings");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    const ex::Command command = ex::parse_command(name);
    const ex::ExperimentConfig config = resolve(flags);
    const auto start = std::chrono::steady_clock::now();
    ex::RunOutput out = ex::run(command, config);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    ex::json meta;
    meta["command"] = name;
    ex::json resolved = ex::to_json(config);
    resolved["threads"] = ex::resolved_threads(config);
    meta["config"] = resolved;
    meta["converged"] = out.converged;
    meta["kernel"] = std::string(ptun::kernels::isa_name(ptun::kernels::active_isa()));
    meta["wall_time_s"] = wall;
    meta["timestamp_utc"] = utc_timestamp();
    for (auto& [key, value] : out.metadata.items()) meta[key] = value;
    out.metadata = std::move(meta);
    ex::write_outputs(out, config.out_dir, name);

    std::cerr << name << ": wrote " << out.files.size() << " table(s) and " << name << ".json to " << config.out_dir
              << " in " << wall << " s" << (out.converged ? "" : " (NOT CONVERGED)") << '\n';
    return out.converged ? 0 : kExitUnconverged;
  } catch (const ex::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
