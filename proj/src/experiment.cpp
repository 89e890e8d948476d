#include "ptun/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <thread>

#include "ptun/baselines.hpp"
#include "ptun/units.hpp"

namespace ptun::experiment {

namespace {

constexpr double kMicron = 1e-6;
// Stability threshold of the convergence study (relative change of a rate).
constexpr double kStabilityTolerance = 1e-4;

void require_keys(const json& j, std::string_view where, std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) throw ConfigError(std::string(where) + " must be an object");
  for (const auto& [key, value] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw ConfigError("unknown key '" + key + "' in " + std::string(where));
  }
}

template <typename T>
void read(const json& j, const char* key, T& out, std::string_view where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string(where) + "." + key + " has the wrong type");
  }
}

double read_double(const json& j, const char* key, std::string_view where) {
  double v = 0.0;
  read(j, key, v, where);
  return v;
}

TransitTime parse_transit_json(const json& j) {
  if (j.is_string()) return parse_transit(j.get<std::string>());
  if (j.is_number()) return TransitTime::explicit_value(j.get<double>());
  throw ConfigError("transit must be \"formula\", \"paper\" or a number of seconds");
}

json transit_json(const TransitTime& t) {
  switch (t.mode) {
    case TransitTime::Mode::formula:
      return "formula";
    case TransitTime::Mode::paper:
      return "paper";
    case TransitTime::Mode::explicit_seconds:
      return t.seconds;
  }
  return "formula";
}

std::string mode_name(SpectralMode m) { return m == SpectralMode::band ? "band" : "onshell"; }

std::string join_lines(const std::vector<std::string>& rows) {
  std::string out;
  for (const auto& r : rows) {
    out += r;
    out += '\n';
  }
  return out;
}

std::string csv_row(std::initializer_list<std::string> cells) {
  std::string out;
  bool first = true;
  for (const auto& c : cells) {
    if (!first) out += ',';
    out += c;
    first = false;
  }
  return out;
}

std::string int_cell(long v) { return std::to_string(v); }

json spectrum_diagnostics(const SpectrumResult& s, const OperatingPoint& op) {
  json d;
  d["photon_energy_ev"] = op.laser.photon_energy_ev();
  d["up_ratio"] = op.laser.up_ratio();
  d["transit_time_s"] = s.transit_time;
  d["epsilon_ev"] = units::joule_to_ev(s.epsilon);
  d["max_j1"] = s.bounds.max_j1;
  d["max_j2"] = s.bounds.max_j2;
  d["eta_max"] = s.bounds.eta_max;
  d["margin_1"] = s.margin_1;
  d["margin_2"] = s.margin_2;
  d["doublings"] = s.doublings;
  d["truncation_checked"] = s.truncation_checked;
  d["truncation_converged"] = s.truncation_converged;
  d["quadrature_converged"] = s.quadrature_converged;
  d["entry_channels"] = s.entry_channels;
  d["panels"] = s.panels;
  d["fallback_panels"] = s.fallback_panels;
  d["total_rate_per_s"] = s.total_rate;
  json unconverged = json::array(), noise = json::array();
  const ChannelRate* strongest_inelastic = nullptr;
  for (const auto& l : s.lines) {
    if (!l.converged) unconverged.push_back(l.j_pp);
    if (l.below_noise) noise.push_back(l.j_pp);
    if (l.j_pp != 0 && !l.below_noise && (strongest_inelastic == nullptr || l.rate > strongest_inelastic->rate))
      strongest_inelastic = &l;
  }
  d["unconverged_lines"] = unconverged;
  d["below_noise_lines"] = noise;
  if (strongest_inelastic != nullptr) d["strongest_inelastic_line"] = strongest_inelastic->j_pp;
  return d;
}

double side_ratio(const std::vector<ChannelRate>& lines) {
  double neg = 0.0, pos = 0.0;
  for (const auto& l : lines) {
    if (l.j_pp < 0) neg += l.rate;
    if (l.j_pp > 0) pos += l.rate;
  }
  return pos > 0.0 ? neg / pos : 0.0;
}

}  // namespace

TransitTime parse_transit(std::string_view text) {
  if (text == "formula") return TransitTime::formula();
  if (text == "paper") return TransitTime::paper();
  const std::string s(text);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty() || !(v > 0.0) || !std::isfinite(v))
    throw ConfigError("transit must be formula, paper or a positive number of seconds, got '" + s + "'");
  return TransitTime::explicit_value(v);
}

SpectralMode parse_mode(std::string_view text) {
  if (text == "band") return SpectralMode::band;
  if (text == "onshell") return SpectralMode::onshell;
  throw ConfigError("mode must be onshell or band, got '" + std::string(text) + "'");
}

Command parse_command(std::string_view name) {
  if (name == "spectrum") return Command::spectrum;
  if (name == "diffraction") return Command::diffraction;
  if (name == "resonance") return Command::resonance;
  if (name == "baseline") return Command::baseline;
  if (name == "convergence") return Command::convergence;
  throw ConfigError("unknown command '" + std::string(name) + "'");
}

std::string_view command_name(Command c) {
  switch (c) {
    case Command::spectrum:
      return "spectrum";
    case Command::diffraction:
      return "diffraction";
    case Command::resonance:
      return "resonance";
    case Command::baseline:
      return "baseline";
    case Command::convergence:
      return "convergence";
  }
  return "spectrum";
}

ExperimentConfig defaults() { return ExperimentConfig{}; }

ExperimentConfig preset(std::string_view name) {
  ExperimentConfig c;
  c.preset = std::string(name);
  if (name == "fig2" || name == "fig3") {
    // Energy comb and diffraction orders at U_p = 2.9 eV.
    c.up_ev = 2.9;
    c.up_ratio.reset();
    return c;
  }
  if (name == "fig4") {
    // Resonance sweep of u_p over [0.5, 4.5]; the single-point commands use
    // the middle of the range. On-shell amplitudes keep the 81-point sweep
    // affordable; the band integration mostly rescales the elastic line.
    c.up_ratio = 2.5;
    c.up_ev.reset();
    c.mode = SpectralMode::onshell;
    return c;
  }
  throw ConfigError("unknown preset '" + std::string(name) + "' (expected fig2, fig3 or fig4)");
}

ExperimentConfig from_json(const json& j, ExperimentConfig c) {
  require_keys(j, "config",
               {"preset", "laser", "electron", "grid", "truncation", "transit", "mode", "threads", "resonance",
                "baseline", "output"});
  if (j.contains("preset")) {
    std::string name;
    read(j, "preset", name, "config");
    c = preset(name);
  }
  if (j.contains("laser")) {
    const json& l = j.at("laser");
    require_keys(l, "laser", {"wavelength_um", "sigma_um", "up_ev", "up_ratio"});
    if (l.contains("up_ev") && l.contains("up_ratio")) throw ConfigError("give only one of laser.up_ev and laser.up_ratio");
    read(l, "wavelength_um", c.wavelength_um, "laser");
    read(l, "sigma_um", c.sigma_um, "laser");
    if (l.contains("up_ev")) {
      c.up_ev = read_double(l, "up_ev", "laser");
      c.up_ratio.reset();
    }
    if (l.contains("up_ratio")) {
      c.up_ratio = read_double(l, "up_ratio", "laser");
      c.up_ev.reset();
    }
  }
  if (j.contains("electron")) {
    const json& e = j.at("electron");
    require_keys(e, "electron", {"e0_ev", "py"});
    read(e, "e0_ev", c.e0_ev, "electron");
    read(e, "py", c.py, "electron");
  }
  if (j.contains("grid")) {
    const json& g = j.at("grid");
    require_keys(g, "grid",
                 {"x_bound_sigmas", "base_panels", "refinement_limit", "convergence_tol", "band_halfwidth_eps",
                  "band_points"});
    read(g, "x_bound_sigmas", c.x_bound_sigmas, "grid");
    read(g, "base_panels", c.base_panels, "grid");
    read(g, "refinement_limit", c.refinement_limit, "grid");
    read(g, "convergence_tol", c.convergence_tol, "grid");
    read(g, "band_halfwidth_eps", c.band_halfwidth_eps, "grid");
    read(g, "band_points", c.band_points, "grid");
  }
  if (j.contains("truncation")) {
    const json& t = j.at("truncation");
    require_keys(t, "truncation", {"margin_1", "margin_2", "auto_double", "cauchy_tolerance", "max_doublings"});
    read(t, "margin_1", c.policy.margin_1, "truncation");
    read(t, "margin_2", c.policy.margin_2, "truncation");
    read(t, "auto_double", c.policy.auto_double, "truncation");
    read(t, "cauchy_tolerance", c.policy.cauchy_tolerance, "truncation");
    read(t, "max_doublings", c.policy.max_doublings, "truncation");
  }
  if (j.contains("transit")) c.transit = parse_transit_json(j.at("transit"));
  if (j.contains("mode")) {
    std::string m;
    read(j, "mode", m, "config");
    c.mode = parse_mode(m);
  }
  read(j, "threads", c.threads, "config");
  if (j.contains("resonance")) {
    const json& r = j.at("resonance");
    require_keys(r, "resonance", {"up_min", "up_max", "steps", "auto_double"});
    read(r, "up_min", c.resonance.up_min, "resonance");
    read(r, "up_max", c.resonance.up_max, "resonance");
    read(r, "steps", c.resonance.steps, "resonance");
    read(r, "auto_double", c.resonance.auto_double, "resonance");
  }
  if (j.contains("baseline")) {
    const json& b = j.at("baseline");
    require_keys(b, "baseline", {"energies_ev", "transfer_steps", "classical_up_ev", "steps_per_transit", "rate_margin"});
    read(b, "energies_ev", c.baseline.energies_ev, "baseline");
    read(b, "transfer_steps", c.baseline.transfer_steps, "baseline");
    read(b, "classical_up_ev", c.baseline.classical_up_ev, "baseline");
    read(b, "steps_per_transit", c.baseline.steps_per_transit, "baseline");
    read(b, "rate_margin", c.baseline.rate_margin, "baseline");
  }
  if (j.contains("output")) {
    const json& o = j.at("output");
    require_keys(o, "output", {"dir"});
    read(o, "dir", c.out_dir, "output");
  }
  return c;
}

json to_json(const ExperimentConfig& c) {
  json j;
  if (!c.preset.empty()) j["preset"] = c.preset;
  json laser;
  laser["wavelength_um"] = c.wavelength_um;
  laser["sigma_um"] = c.sigma_um;
  if (c.up_ev) laser["up_ev"] = *c.up_ev;
  if (c.up_ratio) laser["up_ratio"] = *c.up_ratio;
  j["laser"] = laser;
  j["electron"] = {{"e0_ev", c.e0_ev}, {"py", c.py}};
  j["grid"] = {{"x_bound_sigmas", c.x_bound_sigmas},   {"base_panels", c.base_panels},
               {"refinement_limit", c.refinement_limit}, {"convergence_tol", c.convergence_tol},
               {"band_halfwidth_eps", c.band_halfwidth_eps}, {"band_points", c.band_points}};
  j["truncation"] = {{"margin_1", c.policy.margin_1},
                     {"margin_2", c.policy.margin_2},
                     {"auto_double", c.policy.auto_double},
                     {"cauchy_tolerance", c.policy.cauchy_tolerance},
                     {"max_doublings", c.policy.max_doublings}};
  j["transit"] = transit_json(c.transit);
  j["mode"] = mode_name(c.mode);
  j["threads"] = c.threads;
  j["resonance"] = {{"up_min", c.resonance.up_min},
                    {"up_max", c.resonance.up_max},
                    {"steps", c.resonance.steps},
                    {"auto_double", c.resonance.auto_double}};
  j["baseline"] = {{"energies_ev", c.baseline.energies_ev},
                   {"transfer_steps", c.baseline.transfer_steps},
                   {"classical_up_ev", c.baseline.classical_up_ev},
                   {"steps_per_transit", c.baseline.steps_per_transit},
                   {"rate_margin", c.baseline.rate_margin}};
  j["output"] = {{"dir", c.out_dir}};
  return j;
}

ExperimentConfig load_file(const std::string& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  // A metadata sidecar carries the resolved configuration under "config".
  if (j.is_object() && j.contains("config") && j.at("config").is_object()) return from_json(j.at("config"), std::move(base));
  return from_json(j, std::move(base));
}

void validate(const ExperimentConfig& c) {
  if (c.up_ev.has_value() == c.up_ratio.has_value())
    throw ConfigError("exactly one of up_ev and up_ratio must be given");
  if (c.up_ev && !(*c.up_ev >= 0.0)) throw ConfigError("up_ev must be non-negative");
  if (c.up_ratio && !(*c.up_ratio >= 0.0)) throw ConfigError("up_ratio must be non-negative");
  if (!(c.x_bound_sigmas > 0.0)) throw ConfigError("grid.x_bound_sigmas must be positive");
  if (c.threads < 0) throw ConfigError("threads must be non-negative");
  if (c.policy.max_doublings < 0) throw ConfigError("truncation.max_doublings must be non-negative");
  if (!(c.policy.cauchy_tolerance > 0.0)) throw ConfigError("truncation.cauchy_tolerance must be positive");
  if (!(c.resonance.up_min >= 0.0) || !(c.resonance.up_max >= c.resonance.up_min))
    throw ConfigError("resonance range must satisfy 0 <= up_min <= up_max");
  if (c.resonance.steps < 1) throw ConfigError("resonance.steps must be at least 1");
  if (c.resonance.up_max > c.resonance.up_min && c.resonance.steps < 2)
    throw ConfigError("a resonance range needs at least 2 steps");
  if (c.baseline.transfer_steps < 1) throw ConfigError("baseline.transfer_steps must be positive");
  if (!(c.baseline.steps_per_transit >= 1.0)) throw ConfigError("baseline.steps_per_transit must be >= 1");
  if (c.baseline.rate_margin < 0) throw ConfigError("baseline.rate_margin must be non-negative");
  for (double e : c.baseline.energies_ev)
    if (!(e > 0.0)) throw ConfigError("baseline energies must be positive");
  for (double u : c.baseline.classical_up_ev)
    if (!(u >= 0.0)) throw ConfigError("classical U_p values must be non-negative");
  try {
    operating_point(c).validate();
    const RateOptions o = rate_options(c);
    o.grid.validate();
    if (c.policy.margin_1 < 0 || c.policy.margin_2 < 0) throw std::invalid_argument("truncation margins must be >= 0");
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

OperatingPoint operating_point(const ExperimentConfig& c) {
  OperatingPoint op;
  op.laser.wavelength = c.wavelength_um * kMicron;
  op.laser.sigma = c.sigma_um * kMicron;
  op.laser.peak_ponderomotive_ev = c.up_ev ? *c.up_ev : 0.0;
  if (c.up_ratio) op.laser.peak_ponderomotive_ev = *c.up_ratio * op.laser.photon_energy_ev();
  op.electron.initial_energy_ev = c.e0_ev;
  op.electron.transverse_momentum = c.py;
  op.transit = c.transit;
  return op;
}

RateOptions rate_options(const ExperimentConfig& c) {
  RateOptions o;
  o.grid = AmplitudeGrid::for_beam(c.sigma_um * kMicron, c.x_bound_sigmas);
  o.grid.base_panel_count = c.base_panels;
  o.grid.refinement_limit = c.refinement_limit;
  o.grid.convergence_tol = c.convergence_tol;
  o.grid.energy_band_halfwidth = c.band_halfwidth_eps;
  o.grid.energy_point_count = c.band_points;
  o.policy = c.policy;
  o.mode = c.mode;
  o.threads = resolved_threads(c);
  return o;
}

int resolved_threads(const ExperimentConfig& c) {
  if (c.threads > 0) return c.threads;
  return std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

std::string spectrum_csv(const SpectrumResult& s, const OperatingPoint& op) {
  std::vector<std::string> rows{"j_pp,final_energy_eV,energy_x_eV,p_zf,rate_per_s,amplitude_abs,error_estimate,below_noise"};
  const double py = op.electron.transverse_momentum;
  for (const auto& l : s.lines) {
    const double recoil = units::joule_to_ev((l.p_zf * l.p_zf + py * py) / (2.0 * units::kElectronMass));
    rows.push_back(csv_row({int_cell(l.j_pp), format_number(l.final_energy_ev), format_number(l.final_energy_ev - recoil),
                            format_number(l.p_zf), format_number(l.rate), format_number(std::abs(l.amplitude)),
                            format_number(l.error_estimate), int_cell(l.below_noise ? 1 : 0)}));
  }
  return join_lines(rows);
}

std::string diffraction_csv(const std::vector<ChannelRate>& lines) {
  std::vector<std::string> rows{"j_pp,p_zf,rate_per_s,open"};
  for (const auto& l : lines)
    rows.push_back(csv_row({int_cell(l.j_pp), format_number(l.p_zf), format_number(l.rate), int_cell(l.open ? 1 : 0)}));
  return join_lines(rows);
}

std::string resonance_csv(const std::vector<ResonancePoint>& points) {
  std::vector<std::string> rows{"u_p,total_rate,inelastic_rate,converged"};
  for (const auto& p : points)
    rows.push_back(csv_row({format_number(p.up_ratio), format_number(p.total_rate), format_number(p.inelastic_rate),
                            int_cell(p.converged ? 1 : 0)}));
  return join_lines(rows);
}

std::vector<std::size_t> local_maxima(const std::vector<double>& values) {
  std::vector<std::size_t> out;
  for (std::size_t i = 1; i + 1 < values.size(); ++i)
    if (values[i] > values[i - 1] && values[i] >= values[i + 1]) out.push_back(i);
  return out;
}

RunOutput run_spectrum(const ExperimentConfig& c) {
  validate(c);
  const OperatingPoint op = operating_point(c);
  const SpectrumResult s = rate::energy_spectrum(op, rate_options(c));
  RunOutput out;
  out.files.emplace_back("spectrum.csv", spectrum_csv(s, op));
  out.metadata["diagnostics"] = spectrum_diagnostics(s, op);
  out.converged = s.converged();
  return out;
}

RunOutput run_diffraction(const ExperimentConfig& c) {
  validate(c);
  const OperatingPoint op = operating_point(c);
  const SpectrumResult s = rate::energy_spectrum(op, rate_options(c));
  const auto lines = rate::diffraction_distribution(s, op);
  RunOutput out;
  out.files.emplace_back("diffraction.csv", diffraction_csv(lines));
  json d = spectrum_diagnostics(s, op);
  d["photon_momentum"] = op.laser.photon_momentum();
  d["negative_to_positive_rate_ratio"] = side_ratio(lines);
  out.metadata["diagnostics"] = d;
  out.converged = s.converged();
  return out;
}

RunOutput run_resonance(const ExperimentConfig& c) {
  validate(c);
  const OperatingPoint op = operating_point(c);
  RateOptions o = rate_options(c);
  o.policy.auto_double = c.resonance.auto_double;
  std::vector<double> ratios;
  const int n = c.resonance.steps;
  for (int i = 0; i < n; ++i) {
    // Exact grid values: up_min + i * step computed from the integer index.
    const double t = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
    ratios.push_back(c.resonance.up_min + t * (c.resonance.up_max - c.resonance.up_min));
  }
  const auto points = rate::resonance_sweep(op, ratios, o);
  RunOutput out;
  out.files.emplace_back("resonance.csv", resonance_csv(points));
  std::vector<double> totals;
  bool all_finite = true;
  json unconverged = json::array();
  for (const auto& p : points) {
    totals.push_back(p.total_rate);
    all_finite = all_finite && std::isfinite(p.total_rate);
    if (!p.converged) unconverged.push_back(p.up_ratio);
    out.converged = out.converged && p.converged;
  }
  json maxima = json::array();
  for (std::size_t i : local_maxima(totals)) {
    // Parabolic vertex through the three points around the maximum.
    const double h = ratios[i + 1] - ratios[i];
    const double y0 = totals[i - 1], y1 = totals[i], y2 = totals[i + 1];
    const double denom = y0 - 2.0 * y1 + y2;
    const double vertex = denom != 0.0 ? ratios[i] + 0.5 * h * (y0 - y2) / denom : ratios[i];
    maxima.push_back({{"u_p", ratios[i]},
                      {"total_rate", totals[i]},
                      {"distance_to_integer", std::abs(ratios[i] - std::round(ratios[i]))},
                      {"parabolic_u_p", vertex}});
  }
  // The inelastic part alone, whose structure is otherwise hidden under the
  // elastic line in the total.
  std::vector<double> inelastic;
  for (const auto& p : points) inelastic.push_back(p.inelastic_rate);
  json inelastic_maxima = json::array();
  for (std::size_t i : local_maxima(inelastic))
    inelastic_maxima.push_back({{"u_p", ratios[i]},
                                {"inelastic_rate", inelastic[i]},
                                {"distance_to_integer", std::abs(ratios[i] - std::round(ratios[i]))}});
  json d;
  d["points"] = static_cast<int>(points.size());
  d["all_finite"] = all_finite;
  d["local_maxima"] = maxima;
  d["inelastic_local_maxima"] = inelastic_maxima;
  d["unconverged_points"] = unconverged;
  d["truncation_doubling"] = c.resonance.auto_double;
  out.metadata["diagnostics"] = d;
  return out;
}

RunOutput run_baseline(const ExperimentConfig& c) {
  validate(c);
  const OperatingPoint op = operating_point(c);
  const double up = op.laser.peak_ponderomotive_ev;
  std::vector<double> energies = c.baseline.energies_ev;
  if (energies.empty()) {
    energies.push_back(c.e0_ev);
    if (up > 0.0)
      for (double f : {0.1, 0.25, 0.5, 0.75, 0.9, 0.98}) energies.push_back(f * up);
  }
  std::vector<std::string> rows{"method,energy_eV,log_transmission,log10_transmission"};
  double max_mismatch = 0.0;
  for (double e : energies) {
    const auto exact = baselines::static_transmission_exact(e, op.laser, 0.0, c.baseline.transfer_steps);
    const auto wkb = baselines::static_transmission_wkb(e, op.laser);
    rows.push_back(csv_row({"exact", format_number(e), format_number(exact.log_t), format_number(exact.log10_t)}));
    rows.push_back(csv_row({"wkb", format_number(e), format_number(wkb.log_t), format_number(wkb.log10_t)}));
    if (std::abs(exact.log_t) > 50.0)
      max_mismatch = std::max(max_mismatch, std::abs(exact.log_t - wkb.log_t) / std::abs(exact.log_t));
  }

  std::vector<double> ups = c.baseline.classical_up_ev;
  if (ups.empty()) ups = {0.5 * c.e0_ev, 0.9 * c.e0_ev, 1.1 * c.e0_ev, 2.0 * c.e0_ev, up};
  std::vector<std::string> classical{"up_ev,e0_ev,reflected,turning_point_m,final_velocity,max_energy_drift,steps"};
  bool classical_ok = true;
  double max_drift = 0.0;
  for (double u : ups) {
    OperatingPoint cop = op;
    cop.laser.peak_ponderomotive_ev = u;
    const auto t = baselines::classical_deflection(cop, c.baseline.steps_per_transit);
    classical.push_back(csv_row({format_number(u), format_number(c.e0_ev), int_cell(t.reflected ? 1 : 0),
                                 format_number(t.turning_point), format_number(t.final_velocity),
                                 format_number(t.max_energy_drift), int_cell(t.steps)}));
    classical_ok = classical_ok && t.reflected == (c.e0_ev < u);
    max_drift = std::max(max_drift, t.max_energy_drift);
  }

  RunOutput out;
  out.files.emplace_back("baseline.csv", join_lines(rows));
  out.files.emplace_back("classical.csv", join_lines(classical));
  json d;
  d["max_relative_log_mismatch_deep"] = max_mismatch;
  d["classical_reflection_matches_threshold"] = classical_ok;
  d["classical_max_energy_drift"] = max_drift;
  // Headline comparison: total ponderomotive rate against the static-barrier
  // rate (4/T) T_static at E_0, with the spectrum evaluated on shell.
  RateOptions o = rate_options(c);
  o.mode = SpectralMode::onshell;
  const SpectrumResult s = rate::spectrum_at_margins(op, o, c.baseline.rate_margin, c.baseline.rate_margin);
  const auto static_t = baselines::static_transmission_exact(c.e0_ev, op.laser, 0.0, c.baseline.transfer_steps);
  const double static_rate_log10 = std::log10(4.0 / op.transit_time()) + static_t.log10_t;
  d["ponderomotive_total_rate_per_s"] = s.total_rate;
  d["ponderomotive_rate_margin"] = c.baseline.rate_margin;
  d["static_rate_log10_per_s"] = static_rate_log10;
  d["log10_ponderomotive_over_static"] = std::log10(s.total_rate) - static_rate_log10;
  out.metadata["diagnostics"] = d;
  out.converged = s.quadrature_converged;
  return out;
}

RunOutput run_convergence(const ExperimentConfig& c) {
  validate(c);
  const OperatingPoint op = operating_point(c);
  struct Variation {
    std::string name;
    ExperimentConfig config;
    int margin_scale = 1;
  };
  ExperimentConfig base = c;
  base.policy.auto_double = false;
  std::vector<Variation> variations{{"reference", base, 1}};
  variations.push_back({"margins_x2", base, 2});
  {
    ExperimentConfig v = base;
    v.base_panels *= 2;
    variations.push_back({"panels_x2", v, 1});
  }
  {
    // Wider window at the same panel density.
    ExperimentConfig v = base;
    v.x_bound_sigmas = base.x_bound_sigmas * 4.0 / 3.0;
    v.base_panels = static_cast<int>(std::lround(base.base_panels * 4.0 / 3.0));
    variations.push_back({"x_bounds_4_3", v, 1});
  }
  if (c.mode == SpectralMode::band) {
    // Twice the band at the same energy spacing.
    ExperimentConfig v = base;
    v.band_halfwidth_eps = 2.0 * base.band_halfwidth_eps;
    v.band_points = 2 * (base.band_points - 1) + 1;
    variations.push_back({"band_x2", v, 1});
  }

  std::vector<SpectrumResult> results;
  for (const auto& v : variations) {
    const RateOptions o = rate_options(v.config);
    results.push_back(rate::spectrum_at_margins(op, o, v.config.policy.margin_1 * v.margin_scale,
                                                v.config.policy.margin_2 * v.margin_scale));
  }
  const SpectrumResult& ref = results.front();
  std::vector<std::string> rows{"variation,j_pp,rate_per_s,reference_rate,relative_change,below_noise"};
  json summary = json::array();
  bool stable = true;
  for (std::size_t v = 0; v < variations.size(); ++v) {
    double worst = 0.0;
    int worst_line = 0;
    json skipped = json::array();
    for (const auto& l : results[v].lines) {
      const ChannelRate* r = ref.find(l.j_pp);
      const bool noise = l.below_noise || r == nullptr || r->below_noise;
      const double ref_rate = r != nullptr ? r->rate : 0.0;
      const double change = ref_rate > 0.0 ? std::abs(l.rate - ref_rate) / ref_rate : 0.0;
      rows.push_back(csv_row({variations[v].name, int_cell(l.j_pp), format_number(l.rate), format_number(ref_rate),
                              format_number(change), int_cell(noise ? 1 : 0)}));
      if (noise) {
        skipped.push_back(l.j_pp);
        continue;
      }
      if (change > worst) {
        worst = change;
        worst_line = l.j_pp;
      }
    }
    const bool ok = worst < kStabilityTolerance;
    if (v > 0) stable = stable && ok;
    summary.push_back({{"variation", variations[v].name},
                       {"max_relative_change", worst},
                       {"worst_line", worst_line},
                       {"stable", ok},
                       {"below_noise_lines", skipped},
                       {"quadrature_converged", results[v].quadrature_converged}});
  }
  RunOutput out;
  out.files.emplace_back("convergence.csv", join_lines(rows));
  json d;
  d["tolerance"] = kStabilityTolerance;
  d["variations"] = summary;
  d["stable"] = stable;
  out.metadata["diagnostics"] = d;
  out.converged = stable;
  for (const auto& r : results) out.converged = out.converged && r.quadrature_converged;
  return out;
}

RunOutput run(Command command, const ExperimentConfig& c) {
  switch (command) {
    case Command::spectrum:
      return run_spectrum(c);
    case Command::diffraction:
      return run_diffraction(c);
    case Command::resonance:
      return run_resonance(c);
    case Command::baseline:
      return run_baseline(c);
    case Command::convergence:
      return run_convergence(c);
  }
  return run_spectrum(c);
}

void write_outputs(const RunOutput& out, const std::string& dir, std::string_view stem) {
  std::filesystem::create_directories(dir);
  for (const auto& [name, content] : out.files) {
    std::ofstream f(std::filesystem::path(dir) / name, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + name);
    f << content;
  }
  std::ofstream meta(std::filesystem::path(dir) / (std::string(stem) + ".json"), std::ios::binary);
  if (!meta) throw std::runtime_error("cannot write metadata");
  meta << out.metadata.dump(2) << '\n';
}

}  // namespace ptun::experiment
