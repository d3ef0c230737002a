#include "caginalp/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include "caginalp/errors.hpp"
#include "caginalp/galerkin.hpp"
#include "caginalp/io.hpp"
#include "caginalp/model.hpp"
#include "caginalp/profile.hpp"

namespace caginalp::cli {

namespace fs = std::filesystem;

std::string mode_name(Mode m) {
  switch (m) {
    case Mode::run: return "run";
    case Mode::profile: return "profile";
    case Mode::sweep: return "sweep";
    case Mode::galerkin: return "galerkin";
    case Mode::stefan_compare: return "stefan-compare";
    case Mode::diagnose: return "diagnose";
  }
  return "?";
}

Mode mode_from_name(const std::string& s) {
  for (Mode m : {Mode::run, Mode::profile, Mode::sweep, Mode::galerkin, Mode::stefan_compare,
                 Mode::diagnose})
    if (mode_name(m) == s) return m;
  throw ConfigError("unknown mode '" + s + "'");
}

namespace {

// ---------------------------------------------------------------------------
// value codecs

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(trim(cur));
  return out;
}

double to_double(const std::string& v) {
  try {
    return io::parse_double(v);
  } catch (const std::invalid_argument&) {
    throw ConfigError("expected a number, got '" + v + "'");
  }
}

long to_long(const std::string& v) {
  long x = 0;
  const char* first = v.data();
  if (!v.empty() && v[0] == '+') ++first;
  auto r = std::from_chars(first, v.data() + v.size(), x);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size() || v.empty())
    throw ConfigError("expected an integer, got '" + v + "'");
  return x;
}

int to_int(const std::string& v) {
  const long x = to_long(v);
  if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
    throw ConfigError("integer out of range: " + v);
  return static_cast<int>(x);
}

bool to_bool(const std::string& v) {
  if (v == "true") return true;
  if (v == "false") return false;
  throw ConfigError("expected true or false, got '" + v + "'");
}

std::string from_bool(bool b) { return b ? "true" : "false"; }

std::vector<double> to_list(const std::string& v) {
  std::vector<double> out;
  for (const auto& p : split(v, ',')) out.push_back(to_double(p));
  if (out.empty()) throw ConfigError("empty list");
  return out;
}

std::string from_list(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + io::fmt_short(v[i]);
  return s;
}

const char* face_names[4] = {"left", "right", "bottom", "top"};

std::array<bool, 4> to_faces(const std::string& v) {
  std::array<bool, 4> f{false, false, false, false};
  if (v == "none") return f;
  for (const auto& p : split(v, ',')) {
    bool hit = false;
    for (int k = 0; k < 4; ++k)
      if (p == face_names[k]) f[k] = hit = true;
    if (!hit) throw ConfigError("unknown face '" + p + "'");
  }
  return f;
}

std::string from_faces(const std::array<bool, 4>& f) {
  std::string s;
  for (int k = 0; k < 4; ++k)
    if (f[k]) s += (s.empty() ? "" : ",") + std::string(face_names[k]);
  return s.empty() ? "none" : s;
}

template <class E>
struct Choice {
  E value;
  const char* name;
};

template <class E, std::size_t K>
E to_choice(const std::string& v, const Choice<E> (&table)[K]) {
  std::string all;
  for (const auto& c : table) {
    if (v == c.name) return c.value;
    all += (all.empty() ? "" : ", ") + std::string(c.name);
  }
  throw ConfigError("expected one of " + all + ", got '" + v + "'");
}

template <class E, std::size_t K>
std::string from_choice(E e, const Choice<E> (&table)[K]) {
  for (const auto& c : table)
    if (c.value == e) return c.name;
  return "?";
}

const Choice<InitKind> init_kinds[] = {{InitKind::pure, "pure"},
                                       {InitKind::front, "front"},
                                       {InitKind::bubble, "bubble"},
                                       {InitKind::cosine, "cosine"},
                                       {InitKind::file, "file"}};
const Choice<pde::Scheme> schemes[] = {{pde::Scheme::imex_euler, "imex_euler"},
                                       {pde::Scheme::imex_trapezoid, "imex_trapezoid"}};
const Choice<pde::Mode> model_modes[] = {{pde::Mode::full, "full"},
                                         {pde::Mode::caginalp, "caginalp"}};
const Choice<stefan::Scenario> scenarios[] = {{stefan::Scenario::planar_1d, "planar_1d"},
                                              {stefan::Scenario::radial_2d, "radial_2d"}};

// ---------------------------------------------------------------------------
// key table

struct Key {
  std::string name;
  std::string doc;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::optional<std::string>(const RunConfig&)> get;  // nullopt: not emitted
};

template <class T>
using Ref = std::function<T&(RunConfig&)>;

// Reads through a non-const accessor on a copy so accessors stay one-liners.
template <class T>
T read(const RunConfig& c, const Ref<T>& r) {
  RunConfig copy = c;
  return r(copy);
}

Key num(std::string name, std::string doc, Ref<double> r) {
  return {std::move(name), std::move(doc),
          [r](RunConfig& c, const std::string& v) { r(c) = to_double(v); },
          [r](const RunConfig& c) -> std::optional<std::string> {
            return io::fmt_short(read(c, r));
          }};
}

Key integer(std::string name, std::string doc, Ref<int> r) {
  return {std::move(name), std::move(doc),
          [r](RunConfig& c, const std::string& v) { r(c) = to_int(v); },
          [r](const RunConfig& c) -> std::optional<std::string> {
            return std::to_string(read(c, r));
          }};
}

Key boolean(std::string name, std::string doc, Ref<bool> r) {
  return {std::move(name), std::move(doc),
          [r](RunConfig& c, const std::string& v) { r(c) = to_bool(v); },
          [r](const RunConfig& c) -> std::optional<std::string> { return from_bool(read(c, r)); }};
}

Key text(std::string name, std::string doc, Ref<std::string> r) {
  return {std::move(name), std::move(doc),
          [r](RunConfig& c, const std::string& v) { r(c) = v; },
          [r](const RunConfig& c) -> std::optional<std::string> { return read(c, r); }};
}

template <class E, std::size_t K>
Key choice(std::string name, std::string doc, Ref<E> r, const Choice<E> (&table)[K]) {
  return {std::move(name), std::move(doc),
          [r, &table](RunConfig& c, const std::string& v) { r(c) = to_choice(v, table); },
          [r, &table](const RunConfig& c) -> std::optional<std::string> {
            return from_choice(read(c, r), table);
          }};
}

// Chart keys exist only while their section is present.
template <class P>
Key chart(std::string name, std::optional<P> RunConfig::*section, double P::*field) {
  return {std::move(name), "",
          [section, field](RunConfig& c, const std::string& v) {
            if (!(c.*section)) (c.*section).emplace();
            (*(c.*section)).*field = to_double(v);
          },
          [section, field](const RunConfig& c) -> std::optional<std::string> {
            if (!(c.*section)) return std::nullopt;
            return io::fmt_short((*(c.*section)).*field);
          }};
}

const std::vector<Key>& keys() {
  static const std::vector<Key> table = [] {
    std::vector<Key> k;
    k.push_back({"mode", "run | profile | sweep | galerkin | stefan-compare | diagnose (required)",
                 [](RunConfig& c, const std::string& v) { c.mode = mode_from_name(v); },
                 [](const RunConfig& c) -> std::optional<std::string> {
                   return mode_name(c.mode);
                 }});
    using model::HatParams;
    using model::NondimParams;
    using model::PhysicalParams;
    for (auto [n, f] : std::initializer_list<std::pair<const char*, double PhysicalParams::*>>{
             {"rho", &PhysicalParams::rho},       {"Te", &PhysicalParams::Te},
             {"dT", &PhysicalParams::dT},         {"L", &PhysicalParams::L},
             {"h", &PhysicalParams::h},           {"t0", &PhysicalParams::t0},
             {"sigma", &PhysicalParams::sigma},   {"Le", &PhysicalParams::Le},
             {"C0", &PhysicalParams::C0},         {"kappa0", &PhysicalParams::kappa0},
             {"k0", &PhysicalParams::k0}})
      k.push_back(chart(std::string("physical.") + n, &RunConfig::physical, f));
    for (auto [n, f] : std::initializer_list<std::pair<const char*, double NondimParams::*>>{
             {"eps", &NondimParams::eps},     {"Pe", &NondimParams::Pe},
             {"alpha", &NondimParams::alpha}, {"theta", &NondimParams::theta},
             {"beta", &NondimParams::beta},   {"St", &NondimParams::St}})
      k.push_back(chart(std::string("nondim.") + n, &RunConfig::nondim, f));
    for (auto [n, f] : std::initializer_list<std::pair<const char*, double HatParams::*>>{
             {"alpha_hat", &HatParams::alpha_hat}, {"beta_hat", &HatParams::beta_hat},
             {"gamma", &HatParams::gamma},         {"delta", &HatParams::delta},
             {"eps", &HatParams::eps},             {"theta", &HatParams::theta}})
      k.push_back(chart(std::string("hat.") + n, &RunConfig::hat, f));

    k.push_back(text("potentials.W", "quartic | smoothstep | zero | identity | poly:c0,c1,...",
                     [](RunConfig& c) -> std::string& { return c.W; }));
    k.push_back(text("potentials.nu", "same names as potentials.W",
                     [](RunConfig& c) -> std::string& { return c.nu; }));

    k.push_back(integer("grid.dim", "1 or 2", [](RunConfig& c) -> int& { return c.grid.dim; }));
    k.push_back(integer("grid.nx", "cells along x", [](RunConfig& c) -> int& { return c.grid.nx; }));
    k.push_back(integer("grid.ny", "cells along y (2D)",
                        [](RunConfig& c) -> int& { return c.grid.ny; }));
    k.push_back(num("grid.Lx", "domain length", [](RunConfig& c) -> double& { return c.grid.Lx; }));
    k.push_back(num("grid.Ly", "domain height (2D)",
                    [](RunConfig& c) -> double& { return c.grid.Ly; }));

    k.push_back(num("bc.q_b", "outward dT/dn on Gamma faces",
                    [](RunConfig& c) -> double& { return c.bc.q_b; }));
    k.push_back(num("bc.T_b", "T on the remaining faces",
                    [](RunConfig& c) -> double& { return c.bc.T_b; }));
    k.push_back({"bc.gamma", "comma list of flux faces (left,right,bottom,top) or none",
                 [](RunConfig& c, const std::string& v) { c.bc.gamma = to_faces(v); },
                 [](const RunConfig& c) -> std::optional<std::string> {
                   return from_faces(c.bc.gamma);
                 }});
    for (int f = 0; f < 4; ++f)
      k.push_back({std::string("bc.flux_") + face_names[f], "flux replacing q_b on this face",
                   [f](RunConfig& c, const std::string& v) {
                     c.bc.flux_override[f] = to_double(v);
                   },
                   [f](const RunConfig& c) -> std::optional<std::string> {
                     if (!c.bc.flux_override[f]) return std::nullopt;
                     return io::fmt_short(*c.bc.flux_override[f]);
                   }});

    k.push_back(choice("init.kind", "pure | front | bubble | cosine | file",
                       Ref<InitKind>([](RunConfig& c) -> InitKind& { return c.init.kind; }),
                       init_kinds));
    k.push_back(num("init.phi", "pure: phi value", [](RunConfig& c) -> double& {
      return c.init.phi;
    }));
    k.push_back(boolean("init.T_lifting", "start T at the harmonic lifting",
                        [](RunConfig& c) -> bool& { return c.init.T_lifting; }));
    k.push_back(num("init.T_value", "uniform T when init.T_lifting = false",
                    [](RunConfig& c) -> double& { return c.init.T_value; }));
    k.push_back(num("init.front", "front: x position",
                    [](RunConfig& c) -> double& { return c.init.front; }));
    k.push_back(integer("init.orientation", "front: +1 liquid on the right, -1 on the left",
                        [](RunConfig& c) -> int& { return c.init.orientation; }));
    k.push_back(num("init.radius", "bubble: liquid disc radius about the origin",
                    [](RunConfig& c) -> double& { return c.init.radius; }));
    k.push_back(num("init.phi_mean", "cosine: mean of phi",
                    [](RunConfig& c) -> double& { return c.init.phi_mean; }));
    k.push_back(num("init.phi_amp", "cosine: amplitude of cos(pi x / Lx)",
                    [](RunConfig& c) -> double& { return c.init.phi_amp; }));
    k.push_back(num("init.T_amp", "cosine: amplitude of the first temperature mode",
                    [](RunConfig& c) -> double& { return c.init.T_amp; }));
    k.push_back(num("init.noise", "uniform noise amplitude added to phi and T",
                    [](RunConfig& c) -> double& { return c.init.noise; }));
    k.push_back({"init.seed", "noise seed",
                 [](RunConfig& c, const std::string& v) {
                   const long s = to_long(v);
                   if (s < 0) throw ConfigError("seed must be nonnegative");
                   c.init.seed = static_cast<unsigned long>(s);
                 },
                 [](const RunConfig& c) -> std::optional<std::string> {
                   return std::to_string(c.init.seed);
                 }});
    k.push_back({"init.file", "file: snapshot path, relative to the config",
                 [](RunConfig& c, const std::string& v) { c.init.file = v; },
                 [](const RunConfig& c) -> std::optional<std::string> {
                   if (c.init.file.empty()) return std::nullopt;
                   return c.init.file;
                 }});

    k.push_back(num("time.dt", "0 picks the stability default",
                    [](RunConfig& c) -> double& { return c.time.dt; }));
    k.push_back(num("time.t_end", "final time", [](RunConfig& c) -> double& {
      return c.time.t_end;
    }));
    k.push_back(integer("time.diag_every", "steps between diagnostics rows",
                        [](RunConfig& c) -> int& { return c.time.diag_every; }));
    k.push_back(integer("time.snapshot_every", "steps between snapshots, 0 for initial/final only",
                        [](RunConfig& c) -> int& { return c.time.snapshot_every; }));
    k.push_back(choice("time.scheme", "imex_trapezoid | imex_euler",
                       Ref<pde::Scheme>([](RunConfig& c) -> pde::Scheme& {
                         return c.time.scheme;
                       }),
                       schemes));
    k.push_back(choice("time.model", "full | caginalp",
                       Ref<pde::Mode>([](RunConfig& c) -> pde::Mode& { return c.time.mode; }),
                       model_modes));

    k.push_back(integer("galerkin.n", "modes per field",
                        [](RunConfig& c) -> int& { return c.galerkin.n; }));
    k.push_back(num("galerkin.dt", "RK4 step", [](RunConfig& c) -> double& {
      return c.galerkin.dt;
    }));
    k.push_back(integer("galerkin.sample_every", "steps between CSV rows",
                        [](RunConfig& c) -> int& { return c.galerkin.sample_every; }));

    k.push_back({"sweep.eps", "comma list, strictly decreasing",
                 [](RunConfig& c, const std::string& v) { c.sweep.eps = to_list(v); },
                 [](const RunConfig& c) -> std::optional<std::string> {
                   return from_list(c.sweep.eps);
                 }});
    k.push_back(choice("sweep.scenario", "planar_1d | radial_2d",
                       Ref<stefan::Scenario>([](RunConfig& c) -> stefan::Scenario& {
                         return c.sweep.scenario;
                       }),
                       scenarios));
    auto P = [](RunConfig& c) -> stefan::PlanarScenario& { return c.sweep.planar; };
    auto pn = [&k, P](const char* n, const char* doc, double stefan::PlanarScenario::*f) {
      k.push_back(num(std::string("sweep.planar.") + n, doc,
                      [P, f](RunConfig& c) -> double& { return P(c).*f; }));
    };
    pn("Lx", "domain length", &stefan::PlanarScenario::Lx);
    pn("x0", "initial front", &stefan::PlanarScenario::x0);
    pn("T_inf", "far-field liquid temperature", &stefan::PlanarScenario::T_inf);
    pn("seed_quadratic", "quadratic coefficient of the seeding wave",
       &stefan::PlanarScenario::seed_quadratic_coefficient);
    pn("cells_per_eps", "resolution", &stefan::PlanarScenario::cells_per_eps);
    pn("dt_per_eps2", "time step over eps^2", &stefan::PlanarScenario::dt_per_eps2);
    k.push_back(boolean("sweep.planar.richardson", "extrapolate from a half-resolution run",
                        [](RunConfig& c) -> bool& { return c.sweep.planar.richardson; }));
    pn("t_end", "final time", &stefan::PlanarScenario::t_end);
    pn("tau", "velocity half-window", &stefan::PlanarScenario::tau);
    pn("sample_every", "trajectory sampling interval", &stefan::PlanarScenario::sample_every);
    auto rn = [&k](const char* n, const char* doc, double stefan::RadialScenario::*f) {
      k.push_back(num(std::string("sweep.radial.") + n, doc,
                      [f](RunConfig& c) -> double& { return c.sweep.radial.*f; }));
    };
    rn("L", "quarter-domain side", &stefan::RadialScenario::L);
    rn("R0", "initial radius", &stefan::RadialScenario::R0);
    rn("T0", "initial temperature", &stefan::RadialScenario::T0);
    rn("cells_per_eps", "resolution", &stefan::RadialScenario::cells_per_eps);
    rn("dt_per_eps2", "time step over eps^2", &stefan::RadialScenario::dt_per_eps2);
    rn("t_end", "final time", &stefan::RadialScenario::t_end);
    rn("tau", "velocity half-window", &stefan::RadialScenario::tau);

    k.push_back(integer("stefan.nodes", "oracle nodes per phase",
                        [](RunConfig& c) -> int& { return c.stefan.nodes; }));
    k.push_back(num("stefan.quadratic", "oracle quadratic coefficient (2 paper, 1, 0)",
                    [](RunConfig& c) -> double& { return c.stefan.quadratic; }));
    return k;
  }();
  return table;
}

const Key* find_key(const std::string& name) {
  for (const auto& k : keys())
    if (k.name == name) return &k;
  return nullptr;
}

std::string section_of(const std::string& key) {
  const auto dot = key.find('.');
  return dot == std::string::npos ? "" : key.substr(0, dot);
}

void validate_config(const RunConfig& c, const std::map<std::string, int>& lines) {
  auto line = [&](const std::string& k) {
    auto it = lines.find(k);
    return it == lines.end() ? 0 : it->second;
  };
  auto first_line = [&](const std::string& section) {
    int best = 0;
    for (const auto& [k, l] : lines)
      if (section_of(k) == section && (best == 0 || l < best)) best = l;
    return best;
  };
  auto guard = [](int ln, auto&& fn) {
    try {
      fn();
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError(e.what(), ln);
    }
  };
  if (c.physical) guard(first_line("physical"), [&] { model::validate(*c.physical); });
  if (c.nondim) guard(first_line("nondim"), [&] { model::validate(*c.nondim); });
  if (c.hat) guard(first_line("hat"), [&] { model::validate(*c.hat); });
  guard(first_line("grid"), [&] { c.grid.validate(); });
  guard(line("potentials.W"), [&] { model::Potentials::named(c.W); });
  guard(line("potentials.nu"), [&] { model::Potentials::named(c.nu); });
  if (!(c.time.dt >= 0.0)) throw ConfigError("time.dt must be nonnegative", line("time.dt"));
  if (!(c.time.t_end >= 0.0))
    throw ConfigError("time.t_end must be nonnegative", line("time.t_end"));
  if (c.time.diag_every < 1)
    throw ConfigError("time.diag_every must be at least 1", line("time.diag_every"));
  if (c.time.snapshot_every < 0)
    throw ConfigError("time.snapshot_every must be nonnegative", line("time.snapshot_every"));
  if (c.init.orientation != 1 && c.init.orientation != -1)
    throw ConfigError("init.orientation must be +1 or -1", line("init.orientation"));
  if (!(c.init.noise >= 0.0))
    throw ConfigError("init.noise must be nonnegative", line("init.noise"));
  if (!(c.init.radius > 0.0))
    throw ConfigError("init.radius must be positive", line("init.radius"));
  if (c.init.kind == InitKind::file) {
    if (c.init.file.empty()) throw ConfigError("init.kind = file needs init.file", line("init.kind"));
    if (!fs::exists(c.init.file))
      throw ConfigError("init.file does not exist: " + c.init.file, line("init.file"));
  }
  if (c.galerkin.n < 1) throw ConfigError("galerkin.n must be positive", line("galerkin.n"));
  if (!(c.galerkin.dt > 0.0)) throw ConfigError("galerkin.dt must be positive", line("galerkin.dt"));
  if (c.galerkin.sample_every < 1)
    throw ConfigError("galerkin.sample_every must be at least 1", line("galerkin.sample_every"));
  for (std::size_t i = 0; i < c.sweep.eps.size(); ++i) {
    if (!(c.sweep.eps[i] > 0.0)) throw ConfigError("sweep.eps must be positive", line("sweep.eps"));
    if (i > 0 && !(c.sweep.eps[i] < c.sweep.eps[i - 1]))
      throw ConfigError("sweep.eps must be strictly decreasing", line("sweep.eps"));
  }
  if (c.stefan.nodes < 4) throw ConfigError("stefan.nodes must be at least 4", line("stefan.nodes"));
}

}  // namespace

RunConfig parse_config_text(const std::string& text, const fs::path& base) {
  RunConfig cfg;
  std::map<std::string, int> lines;
  std::istringstream is(text);
  std::string raw;
  int ln = 0;
  while (std::getline(is, raw)) {
    ++ln;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value'", ln);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const Key* k = find_key(key);
    if (!k) throw ConfigError("unknown key '" + key + "'", ln);
    if (lines.count(key)) throw ConfigError("duplicate key '" + key + "'", ln);
    if (value.empty()) throw ConfigError("missing value for '" + key + "'", ln);
    lines[key] = ln;
    try {
      k->set(cfg, value);
    } catch (const ConfigError& e) {
      throw ConfigError(key + ": " + e.what(), ln);
    }
  }
  if (!lines.count("mode")) throw ConfigError("missing mandatory key 'mode'");
  std::vector<std::string> charts;
  if (cfg.physical) charts.push_back("physical");
  if (cfg.nondim) charts.push_back("nondim");
  if (cfg.hat) charts.push_back("hat");
  if (charts.empty())
    throw ConfigError("missing parameter chart: give one of the physical, nondim or hat sections");
  if (charts.size() > 1) {
    // Point at the line where the second chart to appear begins.
    std::vector<int> starts;
    for (const auto& c : charts) {
      int first = 0;
      for (const auto& [k, v] : lines)
        if (section_of(k) == c) first = first == 0 ? v : std::min(first, v);
      starts.push_back(first);
    }
    std::sort(starts.begin(), starts.end());
    const int l = starts[1];
    std::string names = charts[0];
    for (std::size_t i = 1; i < charts.size(); ++i) names += " and " + charts[i];
    throw ConfigError("conflicting parameter charts: " + names, l);
  }
  if (!cfg.init.file.empty()) {
    fs::path p = cfg.init.file;
    if (p.is_relative() && !base.empty()) p = base / p;
    cfg.init.file = fs::absolute(p).lexically_normal().string();
  }
  validate_config(cfg, lines);
  return cfg;
}

RunConfig parse_config(const fs::path& path) {
  std::string text;
  try {
    text = io::read_text(path);
  } catch (const IoError& e) {
    throw ConfigError(e.what());
  }
  return parse_config_text(text, path.parent_path());
}

std::string emit_config(const RunConfig& cfg) {
  std::string out;
  for (const auto& k : keys())
    if (auto v = k.get(cfg)) out += k.name + " = " + *v + "\n";
  return out;
}

std::string config_reference() {
  RunConfig d;
  std::ostringstream os;
  os << "Config file: one 'section.key = value' per line, '#' starts a comment.\n"
        "Exactly one of the physical, nondim or hat sections is required.\n\n";
  std::string last;
  for (const auto& k : keys()) {
    const std::string sec = section_of(k.name);
    if (sec != last) os << "\n";
    last = sec;
    os << "  " << std::left << std::setw(28) << k.name;
    if (sec == "physical" || sec == "nondim" || sec == "hat") {
      RunConfig full;
      full.physical.emplace();
      full.nondim.emplace();
      full.hat.emplace();
      os << " default " << *k.get(full);
    } else if (auto v = k.get(d)) {
      os << " default " << *v;
    }
    if (!k.doc.empty()) os << "  (" << k.doc << ")";
    os << "\n";
  }
  return os.str();
}

model::HatParams resolved_hat(const RunConfig& cfg) {
  if (cfg.hat) return *cfg.hat;
  if (cfg.nondim) return model::hat_params(*cfg.nondim);
  if (cfg.physical) return model::hat_params(model::nondimensionalize(*cfg.physical));
  throw ConfigError("no parameter chart");
}

namespace {

model::Potentials potentials_of(const RunConfig& cfg) {
  if (cfg.W == "quartic" && cfg.nu == "smoothstep") return model::Potentials::standard();
  return model::Potentials::make(model::Potentials::named(cfg.W), model::Potentials::named(cfg.nu),
                                 cfg.W, cfg.nu);
}

std::vector<double> lifting_or_zero(const Grid& g, const BoundarySpec& bc) {
  try {
    return pde::lifting_solution(g, bc);
  } catch (const DomainError&) {
    return std::vector<double>(g.size(), 0.0);
  }
}

// Noise-free initial data at a point; `lift` is the temperature base value there.
struct PointInit {
  const RunConfig& cfg;
  model::HatParams h;
  std::optional<profile::ProfileSolution> sol;

  explicit PointInit(const RunConfig& c) : cfg(c), h(resolved_hat(c)) {
    if (c.init.kind == InitKind::front || c.init.kind == InitKind::bubble)
      sol = profile::solve_profile(potentials_of(c));
  }

  double phi(double x, double y) const {
    const InitSpec& in = cfg.init;
    switch (in.kind) {
      case InitKind::pure: return in.phi;
      case InitKind::front:
        return profile::profile_value(*sol, in.orientation * (x - in.front) / h.eps);
      case InitKind::bubble: {
        const double r = cfg.grid.dim == 2 ? std::hypot(x, y) : std::abs(x);
        return profile::profile_value(*sol, (in.radius - r) / h.eps);
      }
      case InitKind::cosine:
        return in.phi_mean + in.phi_amp * std::cos(std::numbers::pi * x / cfg.grid.Lx);
      case InitKind::file: break;
    }
    return 0.0;
  }

  double T(double x, double lift) const {
    const InitSpec& in = cfg.init;
    double t = in.T_lifting ? lift : in.T_value;
    if (in.kind == InitKind::cosine && in.T_amp != 0.0)
      t += in.T_amp *
           galerkin::mode_value(galerkin::T_family_for(cfg.bc), 1, x / cfg.grid.Lx);
    return t;
  }
};

}  // namespace

FieldState initial_state(const RunConfig& cfg) {
  const Grid& g = cfg.grid;
  FieldState s;
  if (cfg.init.kind == InitKind::file) {
    Grid fg;
    s = io::read_snapshot(cfg.init.file, &fg);
    if (!(fg.dim == g.dim && fg.nx == g.nx && fg.ny == g.ny &&
          std::abs(fg.dx() - g.dx()) <= 1e-12 * g.dx() &&
          std::abs(fg.dy() - g.dy()) <= 1e-12 * g.dy()))
      throw ConfigError("snapshot grid does not match grid section: " + cfg.init.file);
    s.time = 0.0;
  } else {
    const PointInit init(cfg);
    const auto lift = lifting_or_zero(g, cfg.bc);
    s = make_state(g, 0.0, 0.0);
    const int ny = g.dim == 2 ? g.ny : 1;
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const std::size_t c = static_cast<std::size_t>(j) * g.nx + i;
        const double x = g.x(i), y = g.dim == 2 ? g.y(j) : 0.0;
        s.phi[c] = init.phi(x, y);
        s.T[c] = init.T(x, lift[c]);
      }
  }
  if (cfg.init.noise > 0.0) {
    std::mt19937_64 rng(cfg.init.seed);
    std::uniform_real_distribution<double> u(-cfg.init.noise, cfg.init.noise);
    for (double& v : s.phi) v += u(rng);
    for (double& v : s.T) v += u(rng);
  }
  return s;
}

namespace {

// Collects artifact names and writes the manifest at the end.
class Artifacts {
 public:
  explicit Artifacts(fs::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw IoError("cannot create " + dir_.string() + ": " + ec.message());
  }
  fs::path path(const std::string& name) {
    names_.push_back(name);
    return dir_ / name;
  }
  void text(const std::string& name, const std::string& body) { io::write_text(path(name), body); }
  void snapshot(const std::string& name, const Grid& g, const FieldState& s) {
    io::write_snapshot(path(name), g, s);
  }
  void manifest() {
    std::sort(names_.begin(), names_.end());
    names_.erase(std::unique(names_.begin(), names_.end()), names_.end());
    std::string body;
    for (const auto& n : names_) body += io::sha256_file(dir_ / n) + "  " + n + "\n";
    io::write_text(dir_ / "manifest", body);
  }

 private:
  fs::path dir_;
  std::vector<std::string> names_;
};

std::string snap_name(long k) {
  std::ostringstream os;
  os << "snap_" << std::setw(8) << std::setfill('0') << k << ".snap";
  return os.str();
}

void do_run(const RunConfig& cfg, Artifacts& art, std::ostream& out) {
  const model::HatParams h = resolved_hat(cfg);
  const model::Potentials pot = potentials_of(cfg);
  const Grid& g = cfg.grid;
  const FieldState s0 = initial_state(cfg);
  art.snapshot("initial.snap", g, s0);
  pde::RunOptions ro;
  ro.dt = cfg.time.dt;
  ro.t_end = cfg.time.t_end;
  ro.diag_every = cfg.time.diag_every;
  ro.step = {cfg.time.mode, cfg.time.scheme};
  if (cfg.time.snapshot_every > 0) {
    ro.observe_every = cfg.time.snapshot_every;
    ro.observer = [&](const FieldState& s, long k) { art.snapshot(snap_name(k), g, s); };
  }
  pde::RunResult res;
  try {
    res = pde::run(s0, g, h, pot, cfg.bc, ro);
  } catch (const pde::SolverFailure& f) {
    art.snapshot("failure.snap", g, f.last_good());
    art.manifest();
    throw;
  }
  art.snapshot("final.snap", g, res.final_state);
  art.text("diagnostics.csv", io::diagnostics_csv(res.diagnostics));
  const auto& a = res.diagnostics.front().energy;
  const auto& b = res.diagnostics.back().energy;
  out << "steps=" << res.steps << " dt=" << io::fmt(res.dt) << " E_initial=" << io::fmt(a.E)
      << " E_final=" << io::fmt(b.E) << "\n";
}

void do_profile(const RunConfig& cfg, Artifacts& art, std::ostream& out) {
  const model::Potentials pot = potentials_of(cfg);
  const auto sol = profile::solve_profile(pot);
  const double sigma0 = profile::surface_tension(sol);
  art.text("profile.txt", io::profile_text(sol));
  out << "sigma0=" << io::fmt(sigma0) << "\n";
}

stefan::SweepOptions sweep_options(const RunConfig& cfg, int jobs) {
  const model::HatParams h = resolved_hat(cfg);
  stefan::SweepOptions so;
  so.bars = model::sharp_scalings(h);
  so.theta = h.theta;
  so.eps_list = cfg.sweep.eps;
  so.scenario = cfg.sweep.scenario;
  so.planar = cfg.sweep.planar;
  so.radial = cfg.sweep.radial;
  so.jobs = jobs;
  return so;
}

void do_sweep(const RunConfig& cfg, int jobs, Artifacts& art, std::ostream& out) {
  const auto rep = stefan::eps_sweep(sweep_options(cfg, jobs), potentials_of(cfg));
  art.text("sweep.csv", io::sweep_csv(rep));
  for (const auto& r : rep.rows)
    if (!r.note.empty()) out << "eps=" << io::fmt_short(r.eps) << " note: " << r.note << "\n";
  out << "order_gt=" << io::fmt(rep.order_gt) << " order_jump=" << io::fmt(rep.order_jump)
      << " order_linear_jump=" << io::fmt(rep.order_linear_jump)
      << " order_energy_jump=" << io::fmt(rep.order_energy_jump) << "\n";
}

void do_galerkin(const RunConfig& cfg, Artifacts& art, std::ostream& out) {
  if (cfg.init.kind == InitKind::file || cfg.init.noise > 0.0)
    throw ConfigError("galerkin mode needs noise-free analytic initial data");
  const model::HatParams h = resolved_hat(cfg);
  const model::Potentials pot = potentials_of(cfg);
  const auto basis = galerkin::build_bases(cfg.grid, cfg.bc, cfg.galerkin.n);
  const PointInit init(cfg);
  const BoundarySpec& bc = cfg.bc;
  const galerkin::ModeVector m0 =
      galerkin::project(basis, [&](double x) { return init.phi(x, 0.0); },
                        [&](double x) { return init.T(x, galerkin::lifting_at(bc, x)); }, bc);
  galerkin::IntegrateOptions io_;
  io_.dt = cfg.galerkin.dt;
  io_.t_end = cfg.time.t_end;
  io_.sample_every = cfg.galerkin.sample_every;
  io_.mode = cfg.time.mode;
  const auto tr = galerkin::integrate_modes(m0, basis, pot, h, bc, io_);
  art.text("galerkin.csv", io::galerkin_csv(tr));
  for (const auto& w : tr.warnings) out << "warning: " << w << "\n";
  out << "steps=" << tr.steps << " identity_residual_max=" << io::fmt(tr.identity_residual_max)
      << (tr.truncated ? " truncated" : "") << "\n";
}

void do_stefan_compare(const RunConfig& cfg, Artifacts& art, std::ostream& out) {
  if (cfg.sweep.scenario != stefan::Scenario::planar_1d)
    throw ConfigError("stefan-compare needs sweep.scenario = planar_1d");
  const model::HatParams h = resolved_hat(cfg);
  const model::Potentials pot = potentials_of(cfg);
  stefan::SweepOptions so = sweep_options(cfg, 1);
  so.planar.richardson = false;
  const auto sol = profile::solve_profile(pot);
  const auto row = stefan::sweep_row(so, pot, sol, h.eps);
  const auto ref = stefan::stefan_reference_1d(
      stefan::planar_reference_options(so, sol.sigma0, cfg.stefan.quadratic, cfg.stefan.nodes));
  std::string csv = "time,phase_field,oracle,difference\n";
  double worst = 0.0;
  for (std::size_t k = 0; k < row.times.size(); ++k) {
    const double t = row.times[k];
    auto it = std::lower_bound(ref.times.begin(), ref.times.end(), t - 1e-12);
    double xo;
    if (it == ref.times.end()) {
      xo = ref.positions.back();
    } else if (it == ref.times.begin()) {
      xo = ref.positions.front();
    } else {
      const std::size_t j = it - ref.times.begin();
      const double w = (t - ref.times[j - 1]) / (ref.times[j] - ref.times[j - 1]);
      xo = (1 - w) * ref.positions[j - 1] + w * ref.positions[j];
    }
    const double d = row.positions[k] - xo;
    worst = std::max(worst, std::abs(d));
    csv += io::fmt(t) + "," + io::fmt(row.positions[k]) + "," + io::fmt(xo) + "," + io::fmt(d) +
           "\n";
  }
  art.text("stefan_compare.csv", csv);
  if (row.truncated) out << "note: " << row.note << "\n";
  out << "max_difference=" << io::fmt(worst) << " in_eps=" << io::fmt(worst / h.eps) << "\n";
}

void do_diagnose(const RunConfig& cfg, Artifacts& art, std::ostream& out) {
  const model::HatParams h = resolved_hat(cfg);
  const model::Potentials pot = potentials_of(cfg);
  const model::SharpScalings bars = model::sharp_scalings(h);
  std::ostringstream os;
  auto kv = [&](const std::string& k, double v) { os << k << " = " << io::fmt(v) << "\n"; };
  kv("hat.alpha_hat", h.alpha_hat);
  kv("hat.beta_hat", h.beta_hat);
  kv("hat.gamma", h.gamma);
  kv("hat.delta", h.delta);
  kv("hat.eps", h.eps);
  kv("hat.theta", h.theta);
  kv("bar.alpha", bars.alpha_bar);
  kv("bar.beta", bars.beta_bar);
  kv("bar.gamma", bars.gamma_bar);
  kv("bar.delta", bars.delta_bar);
  os << "potentials.W = " << pot.W_name << "\npotentials.nu = " << pot.nu_name << "\n";
  kv("sup.W1", pot.sup.W1);
  kv("sup.W2", pot.sup.W2);
  kv("sup.W3", pot.sup.W3);
  kv("sup.nu1", pot.sup.nu1);
  kv("sup.nu2", pot.sup.nu2);
  kv("sup.nu3", pot.sup.nu3);
  kv("a", pot.a);
  kv("b", pot.b);
  const auto problems = pot.validate();
  for (const auto& p : problems) os << "assumption: " << p << "\n";
  if (problems.empty()) kv("sigma0", profile::sigma0_integral(pot));

  const Grid& g = cfg.grid;
  const auto lift = lifting_or_zero(g, cfg.bc);
  model::LiftingNorms ln;
  ln.L2 = discrete::l2_norm(g, lift);
  ln.H1 = std::sqrt(ln.L2 * ln.L2 + discrete::grad_sq_T(g, cfg.bc, lift) * g.cell_volume());
  const FieldState s0 = initial_state(cfg);
  const auto rep = model::energy_report(g, s0, pot, h, &lift, model::EntropyPolicy::flag_nan);
  const auto c = model::estimate_constants(h, pot, ln, rep.E1);
  kv("E(0)", rep.E);
  kv("E0(0)", rep.E0);
  kv("E1(0)", rep.E1);
  kv("const.mu", c.mu);
  kv("const.omega", c.omega);
  kv("const.iota", c.iota);
  kv("const.A", c.A);
  kv("const.B", c.B);
  kv("const.C", c.C);
  kv("const.D", c.D);
  kv("t_star_1", c.t_star_1);
  kv("default_dt", pde::default_dt(g, h, pot));
  if (cfg.physical) {
    const auto sc = model::physical_stefan_coefficients(*cfg.physical);
    kv("stefan.kinetic", sc.kinetic);
    kv("stefan.capillary", sc.capillary);
    kv("stefan.undercooling", sc.undercooling);
    kv("stefan.quadratic", sc.quadratic);
  }
  art.text("diagnose.txt", os.str());
  out << os.str();
}

int execute(const RunConfig& cfg, const CommandOptions& opt, std::ostream& out) {
  Artifacts art(opt.out_dir);
  switch (cfg.mode) {
    case Mode::run: do_run(cfg, art, out); break;
    case Mode::profile: do_profile(cfg, art, out); break;
    case Mode::sweep: do_sweep(cfg, opt.jobs, art, out); break;
    case Mode::galerkin: do_galerkin(cfg, art, out); break;
    case Mode::stefan_compare: do_stefan_compare(cfg, art, out); break;
    case Mode::diagnose: do_diagnose(cfg, art, out); break;
  }
  art.text("config.txt", emit_config(cfg));
  art.manifest();
  return exit_ok;
}

std::string escape(const std::string& s) {
  std::string o;
  for (char ch : s) {
    if (ch == '"' || ch == '\\') o += '\\';
    o += ch == '\n' ? ' ' : ch;
  }
  return o;
}

int report(std::ostream& err, const char* cls, int code, const std::string& msg) {
  err << "error class=" << cls << " code=" << code << " message=\"" << escape(msg) << "\"\n";
  return code;
}

}  // namespace

int run_command(const RunConfig& cfg, const CommandOptions& opt, std::ostream& out,
                std::ostream& err) {
  try {
    if (opt.jobs < 1) throw ConfigError("--jobs must be at least 1");
    execute(cfg, opt, out);
    if (opt.seedless) {
      fs::path check = opt.out_dir;
      check += ".determinism";
      fs::remove_all(check);
      std::ostringstream sink;
      CommandOptions again = opt;
      again.out_dir = check;
      execute(cfg, again, sink);
      const bool same =
          io::read_text(opt.out_dir / "manifest") == io::read_text(check / "manifest");
      fs::remove_all(check);
      if (!same)
        return report(err, "determinism", exit_determinism,
                      "a second execution produced a different manifest");
      out << "determinism check passed\n";
    }
    return exit_ok;
  } catch (const ConfigError& e) {
    return report(err, "config", exit_config, e.what());
  } catch (const DomainError& e) {
    return report(err, "domain", exit_domain, e.what());
  } catch (const NumericalError& e) {
    return report(err, "numerical", exit_numerical, e.what());
  } catch (const IoError& e) {
    return report(err, "io", exit_io, e.what());
  } catch (const fs::filesystem_error& e) {
    return report(err, "io", exit_io, e.what());
  } catch (const std::exception& e) {
    return report(err, "internal", exit_internal, e.what());
  }
}

}  // namespace caginalp::cli
