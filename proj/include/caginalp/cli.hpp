#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "caginalp/grid.hpp"
#include "caginalp/params.hpp"
#include "caginalp/pde.hpp"
#include "caginalp/stefan.hpp"

namespace caginalp::cli {

enum class Mode { run, profile, sweep, galerkin, stefan_compare, diagnose };

std::string mode_name(Mode m);
Mode mode_from_name(const std::string& s);

enum class InitKind { pure, front, bubble, cosine, file };

struct InitSpec {
  InitKind kind = InitKind::pure;
  double phi = 1.0;            // pure
  bool T_lifting = true;       // T starts at the lifting, else at T_value
  double T_value = 0.0;
  double front = 0.5;          // front: phi = phi0(orientation (x - front)/eps)
  int orientation = 1;
  double radius = 0.3;         // bubble: liquid disc at the origin
  double phi_mean = 0.5;       // cosine: phi_mean + phi_amp cos(pi x)
  double phi_amp = 0.3;
  double T_amp = 0.0;          // cosine: adds T_amp times the first T mode
  double noise = 0.0;          // uniform noise amplitude on phi and T
  unsigned long seed = 1;
  std::string file;
  bool operator==(const InitSpec&) const = default;
};

struct TimeSpec {
  double dt = 0.0;  // 0: pde::default_dt
  double t_end = 0.0;
  int diag_every = 1;
  int snapshot_every = 0;  // 0: initial and final only
  pde::Scheme scheme = pde::Scheme::imex_trapezoid;
  pde::Mode mode = pde::Mode::full;
  bool operator==(const TimeSpec&) const = default;
};

struct GalerkinSpec {
  int n = 32;
  double dt = 1e-4;
  int sample_every = 100;
  bool operator==(const GalerkinSpec&) const = default;
};

struct SweepSpec {
  std::vector<double> eps{0.08, 0.04, 0.02, 0.01};
  stefan::Scenario scenario = stefan::Scenario::planar_1d;
  stefan::PlanarScenario planar;
  stefan::RadialScenario radial;
  bool operator==(const SweepSpec&) const = default;
};

struct StefanSpec {
  int nodes = 200;
  double quadratic = 2.0;
  bool operator==(const StefanSpec&) const = default;
};

struct RunConfig {
  Mode mode = Mode::run;
  std::optional<model::PhysicalParams> physical;
  std::optional<model::NondimParams> nondim;
  std::optional<model::HatParams> hat;
  std::string W = "quartic";
  std::string nu = "smoothstep";
  Grid grid = Grid::line(256, 1.0);
  BoundarySpec bc;
  InitSpec init;
  TimeSpec time;
  GalerkinSpec galerkin;
  SweepSpec sweep;
  StefanSpec stefan;
  bool operator==(const RunConfig&) const = default;
};

/// Flat `section.key = value` lines; `#` starts a comment.
RunConfig parse_config_text(const std::string& text, const std::filesystem::path& base = {});
RunConfig parse_config(const std::filesystem::path& path);
/// Text that parse_config_text maps back to an equal RunConfig.
std::string emit_config(const RunConfig& cfg);
/// Key reference with defaults, for --help.
std::string config_reference();

/// HatParams from whichever chart the config carries.
model::HatParams resolved_hat(const RunConfig& cfg);

struct CommandOptions {
  std::filesystem::path out_dir = "out";
  int jobs = 1;
  bool seedless = false;  // run twice and require identical manifests
};

enum ExitCode {
  exit_ok = 0,
  exit_internal = 1,
  exit_config = 2,
  exit_domain = 3,
  exit_numerical = 4,
  exit_io = 5,
  exit_determinism = 6,
};

/// Executes the configured mode, writes artifacts and a `manifest` of
/// SHA-256 hashes into out_dir. Errors are reported on `err` as one line
/// `error class=<name> code=<n> message="..."` and mapped to an exit code.
int run_command(const RunConfig& cfg, const CommandOptions& opt, std::ostream& out,
                std::ostream& err);

/// Initial state described by cfg.init on cfg.grid.
FieldState initial_state(const RunConfig& cfg);

}  // namespace caginalp::cli
