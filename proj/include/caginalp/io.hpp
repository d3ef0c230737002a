#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "caginalp/galerkin.hpp"
#include "caginalp/grid.hpp"
#include "caginalp/pde.hpp"
#include "caginalp/profile.hpp"
#include "caginalp/stefan.hpp"

namespace caginalp::io {

/// 17 significant digits, dot decimal separator regardless of locale.
std::string fmt(double v);
/// Shortest text that parses back to the same double.
std::string fmt_short(double v);
/// Locale-independent strict parse; throws std::invalid_argument.
double parse_double(const std::string& s);

/// Lines: dim, "nx [ny]", "dx [dy]", time, then phi and T row-major.
void write_snapshot(const std::filesystem::path& path, const Grid& g, const FieldState& s);
FieldState read_snapshot(const std::filesystem::path& path, Grid* grid_out = nullptr);

std::string diagnostics_csv(const std::vector<pde::DiagnosticsRecord>& recs);
std::string sweep_csv(const stefan::EpsSweepReport& rep);
std::string galerkin_csv(const galerkin::Trajectory& tr);
std::string profile_text(const profile::ProfileSolution& sol);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

}  // namespace caginalp::io
