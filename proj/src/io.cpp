#include "caginalp/io.hpp"

#include <openssl/evp.h>

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "caginalp/errors.hpp"

namespace caginalp::io {

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 64> buf;
  auto r = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 17);
  return {buf.data(), r.ptr};
}

std::string fmt_short(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 64> buf;
  auto r = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return {buf.data(), r.ptr};
}

double parse_double(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  std::size_t b = s.find_last_not_of(" \t\r");
  if (a == std::string::npos) throw std::invalid_argument("empty number");
  const std::string t = s.substr(a, b - a + 1);
  if (t == "nan") return std::nan("");
  if (t == "inf") return INFINITY;
  if (t == "-inf") return -INFINITY;
  double v = 0.0;
  const char* first = t.data();
  if (*first == '+') ++first;
  auto r = std::from_chars(first, t.data() + t.size(), v);
  if (r.ec != std::errc() || r.ptr != t.data() + t.size())
    throw std::invalid_argument("not a number: '" + t + "'");
  return v;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  f << text;
  if (!f) throw IoError("write failed: " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path.string());
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

void write_snapshot(const std::filesystem::path& path, const Grid& g, const FieldState& s) {
  check_shape(g, s);
  std::string out;
  out += std::to_string(g.dim) + "\n";
  out += g.dim == 2 ? std::to_string(g.nx) + " " + std::to_string(g.ny) + "\n"
                    : std::to_string(g.nx) + "\n";
  out += g.dim == 2 ? fmt(g.dx()) + " " + fmt(g.dy()) + "\n" : fmt(g.dx()) + "\n";
  out += fmt(s.time) + "\n";
  for (double v : s.phi) out += fmt(v) + "\n";
  for (double v : s.T) out += fmt(v) + "\n";
  write_text(path, out);
}

FieldState read_snapshot(const std::filesystem::path& path, Grid* grid_out) {
  std::istringstream in(read_text(path));
  std::string line;
  auto next = [&](const char* what) {
    if (!std::getline(in, line)) throw IoError(path.string() + ": missing " + what);
    return line;
  };
  auto fields = [](const std::string& l) {
    std::istringstream ls(l);
    std::vector<std::string> v;
    std::string t;
    while (ls >> t) v.push_back(t);
    return v;
  };
  try {
    const int dim = std::stoi(next("dim"));
    if (dim != 1 && dim != 2) throw IoError(path.string() + ": dim must be 1 or 2");
    const auto n = fields(next("cell counts"));
    const auto d = fields(next("spacings"));
    if (static_cast<int>(n.size()) != dim || static_cast<int>(d.size()) != dim)
      throw IoError(path.string() + ": header does not match dim");
    Grid g = dim == 1 ? Grid::line(std::stoi(n[0]), std::stoi(n[0]) * parse_double(d[0]))
                      : Grid::rect(std::stoi(n[0]), std::stoi(n[1]),
                                   std::stoi(n[0]) * parse_double(d[0]),
                                   std::stoi(n[1]) * parse_double(d[1]));
    FieldState s;
    s.time = parse_double(next("time"));
    s.phi.resize(g.size());
    s.T.resize(g.size());
    for (auto& v : s.phi) v = parse_double(next("phi values"));
    for (auto& v : s.T) v = parse_double(next("T values"));
    if (grid_out) *grid_out = g;
    return s;
  } catch (const std::invalid_argument& e) {
    throw IoError(path.string() + ": " + e.what());
  } catch (const std::out_of_range& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

std::string diagnostics_csv(const std::vector<pde::DiagnosticsRecord>& recs) {
  std::string out =
      "time,E,E0,E1,S,energy_residual,entropy_prod_conduction,entropy_prod_mobility,"
      "caginalp_residual\n";
  for (const auto& r : recs) {
    out += fmt(r.time) + "," + fmt(r.energy.E) + "," + fmt(r.energy.E0) + "," + fmt(r.energy.E1) +
           "," + fmt(r.energy.S) + "," + fmt(r.energy_residual) + "," +
           fmt(r.entropy_prod_conduction) + "," + fmt(r.entropy_prod_mobility) + "," +
           fmt(r.caginalp_residual) + "\n";
  }
  return out;
}

std::string sweep_csv(const stefan::EpsSweepReport& rep) {
  std::string out = "eps,v,H,T_interface,T_weighted,jump,gt_defect,jump_defect,linear_jump_defect\n";
  for (const auto& r : rep.rows) {
    out += fmt(r.eps) + "," + fmt(r.m.v) + "," + fmt(r.m.H) + "," + fmt(r.m.T_interface) + "," +
           fmt(r.m.T_weighted) + "," + fmt(r.m.jump) + "," + fmt(r.res.gibbs_thomson_defect) + "," +
           fmt(r.res.jump_defect) + "," + fmt(r.res.linear_jump_defect) + "\n";
  }
  return out;
}

std::string galerkin_csv(const galerkin::Trajectory& tr) {
  std::string out = "time";
  const std::size_t n = tr.samples.empty() ? 0 : tr.samples.front().m.a.size();
  for (std::size_t i = 1; i <= n; ++i) out += ",a_" + std::to_string(i);
  for (std::size_t i = 1; i <= n; ++i) out += ",b_" + std::to_string(i);
  out += ",E,E0,E1,r\n";
  for (const auto& s : tr.samples) {
    out += fmt(s.time);
    for (double v : s.m.a) out += "," + fmt(v);
    for (double v : s.m.b) out += "," + fmt(v);
    out += "," + fmt(s.energy.E) + "," + fmt(s.energy.E0) + "," + fmt(s.energy.E1) + "," +
           fmt(s.r) + "\n";
  }
  return out;
}

std::string profile_text(const profile::ProfileSolution& sol) {
  std::string out;
  for (std::size_t j = 0; j < sol.z.size(); ++j) out += fmt(sol.z[j]) + " " + fmt(sol.phi0[j]) + "\n";
  return out;
}

std::string sha256_file(const std::filesystem::path& path) {
  const std::string data = read_text(path);
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw IoError("sha256 failed for " + path.string());
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

}  // namespace caginalp::io
