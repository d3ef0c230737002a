#include "caginalp/potentials.hpp"

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <sstream>

#include "caginalp/errors.hpp"

namespace caginalp::model {

namespace {

double binom(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Taylor coefficients of the same polynomial about x = shift.
std::vector<double> recentre(const std::vector<double>& c, double shift) {
  const int n = static_cast<int>(c.size());
  std::vector<double> out(c.size(), 0.0);
  for (int k = 0; k < n; ++k)
    for (int j = k; j < n; ++j) out[k] += c[j] * binom(j, k) * std::pow(shift, j - k);
  return out;
}

// Smoothstep 35s^4 - 84s^5 + 70s^6 - 20s^7 and derivatives in s.
double smooth7(double s, int k) {
  const double s2 = s * s, s3 = s2 * s;
  switch (k) {
    case 0: return s2 * s2 * (35.0 - 84.0 * s + 70.0 * s2 - 20.0 * s3);
    case 1: return s3 * (140.0 - 420.0 * s + 420.0 * s2 - 140.0 * s3);
    case 2: return s2 * (420.0 - 1680.0 * s + 2100.0 * s2 - 840.0 * s3);
    case 3: return s * (840.0 - 5040.0 * s + 8400.0 * s2 - 4200.0 * s3);
    default: return 0.0;
  }
}

constexpr int kSupSamples = 300001;

}  // namespace

Potential::Potential(std::vector<double> monomial_coeffs) : c0_(std::move(monomial_coeffs)) {
  while (!c0_.empty() && c0_.back() == 0.0) c0_.pop_back();
  c1_ = recentre(c0_, 1.0);
  tabulate();
}

void Potential::tabulate() {
  for (int k = 0; k < 4; ++k) {
    auto fold = [k](const std::vector<double>& c) {
      std::vector<double> d;
      for (int j = k; j < static_cast<int>(c.size()); ++j) {
        double fall = 1.0;
        for (int i = 0; i < k; ++i) fall *= (j - i);
        d.push_back(c[j] * fall);
      }
      return d;
    };
    d0_[k] = fold(c0_);
    d1_[k] = fold(c1_);
  }
}

Potential Potential::scaled(double factor) const {
  std::vector<double> c = c0_;
  for (double& v : c) v *= factor;
  return Potential(std::move(c));
}

double Potential::poly(const std::vector<double>& c, double off, int k) const {
  if (k >= 0 && k < 4) {
    const std::vector<double>& d = (&c == &c0_ ? d0_ : d1_)[k];
    double r = 0.0;
    for (std::size_t j = d.size(); j-- > 0;) r = r * off + d[j];
    return r;
  }
  const int n = static_cast<int>(c.size());
  double r = 0.0;
  for (int j = n - 1; j >= k; --j) {
    double fall = 1.0;
    for (int i = 0; i < k; ++i) fall *= (j - i);
    r = r * off + c[j] * fall;
  }
  return r;
}

double Potential::eval_offset(int anchor, double off, int k) const {
  return poly(anchor == 0 ? c0_ : c1_, off, k);
}

double Potential::eval(double x, int k) const {
  if (x >= lo && x <= hi) return x < 0.5 ? poly(c0_, x, k) : poly(c1_, x - 1.0, k);
  return spliced(x, k);
}

double Potential::spliced(double x, int k) const {
  const bool upper = x > hi;
  const double edge = upper ? hi : lo;
  const double c = eval(edge, 0);
  double s = upper ? (x - hi) / band : (lo - x) / band;
  if (s >= 1.0) return k == 0 ? c : 0.0;
  const double sign = upper ? 1.0 : -1.0;
  // m-th x-derivative of S(s(x)).
  double Sd[4];
  for (int m = 0; m <= 3; ++m) Sd[m] = smooth7(s, m) * std::pow(sign / band, m);
  // f = g (1 - S) + c S
  double r = c * Sd[k];
  for (int j = 0; j <= k; ++j) {
    const double g = upper ? poly(c1_, x - 1.0, j) : poly(c0_, x, j);
    const double one_minus = (k - j == 0) ? 1.0 - Sd[0] : -Sd[k - j];
    r += binom(k, j) * g * one_minus;
  }
  return r;
}

double sup_abs(const Potential& p, int k) {
  const double a = Potential::lo - Potential::band;
  const double b = Potential::hi + Potential::band;
  const double step = (b - a) / (kSupSamples - 1);
  double best = 0.0;
  double arg = a;
  for (int i = 0; i < kSupSamples; ++i) {
    const double x = a + i * step;
    const double v = std::abs(p.eval(x, k));
    if (v > best) {
      best = v;
      arg = x;
    }
  }
  if (best == 0.0) return 0.0;
  // polish the sampled maximiser
  auto neg = [&](double x) { return -std::abs(p.eval(x, k)); };
  const double l = std::max(a, arg - step), r = std::min(b, arg + step);
  auto res = boost::math::tools::brent_find_minima(neg, l, r, 52);
  return std::max(best, -res.second);
}

Potential Potentials::named(const std::string& name) {
  if (name == "quartic") return Potential({0.0, 0.0, 1.0, -2.0, 1.0});
  if (name == "smoothstep") return Potential({0.0, 0.0, 3.0, -2.0});
  if (name == "zero") return Potential(std::vector<double>{});
  if (name == "identity") return Potential({0.0, 1.0});
  if (name.rfind("poly:", 0) == 0) {
    std::vector<double> c;
    std::stringstream ss(name.substr(5));
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      try {
        size_t used = 0;
        c.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw DomainError("bad polynomial coefficient '" + tok + "'");
      }
    }
    return Potential(std::move(c));
  }
  throw DomainError("unknown potential '" + name + "'");
}

Potentials Potentials::standard() {
  return make(named("quartic"), named("smoothstep"), "quartic", "smoothstep");
}

Potentials Potentials::make(Potential W, Potential nu, std::string W_name, std::string nu_name) {
  Potentials p;
  p.W = std::move(W);
  p.nu = std::move(nu);
  p.W_name = std::move(W_name);
  p.nu_name = std::move(nu_name);
  p.sup.W1 = sup_abs(p.W, 1);
  p.sup.W2 = sup_abs(p.W, 2);
  p.sup.W3 = sup_abs(p.W, 3);
  p.sup.nu1 = sup_abs(p.nu, 1);
  p.sup.nu2 = sup_abs(p.nu, 2);
  p.sup.nu3 = sup_abs(p.nu, 3);

  // a: sign change of W' strictly inside (0, 1)
  p.a = std::nan("");
  const int n = 4000;
  const double margin = 1e-6;
  for (int i = 0; i < n; ++i) {
    const double x0 = margin + (1.0 - 2 * margin) * i / n;
    const double x1 = margin + (1.0 - 2 * margin) * (i + 1) / n;
    const double f0 = p.W.eval(x0, 1), f1 = p.W.eval(x1, 1);
    if (f0 == 0.0) {
      p.a = x0;
      break;
    }
    if (f0 * f1 < 0.0) {
      auto tol = boost::math::tools::eps_tolerance<double>(50);
      std::uintmax_t it = 100;
      auto r = boost::math::tools::toms748_solve([&](double x) { return p.W.eval(x, 1); }, x0, x1,
                                                 f0, f1, tol, it);
      p.a = 0.5 * (r.first + r.second);
      break;
    }
  }

  // b: smallest argmax of nu' on [0, 1]
  double best = -INFINITY;
  std::vector<int> peaks;
  std::vector<double> vals(n + 1);
  for (int i = 0; i <= n; ++i) vals[i] = p.nu.eval(double(i) / n, 1);
  for (int i = 0; i <= n; ++i) best = std::max(best, vals[i]);
  const double tol = 1e-9 * std::max(1.0, std::abs(best));
  for (int i = 0; i <= n; ++i) {
    const bool local = (i == 0 || vals[i] >= vals[i - 1]) && (i == n || vals[i] >= vals[i + 1]);
    if (local && vals[i] >= best - tol) {
      if (peaks.empty() || i > peaks.back() + 1) peaks.push_back(i);
    }
  }
  p.b_multiple = peaks.size() > 1;
  if (peaks.empty()) {
    p.b = 0.5;
  } else {
    const int i = peaks.front();
    const double l = std::max(0.0, double(i - 1) / n), r = std::min(1.0, double(i + 1) / n);
    auto res = boost::math::tools::brent_find_minima([&](double x) { return -p.nu.eval(x, 1); },
                                                     l, r, 52);
    p.b = res.first;
    // a constant nu' makes every point a maximiser; keep the midpoint then
    if (best - vals[0] < tol && best - vals[n] < tol) {
      p.b = 0.5;
      p.b_multiple = true;
    }
  }
  return p;
}

std::vector<std::string> Potentials::validate() const {
  std::vector<std::string> issues;
  const double tol = 1e-12;
  if (std::abs(W(0.0)) > tol) issues.push_back("W(0) != 0");
  if (std::abs(W(1.0)) > tol) issues.push_back("W(1) != 0");
  if (std::abs(W.eval(0.0, 1)) > tol) issues.push_back("W'(0) != 0");
  if (std::abs(W.eval(1.0, 1)) > tol) issues.push_back("W'(1) != 0");
  if (!(a > 0.0 && a < 1.0)) issues.push_back("W' has no root in (0,1)");
  if (std::abs(nu(0.0)) > tol) issues.push_back("nu(0) != 0");
  if (std::abs(nu(1.0) - 1.0) > tol) issues.push_back("nu(1) != 1");
  if (std::abs(nu.eval(0.0, 1)) > tol) issues.push_back("nu'(0) != 0");
  if (std::abs(nu.eval(1.0, 1)) > tol) issues.push_back("nu'(1) != 0");
  const int n = 2000;
  bool w_neg = false, w_pos_inside = true, nu_dec = false;
  for (int i = 0; i <= n; ++i) {
    const double x = double(i) / n;
    if (W(x) < -tol) w_neg = true;
    if (i > 0 && i < n && !(W(x) > 0.0)) w_pos_inside = false;
    if (nu.eval(x, 1) < -tol) nu_dec = true;
  }
  for (int i = 0; i <= 3 * n; ++i) {
    const double x = -1.0 + 3.0 * i / (3 * n);
    if (W(x) < -tol) w_neg = true;
  }
  if (w_neg) issues.push_back("W takes negative values");
  if (!w_pos_inside) issues.push_back("W vanishes inside (0,1)");
  if (nu_dec) issues.push_back("nu' negative on [0,1]");
  if (b_multiple) issues.push_back("nu' has several maximisers on [0,1]");
  return issues;
}

}  // namespace caginalp::model
