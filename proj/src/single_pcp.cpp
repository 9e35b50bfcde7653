#include "d2d/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace d2d::analytic {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

int cells_for(double length, double step) {
  return std::max(1, static_cast<int>(std::ceil(length / step - 1e-9)));
}

std::vector<double> uniform_grid(double length, double step) {
  const int n = cells_for(length, step);
  std::vector<double> g(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) g[static_cast<std::size_t>(i)] = length * i / n;
  g.back() = length;
  return g;
}
}  // namespace

MixedDistribution time_limit_law(double tau_c, double tau_s, double dphi) {
  if (!(dphi > 0)) throw std::invalid_argument("grid resolution must be > 0");
  if (tau_c < 0) throw std::invalid_argument("content timeout must be >= 0");
  if (tau_c >= tau_s) throw std::invalid_argument("time-limit law requires tau_c < tau_s");
  if (tau_c == 0) return MixedDistribution::point_mass(0.0);
  auto grid = uniform_grid(tau_c, dphi);
  std::vector<double> dens(grid.size(), 1.0 / tau_s);
  return MixedDistribution({{tau_c, 1.0 - tau_c / tau_s}}, std::move(grid), std::move(dens));
}

double time_limit_mean(double tau_c, double tau_s) {
  if (tau_c >= tau_s) throw std::invalid_argument("time-limit law requires tau_c < tau_s");
  return tau_c - tau_c * tau_c / (2.0 * tau_s);
}

double relative_speed_density(double v, double va, const SpeedLaw& law) { return law.pdf(v + va); }

// ---- RelativeSpeed ----

RelativeSpeed::RelativeSpeed(const SpeedLaw& law, double va) : law_(&law), va_(va) {
  for (const auto& s : law.segments()) seg_.push_back({s.lo - va, s.hi - va, s.density});
}

double RelativeSpeed::pdf(double v) const { return law_->pdf(v + va_); }

double RelativeSpeed::mass(double lo, double hi) const {
  double m = 0;
  for (const auto& s : seg_) {
    const double a = std::max(lo, s.lo), b = std::min(hi, s.hi);
    if (b > a) m += s.density * (b - a);
  }
  return m;
}

double RelativeSpeed::cdf(double w) const { return mass(-kInf, w); }

// ---- ClosingLaw ----

ClosingLaw::ClosingLaw(const RelativeSpeed& rel, bool ahead, double tau_c, double tau_s)
    : rel_(&rel), ahead_(ahead), tau_c_(tau_c), tau_s_(tau_s) {
  for (const auto& s : rel.segments()) {
    if (ahead && s.lo < 0) {
      pieces_.push_back({std::max(-s.hi, 0.0), -s.lo, s.density});
    } else if (!ahead && s.hi > 0) {
      pieces_.push_back({std::max(s.lo, 0.0), s.hi, s.density});
    }
  }
  std::sort(pieces_.begin(), pieces_.end(), [](const Piece& x, const Piece& y) { return x.a < y.a; });
}

double ClosingLaw::total() const {
  double m = 0;
  for (const auto& p : pieces_) m += p.c * (p.b - p.a);
  return m;
}

double ClosingLaw::density(double u) const { return rel_->pdf(ahead_ ? -u : u); }

double ClosingLaw::inverse_tail(double u) const {
  double s = 0;
  for (const auto& p : pieces_) {
    const double m = std::max(p.a, u);
    if (p.b <= m) continue;
    if (m <= 0) return kInf;
    s += p.c * std::log(p.b / m);
  }
  return s;
}

double ClosingLaw::H(double d) const {
  if (d <= 0) return total();
  if (tau_c_ <= 0) return 0.0;
  const double u0 = d / tau_c_;
  double h = 0;
  for (const auto& p : pieces_) {
    const double m = std::max(p.a, u0);
    if (p.b <= m) continue;
    h += p.c * ((p.b - m) - (d / tau_s_) * std::log(p.b / m));
  }
  return h;
}

double ClosingLaw::K(double D) const {
  if (D <= 0 || tau_c_ <= 0) return 0.0;
  auto J = [](double u, double b) { return u > 0 ? 0.5 * u * u * std::log(b / u) + 0.25 * u * u : 0.0; };
  double k = 0;
  for (const auto& p : pieces_) {
    const double Dp = std::min(D, p.b * tau_c_);
    const double D1 = std::min(Dp, p.a * tau_c_);
    if (D1 > 0) k += p.c * ((p.b - p.a) * D1 - D1 * D1 / (2 * tau_s_) * std::log(p.b / p.a));
    if (Dp > p.a * tau_c_) {
      const double u1 = p.a, u2 = Dp / tau_c_;
      k += p.c * (tau_c_ * (p.b * (u2 - u1) - 0.5 * (u2 * u2 - u1 * u1)) -
                  tau_c_ * tau_c_ / tau_s_ * (J(u2, p.b) - J(u1, p.b)));
    }
  }
  return k;
}

// ---- single PCP law, closing-speed route ----

namespace {
void check_single_pcp_args(double va, double tau_c, double tau_s, double dr) {
  if (!(dr > 0)) throw std::invalid_argument("grid resolution must be > 0");
  if (!(va > 0)) throw std::invalid_argument("requester speed must be > 0");
  if (tau_c < 0 || tau_c >= tau_s) throw std::invalid_argument("requires 0 <= tau_c < tau_s");
}

/// Uniform grid on [0, d], with each jump of the density (closing speed at a boundary of the
/// relative-speed support) bracketed by two nodes a hair apart so the jump is carried exactly.
std::vector<double> law_grid(double d, double dr, const RelativeSpeed& rel, double tau_c) {
  auto g = uniform_grid(d, dr);
  const double eps = 1e-9 * std::max(1.0, d);
  std::vector<double> jumps;
  for (const auto& s : rel.segments())
    for (double b : {s.lo, s.hi}) {
      const double r = d - tau_c * std::abs(b);
      if (r > 4 * eps && r < d - 4 * eps) jumps.push_back(r);
    }
  for (double r : jumps) {
    g.erase(std::remove_if(g.begin(), g.end(), [&](double x) { return std::abs(x - r) <= 2 * eps; }), g.end());
    g.push_back(r - eps);
    g.push_back(r + eps);
  }
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  return g;
}

/// Last-node value chosen so the final cell carries `mass` exactly; absorbs the
/// logarithmic singularity at vanishing closing speed.
double closing_node(double mass, double h, double previous) { return std::max(0.0, 2.0 * mass / h - previous); }
}  // namespace

MixedDistribution single_pcp_distance_law(double x0, double va, const SpeedLaw& law, double tau_c,
                                          double tau_s, double dr) {
  check_single_pcp_args(va, tau_c, tau_s, dr);
  if (x0 == 0) return MixedDistribution::point_mass(0.0);
  const double d = std::abs(x0);
  if (tau_c == 0) return MixedDistribution::point_mass(d);

  const RelativeSpeed rel(law, va);
  const ClosingLaw cl(rel, x0 > 0, tau_c, tau_s);
  auto grid = law_grid(d, dr, rel, tau_c);
  const std::size_t n = grid.size() - 1;
  std::vector<double> dens(grid.size());
  const double point = 1.0 / tau_c - 1.0 / tau_s;
  for (std::size_t i = 0; i < n; ++i) {
    const double u = (d - grid[i]) / tau_c;
    dens[i] = cl.inverse_tail(u) / tau_s + point * cl.density(u);
  }
  const double last = d - grid[n - 1];
  dens[n] = closing_node(cl.H(0) - cl.H(last), grid[n] - grid[n - 1], dens[n - 1]);
  return MixedDistribution({{0.0, cl.H(d)}, {d, 1.0 - cl.total()}}, std::move(grid), std::move(dens));
}

// ---- single PCP law, displacement route ----

namespace {

/// Displacement Δ = VΦ of the relative position, in the frame where the PCP is ahead
/// (closing means Δ < 0). Built directly over the relative-speed pieces, integrating in Φ.
class Displacement {
 public:
  Displacement(const RelativeSpeed& rel, bool mirror, double tau_c, double tau_s)
      : tau_c_(tau_c), tau_s_(tau_s) {
    for (const auto& s : rel.segments()) {
      if (mirror)
        seg_.push_back({-s.hi, -s.lo, s.density});
      else
        seg_.push_back(s);
    }
    std::sort(seg_.begin(), seg_.end(), [](auto& a, auto& b) { return a.lo < b.lo; });
  }

  double f(double w) const {
    for (const auto& s : seg_)
      if (w >= s.lo && w <= s.hi) return s.density;
    return 0.0;
  }

  /// P(V <= w)
  double G(double w) const {
    double m = 0;
    for (const auto& s : seg_) {
      if (w <= s.lo) break;
      m += s.density * (std::min(w, s.hi) - s.lo);
    }
    return m;
  }

  double mass_nonnegative() const {
    double m = 0;
    for (const auto& s : seg_)
      if (s.hi > 0) m += s.density * (s.hi - std::max(s.lo, 0.0));
    return m;
  }

  /// ∫_0^τc f(δ/φ)/φ dφ for δ < 0
  double J(double delta) const {
    double s = 0;
    for (const auto& g : seg_) {
      if (g.lo >= 0) continue;
      const double lo = delta / g.lo;
      const double hi = g.hi < 0 ? delta / g.hi : kInf;
      const double a = std::max(lo, 0.0), b = std::min(hi, tau_c_);
      if (b > a) s += g.density * std::log(b / a);
    }
    return s;
  }

  /// Density of Δ at δ < 0
  double pdf(double delta) const { return J(delta) / tau_s_ + (1.0 / tau_c_ - 1.0 / tau_s_) * f(delta / tau_c_); }

  /// P(Δ <= δ) for δ < 0, integrating over Φ first.
  double cdf(double delta) const {
    const double W = delta / tau_c_;
    // ∫_{-∞}^{W} G(w)/w² dw with G piecewise linear
    double integral = 0, Gcum = 0, prev = -kInf;
    auto flat = [&](double w1, double w2, double level) {
      if (level == 0 || w2 <= w1) return;
      integral += level * ((std::isinf(w1) ? 0.0 : 1.0 / w1) - 1.0 / w2);
    };
    for (const auto& g : seg_) {
      if (prev >= W) break;
      flat(prev, std::min(g.lo, W), Gcum);
      const double a = g.lo, b = std::min(g.hi, W);
      if (b > a) {
        const double A = Gcum - g.density * g.lo;
        integral += A * (1.0 / a - 1.0 / b) + g.density * std::log(std::abs(b) / std::abs(a));
      }
      Gcum += g.density * (g.hi - g.lo);
      prev = g.hi;
    }
    if (prev < W) flat(prev, W, Gcum);
    return std::abs(delta) * integral / tau_s_ + (1.0 - tau_c_ / tau_s_) * G(W);
  }

 private:
  double tau_c_, tau_s_;
  std::vector<SpeedLaw::Segment> seg_;
};

}  // namespace

MixedDistribution single_pcp_distance_law_from_displacement(double x0, double va, const SpeedLaw& law,
                                                            double tau_c, double tau_s, double dr) {
  check_single_pcp_args(va, tau_c, tau_s, dr);
  if (x0 == 0) return MixedDistribution::point_mass(0.0);
  const double d = std::abs(x0);
  if (tau_c == 0) return MixedDistribution::point_mass(d);

  const RelativeSpeed rel(law, va);
  const Displacement disp(rel, x0 < 0, tau_c, tau_s);
  auto grid = law_grid(d, dr, rel, tau_c);
  const std::size_t n = grid.size() - 1;
  std::vector<double> dens(grid.size());
  // δ = r − d in the ahead frame
  for (std::size_t i = 0; i < n; ++i) dens[i] = disp.pdf(grid[i] - d);
  const double closing = disp.G(0.0);
  dens[n] = closing_node(closing - disp.cdf(grid[n - 1] - d), grid[n] - grid[n - 1], dens[n - 1]);
  return MixedDistribution({{0.0, disp.cdf(-d)}, {d, disp.mass_nonnegative()}}, std::move(grid),
                           std::move(dens));
}

std::vector<double> single_pcp_distance_samples(double x0, double va, const SpeedLaw& law, double tau_c,
                                                double tau_s, std::size_t n, Rng& rng) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<double> out(n);
  for (auto& r : out) {
    const double s = law.sample_magnitude(rng);
    const double v = (U(rng) < 0.5 ? s : -s) - va;
    const double phi = std::min(tau_c, tau_s * U(rng));
    const double t = v != 0 && x0 * v < 0 ? std::min(phi, -x0 / v) : 0.0;
    r = std::abs(x0 + v * t);
  }
  return out;
}

}  // namespace d2d::analytic
