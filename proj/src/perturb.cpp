#include "perturb.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <set>

namespace bandgs {

namespace {

constexpr double kPi = std::numbers::pi;

int scaled_count(double base, double kd, double coeff, double min_count) {
  const double n = coeff * kd + 4.0 * std::cbrt(kd) + base;
  return static_cast<int>(std::ceil(std::max(n, min_count)));
}

}  // namespace

namespace detail {

GaussRule gauss_legendre(int n) {
  require(n >= 1, "Gauss-Legendre rule needs at least one node");
  // Returns P_n(x) and P_n'(x) by the three-term recurrence.
  auto legendre = [n](double x) {
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    return std::pair{p1, n * (x * p1 - p0) / (x * x - 1.0)};
  };
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = legendre(x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double dp = legendre(x).second;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

}  // namespace detail

void PerturbationSpec::validate() const {
  if (background.empty()) fail(ErrorCode::InvalidPerturbation, "perturbation needs a background");
  std::set<std::pair<std::size_t, Coeffs>> seen;
  for (const auto& p : removed) {
    if (p.component >= background.size())
      fail(ErrorCode::InvalidPerturbation,
           "removed point refers to component " + std::to_string(p.component) +
               " of a union with " + std::to_string(background.size()));
    Coeffs c = p.coeffs;
    for (int k = background.dim(); k < 3; ++k)
      if (c[k] != 0)
        fail(ErrorCode::InvalidPerturbation, "removed point has coordinates beyond the dimension");
    if (!seen.insert({p.component, c}).second)
      fail(ErrorCode::InvalidPerturbation, "removed point listed twice");
  }
  for (const auto& r : added) {
    if (!r.allFinite()) fail(ErrorCode::InvalidPerturbation, "replacement point is not finite");
    for (int k = background.dim(); k < 3; ++k)
      if (r[k] != 0.0)
        fail(ErrorCode::InvalidPerturbation, "replacement point has coordinates beyond the dimension");
  }
  if (number_preserving && removed.size() != added.size())
    fail(ErrorCode::InvalidPerturbation,
         "number-preserving perturbation must replace as many points as it removes");
}

std::vector<Vec3> PerturbationSpec::removed_positions() const {
  std::vector<Vec3> out;
  out.reserve(removed.size());
  for (const auto& p : removed) out.push_back(background.point(p.component, p.coeffs));
  return out;
}

double PerturbationSpec::diameter() const {
  auto pts = removed_positions();
  pts.insert(pts.end(), added.begin(), added.end());
  double d = 0.0;
  for (std::size_t a = 0; a < pts.size(); ++a)
    for (std::size_t b = a + 1; b < pts.size(); ++b) d = std::max(d, (pts[a] - pts[b]).norm());
  return d;
}

double delta_u_fourier(const RadialBandLimitedPotential& pot, const PerturbationSpec& spec,
                       double mu) {
  spec.validate();
  const auto& x = spec.background;
  require(pot.dim() == x.dim(), "potential and background dimensions differ");
  for (const auto& c : x.components())
    if (c.lattice.dual_shortest_length() < pot.k0() * (1.0 - 1e-10))
      fail(ErrorCode::DualTermNonzero,
           "a background component has dual points inside |K| < K0; the lattice term of the "
           "quadratic form does not vanish");
  for (const auto& c : x.components()) dual_points_in_band(pot, c.lattice);  // shell check

  const int d = x.dim();
  const double k0 = pot.k0();
  const double rho = x.density();
  const double n_xf = static_cast<double>(spec.removed.size());
  const double n_r = static_cast<double>(spec.added.size());
  const double linear =
      (n_xf - n_r) * (mu + 0.5 * pot.phi_at_origin() - pot.phi_hat_at_zero() * rho);

  // Points with their sign in S_R - S_Xf, centred to keep phases small.
  std::vector<Vec3> pts;
  std::vector<double> sign;
  for (const auto& p : spec.added) pts.push_back(p), sign.push_back(1.0);
  for (const auto& p : spec.removed_positions()) pts.push_back(p), sign.push_back(-1.0);
  if (pts.empty()) return linear;
  Vec3 centre = Vec3::Zero();
  for (const auto& p : pts) centre += p;
  centre /= static_cast<double>(pts.size());
  for (auto& p : pts) p -= centre;

  auto power = [&](const Vec3& k) {
    std::complex<double> s{0.0, 0.0};
    for (std::size_t a = 0; a < pts.size(); ++a) s += sign[a] * std::polar(1.0, k.dot(pts[a]));
    return std::norm(s);
  };

  const double kd = k0 * spec.diameter();
  const int n_radial = scaled_count(16.0, kd, 0.5, 64.0);

  // Radial pieces split at profile kinks.
  std::vector<double> breaks{0.0};
  breaks.insert(breaks.end(), pot.kinks().begin(), pot.kinks().end());
  breaks.push_back(k0);
  const auto radial = detail::gauss_legendre(n_radial);

  const int n_theta = scaled_count(12.0, kd, 0.5, 16.0);
  const auto polar = detail::gauss_legendre(n_theta);

  detail::Accumulator acc;
  auto angular = [&](double k) -> double {
    switch (d) {
      case 1: return power(Vec3(k, 0, 0)) + power(Vec3(-k, 0, 0));
      case 2: {
        const int n_phi = scaled_count(16.0, kd, 1.0, 64.0);
        double s = 0.0;
        for (int i = 0; i < n_phi; ++i) {
          const double t = 2.0 * kPi * i / n_phi;
          s += power(Vec3(k * std::cos(t), k * std::sin(t), 0.0));
        }
        return s * 2.0 * kPi / n_phi;
      }
      default: {
        const int n_phi = scaled_count(16.0, kd, 1.0, 32.0);
        double s = 0.0;
        for (int a = 0; a < n_theta; ++a) {
          const double ct = polar.nodes[a];
          const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
          double ring = 0.0;
          for (int i = 0; i < n_phi; ++i) {
            const double t = 2.0 * kPi * i / n_phi;
            ring += power(Vec3(k * st * std::cos(t), k * st * std::sin(t), k * ct));
          }
          s += polar.weights[a] * ring * 2.0 * kPi / n_phi;
        }
        return s;
      }
    }
  };

  for (std::size_t piece = 0; piece + 1 < breaks.size(); ++piece) {
    const double lo = breaks[piece], hi = breaks[piece + 1];
    const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
    for (int i = 0; i < n_radial; ++i) {
      const double k = mid + half * radial.nodes[i];
      const double w = pot.phi_hat(k);
      if (w == 0.0) continue;
      acc.add(radial.weights[i] * half * w * std::pow(k, d - 1) * angular(k));
    }
  }
  const double quad = acc.value() / (2.0 * std::pow(2.0 * kPi, d));
  return linear + quad;
}

double delta_u_direct(const RadialBandLimitedPotential& pot, const PerturbationSpec& spec,
                      double mu, const TemperingSchedule& schedule, BackgroundMethod background) {
  spec.validate();
  const auto& x = spec.background;
  require(pot.dim() == x.dim(), "potential and background dimensions differ");
  const auto xf = spec.removed_positions();
  const auto& r = spec.added;

  auto full_sum = [&](const Vec3& p) {
    detail::Accumulator acc;
    for (const auto& c : x.components())
      acc.add(background == BackgroundMethod::Fourier
                  ? fourier_sum(pot, c.lattice, p - c.shift)
                  : tempered_limit(pot, c.lattice, p - c.shift, schedule));
    return acc.value();
  };
  auto phi = [&](const Vec3& a, const Vec3& b) { return pot.phi((a - b).norm()); };

  // U(A | X \ X_f) = pair energy within A + sum_a [I(a, X) - sum_{x in X_f} phi(a - x)]
  auto conditional = [&](const std::vector<Vec3>& a) {
    detail::Accumulator acc;
    for (std::size_t i = 0; i < a.size(); ++i) {
      for (std::size_t j = i + 1; j < a.size(); ++j) acc.add(phi(a[i], a[j]));
      acc.add(full_sum(a[i]));
      for (const auto& f : xf) acc.add(-phi(a[i], f));
    }
    return acc.value();
  };

  const double n_r = static_cast<double>(r.size());
  const double n_xf = static_cast<double>(xf.size());
  return (conditional(r) - mu * n_r) - (conditional(xf) - mu * n_xf);
}

MetastabilityVerdict metastability_compare(const RadialBandLimitedPotential& pot,
                                           const LatticeUnion& x, const LatticeUnion& y) {
  MetastabilityVerdict v;
  const double rx = x.density(), ry = y.density();
  v.same_density = std::abs(rx - ry) <= 1e-10 * rx;
  v.e_x = union_energy_density(pot, x).e_x;
  v.e_y = union_energy_density(pot, y).e_x;
  v.x_excluded = v.same_density && v.e_x > v.e_y + 1e-10 * std::abs(v.e_y);
  return v;
}

PerturbationSpec random_spec(const LatticeUnion& background, std::mt19937_64& rng,
                             const RandomSpecOptions& options) {
  require(!background.empty(), "random perturbation needs a background");
  require(options.removed >= 0 && options.added >= 0, "point counts must be nonnegative");
  require(options.reach >= 0, "reach must be nonnegative");
  const int d = background.dim();
  const long span = 2 * options.reach + 1;
  long cells = 1;
  for (int k = 0; k < d; ++k) cells *= span;
  require(static_cast<long>(options.removed) <= cells * static_cast<long>(background.size()),
          "not enough lattice points within reach");

  auto pick = [&](long n) { return static_cast<long>(uniform01(rng) * static_cast<double>(n)); };

  PerturbationSpec spec;
  spec.background = background;
  spec.number_preserving = options.removed == options.added;
  std::set<std::pair<std::size_t, Coeffs>> used;
  while (static_cast<int>(spec.removed.size()) < options.removed) {
    RemovedPoint p;
    p.component = static_cast<std::size_t>(pick(static_cast<long>(background.size())));
    for (int k = 0; k < d; ++k) p.coeffs[k] = pick(span) - options.reach;
    if (used.insert({p.component, p.coeffs}).second) spec.removed.push_back(p);
  }

  double rb = std::numeric_limits<double>::infinity();
  for (const auto& c : background.components()) rb = std::min(rb, c.lattice.shortest_length());
  const auto xf = spec.removed_positions();
  Vec3 centre = Vec3::Zero();
  double extent = rb;
  if (!xf.empty()) {
    for (const auto& p : xf) centre += p;
    centre /= static_cast<double>(xf.size());
    for (const auto& p : xf) extent = std::max(extent, (p - centre).norm() + 0.5 * rb);
  }

  auto in_ball = [&](double radius) {
    Vec3 v = Vec3::Zero();
    for (;;) {
      for (int k = 0; k < d; ++k) v[k] = 2.0 * uniform01(rng) - 1.0;
      if (v.squaredNorm() <= 1.0) return Vec3(radius * v);
    }
  };
  for (int i = 0; i < options.added; ++i) {
    const bool jitter = !xf.empty() && uniform01(rng) < options.jitter_fraction;
    if (jitter) {
      const auto& base = xf[static_cast<std::size_t>(pick(static_cast<long>(xf.size())))];
      spec.added.push_back(base + in_ball(options.jitter * rb));
    } else {
      spec.added.push_back(centre + in_ball(extent));
    }
  }
  return spec;
}

}  // namespace bandgs
