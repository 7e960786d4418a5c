#include "latsum.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace bandgs {

namespace {

constexpr double kPi = std::numbers::pi;

double sphere_area(int dim) {
  switch (dim) {
    case 1: return 2.0;
    case 2: return 2.0 * kPi;
    default: return 4.0 * kPi;
  }
}

double ball_volume(int dim, double radius) {
  switch (dim) {
    case 1: return 2.0 * radius;
    case 2: return kPi * radius * radius;
    default: return 4.0 / 3.0 * kPi * radius * radius * radius;
  }
}

// Every point of space lies within this distance of a lattice point.
double covering_bound(const BravaisLattice& lattice) {
  const auto& en = lattice.enumerator();
  double d = 0.0;
  for (int k = 0; k < en.dim; ++k) d += en.reduced.col(k).norm();
  return 0.5 * d;
}

Vec3 clean(const BravaisLattice& lattice, const Vec3& r) {
  Vec3 out = r;
  for (int k = lattice.dim(); k < 3; ++k) out[k] = 0.0;
  return out;
}

// Polynomial extrapolation to h = 0 through the trailing points (h_i, v_i).
double extrapolate(const std::vector<double>& h, const std::vector<double>& v, int order) {
  const int n = static_cast<int>(v.size());
  const int m = std::min(order, n - 1);
  std::vector<double> p(v.end() - (m + 1), v.end());
  std::vector<double> hh(h.end() - (m + 1), h.end());
  for (int j = 1; j <= m; ++j)
    for (int i = m; i >= j; --i) p[i] = p[i] + (p[i] - p[i - 1]) / (hh[i - j] / hh[i] - 1.0);
  return p[m];
}

// A cone phi_hat(k) ~ phi_hat(0) - c k at the origin leaves a sqrt(eps) term in
// the tempered sums; otherwise the expansion runs in whole powers of eps.
bool cone_at_origin(const RadialBandLimitedPotential& pot) {
  const double dk = 1e-4 * pot.k0();
  const double d1 = pot.phi_hat(0.0) - pot.phi_hat(dk);
  const double d2 = pot.phi_hat(0.0) - pot.phi_hat(2.0 * dk);
  if (d1 == 0.0 && d2 == 0.0) return false;
  return std::abs(d2) < 3.0 * std::abs(d1);
}

struct LadderResult {
  PoissonReport report;
  bool stalled = true;
};

LadderResult run_ladder(const RadialBandLimitedPotential& pot, const BravaisLattice& lattice,
                        const Vec3& r, const TemperingSchedule& schedule, const double* fourier) {
  schedule.validate();
  LadderResult out;
  PoissonReport& rep = out.report;
  rep.fourier = fourier ? *fourier : 0.0;

  if (pot.phi_at_origin() == 0.0) {
    rep.steps.push_back({schedule.first_eps(pot.k0()), 0.0, -rep.fourier, 0.0, -rep.fourier});
    rep.limit = 0.0;
    rep.final_gap = std::abs(rep.fourier);
    rep.converged = rep.final_gap == 0.0;
    out.stalled = false;
    return out;
  }

  // Smoothing the profile by a Gaussian of width sqrt(eps) moves a dual point
  // at distance delta from the shell by about exp(-delta^2 / 4 eps); earlier
  // plateaus (e.g. only the origin term surviving) are not tested.
  const double k0 = pot.k0();
  double delta = k0;
  for (const auto& p : points_in_ball(lattice.dual(), Vec3::Zero(), 2.0 * k0)) {
    const double gap = std::abs(p.distance - k0);
    if (gap > 1e-10 * k0) delta = std::min(delta, gap);
  }
  const double eps_check = delta * delta / 100.0;

  // Only steps past the gate enter the extrapolation window; the order grows
  // with the number of such steps.
  const bool cone = cone_at_origin(pot);
  std::vector<double> h, values, extrap, h_all, values_all;
  double eps = schedule.first_eps(pot.k0());
  for (int k = 0; k < schedule.max_steps; ++k, eps *= schedule.ratio) {
    if (k > 0 && tempered_point_count(lattice, r, eps, schedule.tau) > schedule.max_points) break;
    const double t = tempered_sum(pot, lattice, r, eps, schedule.tau);
    const double step = cone ? std::sqrt(eps) : eps;
    h_all.push_back(step);
    values_all.push_back(t);
    // best estimate before the gate, not used for convergence
    double e = extrapolate(h_all, values_all, schedule.extrapolation_order);
    if (eps <= eps_check) {
      h.push_back(step);
      values.push_back(t);
      e = extrapolate(h, values, schedule.extrapolation_order);
      extrap.push_back(e);
    }
    rep.steps.push_back({eps, t, t - rep.fourier, e, e - rep.fourier});
    rep.limit = e;
    rep.final_gap = std::abs(e - rep.fourier);

    const std::size_t n = extrap.size();
    const std::size_t m = values_all.size();
    if (n == 0 || m < 3) continue;
    const double scale = pot.phi_at_origin() + std::abs(fourier ? *fourier : e);
    const double tol = schedule.convergence_tol * scale;
    // Exponentially fast sequences settle on their own.
    bool cauchy = false;
    if (std::abs(values_all[m - 1] - values_all[m - 2]) <= tol &&
        std::abs(values_all[m - 2] - values_all[m - 3]) <= tol) {
      rep.limit = t;
      cauchy = true;
    } else if (n >= 3 && std::abs(extrap[n - 1] - extrap[n - 2]) <= tol) {
      cauchy = true;
    }
    rep.final_gap = std::abs(rep.limit - rep.fourier);
    if (cauchy) {
      out.stalled = false;
      if (!fourier || rep.final_gap <= 10.0 * tol) {
        rep.converged = true;
        break;
      }
    }
  }
  return out;
}

}  // namespace

void TemperingSchedule::validate() const {
  require(std::isfinite(eps0), "schedule eps0 must be finite");
  require(ratio > 0.0 && ratio < 1.0, "schedule ratio must lie in (0, 1)");
  require(max_steps >= 1, "schedule needs at least one step");
  require(tau > 0.0 && tau <= 1e-3, "truncation tolerance must lie in (0, 1e-3]");
  require(convergence_tol > 0.0 && convergence_tol <= 1e-3,
          "convergence tolerance must lie in (0, 1e-3]");
  require(extrapolation_order >= 0 && extrapolation_order <= 8,
          "extrapolation order must lie in [0, 8]");
  require(max_points > 0.0, "point budget must be positive");
}

double tempered_cutoff(const BravaisLattice& lattice, double eps, double tau) {
  require(eps > 0.0, "eps must be positive");
  require(tau > 0.0, "tau must be positive");
  const int d = lattice.dim();
  const double a = 0.5 * d;
  const double D = covering_bound(lattice);
  // tail <= rho S_d 1.5^(d-1) Gamma(d/2, eps U^2) / (2 eps^(d/2)) with U = Rc - 2D
  const double pref = lattice.density() * sphere_area(d) * std::pow(1.5, d - 1) /
                      (2.0 * std::pow(eps, a)) * std::tgamma(a);
  const double target = tau / pref;
  double x = 0.0;
  if (target < 1.0) x = boost::math::gamma_q_inv(a, target);
  return std::max(4.0 * D, std::sqrt(x / eps) + 2.0 * D);
}

double tempered_point_count(const BravaisLattice& lattice, const Vec3&, double eps, double tau) {
  const double rc = tempered_cutoff(lattice, eps, tau);
  return lattice.density() * ball_volume(lattice.dim(), rc + covering_bound(lattice));
}

double tempered_sum(const RadialBandLimitedPotential& pot, const BravaisLattice& lattice,
                    const Vec3& r, double eps, double tau) {
  require(pot.dim() == lattice.dim(), "potential and lattice dimensions differ");
  require(eps > 0.0, "eps must be positive");
  if (pot.phi_at_origin() == 0.0) return 0.0;
  const Vec3 x0 = clean(lattice, r);
  const double rc = tempered_cutoff(lattice, eps, tau);
  const auto table = pot.table(rc);
  const RadialTable& phi = *table;

  detail::Accumulator acc;
  lattice.enumerator().visit(-x0, rc, [&](const Vec3&, const Coeffs&, double d2) {
    acc.add(std::exp(-eps * d2) * phi(std::sqrt(d2)));
  });
  return acc.value();
}

std::vector<LatticePoint> dual_points_in_band(const RadialBandLimitedPotential& pot,
                                              const BravaisLattice& lattice) {
  require(pot.dim() == lattice.dim(), "potential and lattice dimensions differ");
  const double k0 = pot.k0();
  auto pts = points_in_ball(lattice.dual(), Vec3::Zero(), k0 * (1.0 + 1e-10));
  for (const auto& p : pts) {
    if (p.distance >= k0 * (1.0 - 1e-10) && !pot.vanishes_continuously_at_k0())
      fail(ErrorCode::DiscontinuityOnShell,
           "dual lattice point on |K| = K0 where the profile is discontinuous");
  }
  return pts;
}

double fourier_sum(const RadialBandLimitedPotential& pot, const BravaisLattice& lattice,
                   const Vec3& r) {
  const auto pts = dual_points_in_band(pot, lattice);
  // Fractional coordinates snapped to a 2^-40 grid, so r and r + R give the
  // same phases despite rounding in the coordinate transform.
  Vec3 t = lattice.coordinates(clean(lattice, r));
  for (int k = 0; k < 3; ++k) {
    t[k] = std::ldexp(std::round(std::ldexp(t[k], 40)), -40);
    t[k] -= std::floor(t[k]);
  }

  detail::Accumulator acc;
  for (const auto& p : pts) {
    const double w = pot.phi_hat(std::min(p.distance, pot.k0()));
    if (w == 0.0) continue;
    double phase = 0.0;
    for (int k = 0; k < lattice.dim(); ++k) phase += static_cast<double>(p.coeffs[k]) * t[k];
    phase -= std::round(phase);
    acc.add(w * std::cos(2.0 * kPi * phase));
  }
  return lattice.density() * acc.value();
}

PoissonReport poisson_verify(const RadialBandLimitedPotential& pot, const BravaisLattice& lattice,
                             const Vec3& r, const TemperingSchedule& schedule) {
  const double f = fourier_sum(pot, lattice, r);
  return run_ladder(pot, lattice, r, schedule, &f).report;
}

double tempered_limit(const RadialBandLimitedPotential& pot, const BravaisLattice& lattice,
                      const Vec3& r, const TemperingSchedule& schedule) {
  const auto res = run_ladder(pot, lattice, r, schedule, nullptr);
  if (!res.report.converged)
    fail(ErrorCode::NonconvergentQuadrature,
         "tempered lattice sum did not converge within the schedule");
  return res.report.limit;
}

double truncated_sum(const RadialBandLimitedPotential& pot, const BravaisLattice& lattice,
                     const Vec3& r, double radius) {
  require(pot.dim() == lattice.dim(), "potential and lattice dimensions differ");
  require(radius >= 0.0, "radius must be nonnegative");
  if (pot.phi_at_origin() == 0.0) return 0.0;
  const auto table = pot.table(radius);
  const RadialTable& phi = *table;
  detail::Accumulator acc;
  lattice.enumerator().visit(-clean(lattice, r), radius, [&](const Vec3&, const Coeffs&,
                                                             double d2) {
    acc.add(phi(std::sqrt(d2)));
  });
  return acc.value();
}

double rectangular_partial_sum(const RadialBandLimitedPotential& pot,
                               const BravaisLattice& lattice, const Vec3& r, long n) {
  require(pot.dim() == lattice.dim(), "potential and lattice dimensions differ");
  require(n >= 0, "partial sum order must be nonnegative");
  if (pot.phi_at_origin() == 0.0) return 0.0;
  const int d = lattice.dim();
  const Vec3 x0 = clean(lattice, r);
  double reach = x0.norm();
  for (int k = 0; k < d; ++k) reach += static_cast<double>(n) * lattice.basis().col(k).norm();
  const auto table = pot.table(reach);
  const RadialTable& phi = *table;

  detail::Accumulator acc;
  const long n1 = d > 1 ? n : 0, n2 = d > 2 ? n : 0;
  for (long c = -n2; c <= n2; ++c)
    for (long b = -n1; b <= n1; ++b)
      for (long a = -n; a <= n; ++a) acc.add(phi((x0 + lattice.point({a, b, c})).norm()));
  return acc.value();
}

}  // namespace bandgs
