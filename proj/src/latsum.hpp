#pragma once

#include <vector>

#include "lattice.hpp"
#include "potential.hpp"

namespace bandgs {

/// Geometric epsilon ladder eps_k = eps0 * ratio^k. eps0 <= 0 means K0^2.
struct TemperingSchedule {
  double eps0 = 0.0;
  double ratio = 0.5;
  int max_steps = 40;
  double tau = 1e-12;
  double convergence_tol = 1e-9;
  // Number of terms removed by Richardson extrapolation, in powers of sqrt(eps)
  // when phi_hat has a cone at k = 0 and of eps otherwise.
  int extrapolation_order = 4;
  // Skip further steps once a single tempered sum would visit more points.
  double max_points = 6e7;

  void validate() const;
  double first_eps(double k0) const { return eps0 > 0.0 ? eps0 : k0 * k0; }
};

/// Radius beyond which the tempered tail is at most tau * phi(0).
double tempered_cutoff(const BravaisLattice& lattice, double eps, double tau);

/// Estimated number of lattice points a tempered sum visits.
double tempered_point_count(const BravaisLattice& lattice, const Vec3& r, double eps, double tau);

/// sum_R exp(-eps |r+R|^2) phi(r+R) over |r+R| <= cutoff.
double tempered_sum(const RadialBandLimitedPotential& pot, const BravaisLattice& lattice,
                    const Vec3& r, double eps, double tau = 1e-12);

/// rho(B) * sum_{K in B*, |K| <= K0} phi_hat(|K|) cos(K.r). Throws
/// DiscontinuityOnShell if a dual point sits on |K| = K0 and the profile does
/// not vanish there.
double fourier_sum(const RadialBandLimitedPotential& pot, const BravaisLattice& lattice,
                   const Vec3& r);

/// Dual points with |K| <= K0 (shell tolerance 1e-10 relative). Throws like
/// fourier_sum when the profile jumps on the shell.
std::vector<LatticePoint> dual_points_in_band(const RadialBandLimitedPotential& pot,
                                              const BravaisLattice& lattice);

struct PoissonStep {
  double eps;
  double tempered;
  double gap;               // tempered - fourier
  double extrapolated;      // Richardson limit estimate from the latest steps
  double extrapolated_gap;  // extrapolated - fourier
};

struct PoissonReport {
  std::vector<PoissonStep> steps;
  double fourier = 0.0;
  double limit = 0.0;  // last extrapolated value
  double final_gap = 0.0;
  bool converged = false;
};

PoissonReport poisson_verify(const RadialBandLimitedPotential& pot, const BravaisLattice& lattice,
                             const Vec3& r, const TemperingSchedule& schedule = {});

/// Limit of the tempered sums along the schedule; throws NonconvergentQuadrature
/// when the ladder ends without converging.
double tempered_limit(const RadialBandLimitedPotential& pot, const BravaisLattice& lattice,
                      const Vec3& r, const TemperingSchedule& schedule = {});

/// Plain sum of phi(r+R) over |r+R| <= radius (meaningful when absolutely
/// convergent).
double truncated_sum(const RadialBandLimitedPotential& pot, const BravaisLattice& lattice,
                     const Vec3& r, double radius);

/// Diagnostic: sum over |n_alpha| <= n of phi(r + sum n_alpha a_alpha).
double rectangular_partial_sum(const RadialBandLimitedPotential& pot,
                               const BravaisLattice& lattice, const Vec3& r, long n);

namespace detail {

// Compensated (Neumaier) accumulator.
struct Accumulator {
  double sum = 0.0;
  double comp = 0.0;
  void add(double v) noexcept {
    const double t = sum + v;
    comp += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
    sum = t;
  }
  double value() const noexcept { return sum + comp; }
};

}  // namespace detail

}  // namespace bandgs
