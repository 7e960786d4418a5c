#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "energy.hpp"
#include "random.hpp"

namespace bandgs {

struct RemovedPoint {
  std::size_t component = 0;
  Coeffs coeffs{0, 0, 0};
};

/// Finite perturbation of a union background: the points `removed` (X_f) are
/// replaced by the free positions `added` (R).
struct PerturbationSpec {
  LatticeUnion background;
  std::vector<RemovedPoint> removed;
  std::vector<Vec3> added;
  bool number_preserving = true;

  /// Throws InvalidPerturbation on unknown components, repeated points or a
  /// size mismatch for number-preserving specs.
  void validate() const;
  std::vector<Vec3> removed_positions() const;
  /// Largest distance between any two points of X_f and R.
  double diameter() const;
};

enum class BackgroundMethod { Fourier, Tempered };

/// Delta U from the structure-factor quadratic form. Throws DualTermNonzero if
/// some component has q < K0.
double delta_u_fourier(const RadialBandLimitedPotential& pot, const PerturbationSpec& spec,
                       double mu);

/// Delta U from explicit pair sums plus the background sum I(., X) with the
/// removed points subtracted.
double delta_u_direct(const RadialBandLimitedPotential& pot, const PerturbationSpec& spec,
                      double mu, const TemperingSchedule& schedule = {},
                      BackgroundMethod background = BackgroundMethod::Fourier);

struct MetastabilityVerdict {
  bool same_density = false;
  double e_x = 0.0;
  double e_y = 0.0;
  bool x_excluded = false;
};

MetastabilityVerdict metastability_compare(const RadialBandLimitedPotential& pot,
                                           const LatticeUnion& x, const LatticeUnion& y);

struct RandomSpecOptions {
  int removed = 3;
  int added = 3;
  // Removed points are drawn from |n_alpha| <= reach around the origin cell.
  long reach = 1;
  // Replacement points: with probability `jitter_fraction` a removed point
  // moved by at most `jitter` * r_B, otherwise uniform in the cluster ball.
  double jitter = 0.3;
  double jitter_fraction = 0.5;
};

PerturbationSpec random_spec(const LatticeUnion& background, std::mt19937_64& rng,
                             const RandomSpecOptions& options = {});

namespace detail {

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

GaussRule gauss_legendre(int n);

}  // namespace detail

}  // namespace bandgs
