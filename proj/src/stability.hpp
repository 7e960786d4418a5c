#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "lattice.hpp"

namespace bandgs {

/// gamma_d = max over Bravais lattices of r_B q_{B*}: 2pi, 4pi/sqrt3, sqrt6 pi.
double gamma_max(int dim);

/// Density at which q_{B*} = K0 for the family.
double threshold_density(LatticeFamily family, int dim, double k0);

/// Density at which r_B = r0 for the family.
double contact_density(LatticeFamily family, int dim, double r0);

/// Smallest threshold density over all lattices of dimension d (bcc, triangular, chain).
double rho_d(int dim, double k0);

struct StabilityInterval {
  LatticeFamily family = LatticeFamily::Bcc;
  double rho_low = 0.0;   // q_{B*} = K0
  double rho_high = 0.0;  // r_B = r0
  bool nonempty = false;

  /// Closed-interval membership with relative slack `rel`.
  bool contains(double rho, double rel = 1e-12) const noexcept {
    return nonempty && rho >= rho_low * (1.0 - rel) && rho <= rho_high * (1.0 + rel);
  }
};

StabilityInterval stability_interval(LatticeFamily family, int dim, double k0, double r0);

/// Same interval obtained by root-finding on family_lattice instead of the
/// closed-form constants.
StabilityInterval constructive_interval(LatticeFamily family, int dim, double k0, double r0);

struct GammaSearchOptions {
  long trials = 10000;
  std::uint64_t seed = 1;
  std::optional<Mat3> seed_basis;
  int refine_top = 8;
  int refine_steps = 20000;
};

struct GammaSearchResult {
  double gamma = 0.0;
  Mat3 basis = Mat3::Identity();  // determinant 1
  long evaluations = 0;
};

/// Random unit-volume bases followed by stochastic hill climbing from the best
/// candidates.
GammaSearchResult gamma_search(int dim, const GammaSearchOptions& options);

/// Gaussian random basis rescaled to |det| = 1 (columns are primitive vectors).
Mat3 random_unit_basis(int dim, std::mt19937_64& rng);

struct PhaseDiagramRow {
  double r0k0 = 0.0;
  double rho_over_rho_d = 0.0;
  std::vector<LatticeFamily> stable;
  bool gap = false;
  bool prediction = true;  // false when r0 K0 exceeds gamma_d
  std::optional<LatticeFamily> unique_gsc;
};

std::vector<LatticeFamily> default_families(int dim);

/// n evenly spaced points in (0, hi].
std::vector<double> open_grid(double hi, int n);

/// One row per (r0K0, rho/rho_d) pair, r0K0 outermost.
std::vector<PhaseDiagramRow> phase_diagram_scan(int dim, double k0,
                                                const std::vector<double>& r0k0_grid,
                                                const std::vector<double>& rho_grid,
                                                const std::vector<LatticeFamily>& families);

/// Density of a Z-valent free-electron metal whose Fermi sphere has radius K0/2.
double valence_density(int z, double k0);

struct EndpointSweep {
  long trials = 0;
  long both_conditions = 0;  // lattices with q >= K0 and r >= r0
};

/// Random lattices of dimension d at density rho, tested against q >= K0 and
/// r >= r0 with relative slack `rel`.
EndpointSweep random_endpoint_sweep(int dim, double rho, double k0, double r0, long trials,
                                    std::uint64_t seed, double rel = 1e-9);

}  // namespace bandgs
