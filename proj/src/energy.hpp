#pragma once

#include <complex>
#include <vector>

#include "latsum.hpp"

namespace bandgs {

struct EnergyReport {
  double rho = 0.0;
  double epsilon_rho = 0.0;
  double e_x = 0.0;
  double excess = 0.0;
  double mu = 0.0;
  bool is_gsc_candidate = false;
};

struct RepulsionEnergyReport {
  EnergyReport energy;
  bool feasible = true;
  double psi_energy = 0.0;  // contribution of psi per unit volume
};

/// Ground-state energy per volume 1/2 rho (rho phi_hat(0) - phi(0)).
double epsilon_of_rho(const RadialBandLimitedPotential& pot, double rho);

/// Chemical potential rho phi_hat(0) - phi(0)/2.
double mu_of(const RadialBandLimitedPotential& pot, double rho);

/// True when every component's dual lattice avoids the open band |K| < K0
/// and any dual point on the shell sees a vanishing profile.
bool is_gsc_candidate(const RadialBandLimitedPotential& pot, const LatticeUnion& x);

struct StructurePoint {
  Vec3 k;
  double norm;
  std::complex<double> amplitude;  // sum_j chi_j(K) rho_j exp(i K.y_j)
};

/// Distinct nonzero points of the union of dual lattices inside the band,
/// sorted by |K| then by coordinates.
std::vector<StructurePoint> union_structure(const RadialBandLimitedPotential& pot,
                                            const LatticeUnion& x);

/// Energy density of a union from the reciprocal-space formula.
EnergyReport union_energy_density(const RadialBandLimitedPotential& pot, const LatticeUnion& x);

/// Single lattice under phi + psi. Pair distances within 1e-12 relative of r0
/// count as touching, not overlapping.
RepulsionEnergyReport energy_with_repulsion(const RadialBandLimitedPotential& pot,
                                            const ShortRangeRepulsion& rep,
                                            const BravaisLattice& lattice);

/// Energy density from real-space tempered lattice sums, averaging each
/// background sum over the points of every component. Independent of the
/// reciprocal-space formula; throws NonconvergentQuadrature when a tempered
/// limit fails to settle.
double direct_energy_density(const RadialBandLimitedPotential& pot, const LatticeUnion& x,
                             const TemperingSchedule& schedule = {});

}  // namespace bandgs
