#include "energy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <set>

namespace bandgs {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kMembershipTol = 1e-8;

bool is_dual_member(const BravaisLattice& lattice, const Vec3& k) {
  // K.a_alpha / 2pi must be integral for every primitive vector
  for (int a = 0; a < lattice.dim(); ++a) {
    const double m = lattice.basis().col(a).dot(k) / (2.0 * kPi);
    if (std::abs(m - std::round(m)) > kMembershipTol) return false;
  }
  return true;
}

bool lex_less(const Vec3& a, const Vec3& b) {
  for (int k = 0; k < 3; ++k)
    if (a[k] != b[k]) return a[k] < b[k];
  return false;
}

// Reduced representatives of B_j modulo B_i when the relative basis matrix is
// rational with small denominators.
std::optional<std::vector<Vec3>> finite_orbit(const BravaisLattice& bi, const BravaisLattice& bj) {
  constexpr long kMaxDenominator = 24;
  constexpr std::size_t kMaxOrbit = 4096;
  const int d = bi.dim();
  Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
  for (int b = 0; b < d; ++b) m.col(b) = bi.coordinates(bj.basis().col(b));

  long lcm = 1;
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      long q = 1;
      for (; q <= kMaxDenominator; ++q) {
        const double x = m(a, b) * static_cast<double>(q);
        if (std::abs(x - std::round(x)) <= 1e-9 * static_cast<double>(q)) break;
      }
      if (q > kMaxDenominator) return std::nullopt;
      lcm = std::lcm(lcm, q);
      if (std::pow(static_cast<double>(lcm), d) > static_cast<double>(kMaxOrbit))
        return std::nullopt;
    }

  using Key = std::array<long, 3>;
  std::vector<Key> gens;
  for (int b = 0; b < d; ++b) {
    Key g{0, 0, 0};
    for (int a = 0; a < d; ++a) {
      const long v = std::lround(m(a, b) * static_cast<double>(lcm));
      g[a] = ((v % lcm) + lcm) % lcm;
    }
    gens.push_back(g);
  }
  std::set<Key> seen{Key{0, 0, 0}};
  std::vector<Key> queue{Key{0, 0, 0}};
  for (std::size_t head = 0; head < queue.size(); ++head) {
    for (const auto& g : gens) {
      Key next = queue[head];
      for (int a = 0; a < 3; ++a) next[a] = (next[a] + g[a]) % lcm;
      if (seen.insert(next).second) queue.push_back(next);
    }
  }
  std::vector<Vec3> out;
  for (const auto& key : seen) {
    Vec3 t = Vec3::Zero();
    for (int a = 0; a < d; ++a) t[a] = static_cast<double>(key[a]) / static_cast<double>(lcm);
    out.push_back(bi.basis() * t);
  }
  return out;
}

// Mean of I(offset + R, B_i) over R in B_j.
double average_over(const RadialBandLimitedPotential& pot, const BravaisLattice& bi,
                    const BravaisLattice& bj, const Vec3& offset,
                    const TemperingSchedule& schedule) {
  auto sample = [&](const Vec3& x) { return tempered_limit(pot, bi, x, schedule); };

  if (auto orbit = finite_orbit(bi, bj)) {
    detail::Accumulator acc;
    for (const auto& t : *orbit) acc.add(sample(offset + t));
    return acc.value() / static_cast<double>(orbit->size());
  }

  // Incommensurate: the sum is a trigonometric polynomial on the cell of B_i;
  // only modes that are also dual to B_j survive the average.
  const int d = bi.dim();
  std::array<long, 3> mmax{0, 0, 0};
  for (const auto& p : dual_points_in_band(pot, bi)) {
    if (pot.phi_hat(std::min(p.distance, pot.k0())) == 0.0) continue;
    for (int a = 0; a < d; ++a) mmax[a] = std::max(mmax[a], std::abs(p.coeffs[a]));
  }
  std::array<long, 3> n{1, 1, 1};
  for (int a = 0; a < d; ++a) n[a] = 2 * mmax[a] + 1;

  Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
  for (int b = 0; b < d; ++b) m.col(b) = bi.coordinates(bj.basis().col(b));

  std::vector<std::array<long, 3>> modes;
  for (long m2 = -mmax[2]; m2 <= mmax[2]; ++m2)
    for (long m1 = -mmax[1]; m1 <= mmax[1]; ++m1)
      for (long m0 = -mmax[0]; m0 <= mmax[0]; ++m0) {
        const Vec3 mv(static_cast<double>(m0), static_cast<double>(m1), static_cast<double>(m2));
        const Vec3 img = m.transpose() * mv;
        bool integral = true;
        for (int b = 0; b < d; ++b)
          if (std::abs(img[b] - std::round(img[b])) > kMembershipTol) integral = false;
        if (integral) modes.push_back({m0, m1, m2});
      }

  const double total = static_cast<double>(n[0] * n[1] * n[2]);
  detail::Accumulator acc;
  for (long s2 = 0; s2 < n[2]; ++s2)
    for (long s1 = 0; s1 < n[1]; ++s1)
      for (long s0 = 0; s0 < n[0]; ++s0) {
        const Vec3 u(static_cast<double>(s0) / n[0], static_cast<double>(s1) / n[1],
                     static_cast<double>(s2) / n[2]);
        const double g = sample(offset + bi.basis() * u);
        double w = 0.0;
        for (const auto& md : modes)
          w += std::cos(2.0 * kPi * (md[0] * u[0] + md[1] * u[1] + md[2] * u[2]));
        acc.add(g * w);
      }
  return acc.value() / total;
}

}  // namespace

double epsilon_of_rho(const RadialBandLimitedPotential& pot, double rho) {
  require(rho > 0.0 && std::isfinite(rho), "density must be positive");
  return 0.5 * rho * (rho * pot.phi_hat_at_zero() - pot.phi_at_origin());
}

double mu_of(const RadialBandLimitedPotential& pot, double rho) {
  require(rho > 0.0 && std::isfinite(rho), "density must be positive");
  return rho * pot.phi_hat_at_zero() - 0.5 * pot.phi_at_origin();
}

bool is_gsc_candidate(const RadialBandLimitedPotential& pot, const LatticeUnion& x) {
  for (const auto& c : x.components()) {
    const double q = c.lattice.dual_shortest_length();
    if (q < pot.k0() * (1.0 - 1e-10)) return false;
    if (q <= pot.k0() * (1.0 + 1e-10) && !pot.vanishes_continuously_at_k0()) return false;
  }
  return true;
}

std::vector<StructurePoint> union_structure(const RadialBandLimitedPotential& pot,
                                            const LatticeUnion& x) {
  require(!x.empty(), "union has no components");
  require(pot.dim() == x.dim(), "potential and union dimensions differ");
  const double k0 = pot.k0();

  std::vector<Vec3> candidates;
  for (const auto& c : x.components())
    for (const auto& p : dual_points_in_band(pot, c.lattice))
      if (p.distance > 1e-12 * k0) candidates.push_back(p.position);
  std::sort(candidates.begin(), candidates.end(), [](const Vec3& a, const Vec3& b) {
    const double na = a.norm(), nb = b.norm();
    if (na != nb) return na < nb;
    return lex_less(a, b);
  });

  std::vector<StructurePoint> out;
  for (const auto& k : candidates) {
    const double norm = k.norm();
    bool duplicate = false;
    for (auto it = out.rbegin(); it != out.rend() && it->norm >= norm - 1e-8 * k0; ++it)
      if ((it->k - k).norm() <= kMembershipTol * k0) {
        duplicate = true;
        break;
      }
    if (duplicate) continue;
    std::complex<double> amp{0.0, 0.0};
    for (const auto& c : x.components())
      if (is_dual_member(c.lattice, k))
        amp += c.lattice.density() * std::polar(1.0, k.dot(c.shift));
    out.push_back({k, norm, amp});
  }
  return out;
}

EnergyReport union_energy_density(const RadialBandLimitedPotential& pot, const LatticeUnion& x) {
  const auto structure = union_structure(pot, x);
  EnergyReport rep;
  rep.rho = x.density();
  rep.epsilon_rho = epsilon_of_rho(pot, rep.rho);
  rep.mu = mu_of(pot, rep.rho);
  detail::Accumulator acc;
  for (const auto& s : structure) {
    const double w = pot.phi_hat(std::min(s.norm, pot.k0()));
    if (w != 0.0) acc.add(w * std::norm(s.amplitude));
  }
  rep.excess = 0.5 * acc.value();
  rep.e_x = rep.epsilon_rho + rep.excess;
  rep.is_gsc_candidate = is_gsc_candidate(pot, x);
  return rep;
}

RepulsionEnergyReport energy_with_repulsion(const RadialBandLimitedPotential& pot,
                                            const ShortRangeRepulsion& rep,
                                            const BravaisLattice& lattice) {
  RepulsionEnergyReport out;
  out.energy = union_energy_density(pot, LatticeUnion(lattice));
  const double r0 = rep.r0();
  if (lattice.shortest_length() >= r0 * (1.0 - 1e-12)) return out;

  if (rep.is_hard_core()) {
    out.feasible = false;
    out.psi_energy = std::numeric_limits<double>::infinity();
  } else {
    detail::Accumulator acc;
    for (const auto& p : points_in_ball(lattice, Vec3::Zero(), r0)) {
      if (p.distance == 0.0 || p.distance >= r0 * (1.0 - 1e-12)) continue;
      acc.add(rep(p.distance));
    }
    out.psi_energy = 0.5 * lattice.density() * acc.value();
  }
  out.energy.e_x += out.psi_energy;
  out.energy.excess += out.psi_energy;
  return out;
}

double direct_energy_density(const RadialBandLimitedPotential& pot, const LatticeUnion& x,
                             const TemperingSchedule& schedule) {
  require(!x.empty(), "union has no components");
  require(pot.dim() == x.dim(), "potential and union dimensions differ");
  if (pot.phi_at_origin() == 0.0) return 0.0;

  detail::Accumulator e;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const auto& cj = x[j];
    detail::Accumulator background;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const auto& ci = x[i];
      if (i == j) {
        background.add(tempered_limit(pot, ci.lattice, Vec3::Zero(), schedule));
        continue;
      }
      background.add(average_over(pot, ci.lattice, cj.lattice, cj.shift - ci.shift, schedule));
    }
    e.add(0.5 * cj.lattice.density() * (background.value() - pot.phi_at_origin()));
  }
  return e.value();
}

}  // namespace bandgs
