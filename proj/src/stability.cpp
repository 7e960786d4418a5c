#include "stability.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "random.hpp"

namespace bandgs {

namespace {

constexpr double kPi = std::numbers::pi;

void check_family(LatticeFamily family, int dim) {
  if (family_dimension(family) != dim)
    fail(ErrorCode::FamilyDimensionMismatch,
         std::string(family_tag(family)) + " is not a " + std::to_string(dim) +
             "-dimensional lattice family");
}

double evaluate_gamma(int dim, const Mat3& basis) {
  try {
    return BravaisLattice(dim, basis).gamma();
  } catch (const Error&) {
    return 0.0;
  }
}

Mat3 unit_volume(int dim, Mat3 basis) {
  double det = 0.0;
  switch (dim) {
    case 1: det = basis(0, 0); break;
    case 2: det = basis.topLeftCorner<2, 2>().determinant(); break;
    default: det = basis.determinant(); break;
  }
  if (det == 0.0 || !std::isfinite(det)) return basis;
  const double s = std::pow(std::abs(det), -1.0 / dim);
  Mat3 out = Mat3::Zero();
  out.topLeftCorner(dim, dim) = s * basis.topLeftCorner(dim, dim);
  return out;
}

// Find x in [lo, hi] with f(x) = 0, expanding the bracket geometrically.
template <class F>
double solve_monotone(F f, double guess) {
  double lo = guess, hi = guess;
  double flo = f(lo), fhi = flo;
  for (int i = 0; i < 200 && flo * fhi > 0.0; ++i) {
    if (std::abs(flo) == 0.0) return lo;
    lo *= 0.5;
    hi *= 2.0;
    flo = f(lo);
    fhi = f(hi);
  }
  require(flo * fhi <= 0.0, "root-finding failed to bracket the threshold");
  boost::uintmax_t iters = 200;
  auto tol = [](double a, double b) { return std::abs(a - b) <= 4e-16 * std::max(a, b); };
  const auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tol, iters);
  return 0.5 * (a + b);
}

}  // namespace

double gamma_max(int dim) {
  switch (dim) {
    case 1: return 2.0 * kPi;
    case 2: return 4.0 * kPi / std::sqrt(3.0);
    case 3: return std::sqrt(6.0) * kPi;
    default: fail(ErrorCode::InvalidArgument, "dimension must be 1, 2 or 3");
  }
}

double threshold_density(LatticeFamily family, int dim, double k0) {
  check_family(family, dim);
  require(k0 > 0.0 && std::isfinite(k0), "K0 must be positive");
  return family_density_constant(family) * std::pow(k0, dim);
}

double contact_density(LatticeFamily family, int dim, double r0) {
  check_family(family, dim);
  require(r0 > 0.0 && std::isfinite(r0), "r0 must be positive");
  // rho = c q^d and r q = gamma, so r = r0 at rho = c (gamma / r0)^d.
  return family_density_constant(family) * std::pow(family_gamma(family) / r0, dim);
}

double rho_d(int dim, double k0) {
  switch (dim) {
    case 1: return threshold_density(LatticeFamily::Chain, 1, k0);
    case 2: return threshold_density(LatticeFamily::Triangular, 2, k0);
    case 3: return threshold_density(LatticeFamily::Bcc, 3, k0);
    default: fail(ErrorCode::InvalidArgument, "dimension must be 1, 2 or 3");
  }
}

StabilityInterval stability_interval(LatticeFamily family, int dim, double k0, double r0) {
  StabilityInterval out;
  out.family = family;
  out.rho_low = threshold_density(family, dim, k0);
  out.rho_high = contact_density(family, dim, r0);
  out.nonempty = r0 * k0 <= family_gamma(family) * (1.0 + 1e-12);
  return out;
}

StabilityInterval constructive_interval(LatticeFamily family, int dim, double k0, double r0) {
  check_family(family, dim);
  require(k0 > 0.0 && r0 > 0.0, "K0 and r0 must be positive");
  StabilityInterval out;
  out.family = family;
  out.rho_low = solve_monotone(
      [&](double rho) { return family_lattice(family, dim, rho).dual_shortest_length() - k0; },
      1.0);
  out.rho_high = solve_monotone(
      [&](double rho) { return family_lattice(family, dim, rho).shortest_length() - r0; }, 1.0);
  out.nonempty = out.rho_low <= out.rho_high * (1.0 + 1e-12);
  return out;
}

Mat3 random_unit_basis(int dim, std::mt19937_64& rng) {
  require(dim >= 1 && dim <= 3, "dimension must be 1, 2 or 3");
  for (;;) {
    Mat3 b = Mat3::Zero();
    for (int j = 0; j < dim; ++j)
      for (int i = 0; i < dim; ++i) b(i, j) = normal01(rng);
    const Mat3 u = unit_volume(dim, b);
    if (u.topLeftCorner(dim, dim).allFinite() && evaluate_gamma(dim, u) > 0.0) return u;
  }
}

GammaSearchResult gamma_search(int dim, const GammaSearchOptions& options) {
  require(dim >= 1 && dim <= 3, "dimension must be 1, 2 or 3");
  require(options.trials >= 1, "gamma search needs at least one trial");
  require(options.refine_top >= 0 && options.refine_steps >= 0, "refinement counts must be >= 0");
  std::mt19937_64 rng(options.seed);
  GammaSearchResult result;

  struct Candidate {
    double gamma;
    Mat3 basis;
  };
  std::vector<Candidate> top;
  auto consider = [&](const Mat3& b) {
    const double g = evaluate_gamma(dim, b);
    ++result.evaluations;
    if (g > result.gamma) {
      result.gamma = g;
      result.basis = b;
    }
    return g;
  };
  auto keep = [&](double g, const Mat3& b) {
    const std::size_t cap = static_cast<std::size_t>(std::max(options.refine_top, 1));
    if (top.size() < cap || g > top.back().gamma) {
      top.push_back({g, b});
      std::sort(top.begin(), top.end(),
                [](const Candidate& a, const Candidate& c) { return a.gamma > c.gamma; });
      if (top.size() > cap) top.pop_back();
    }
  };

  if (options.seed_basis) {
    const Mat3 b = unit_volume(dim, *options.seed_basis);
    keep(consider(b), b);
  }
  for (long t = 0; t < options.trials; ++t) {
    const Mat3 b = random_unit_basis(dim, rng);
    keep(consider(b), b);
  }

  for (int c = 0; c < options.refine_top && c < static_cast<int>(top.size()); ++c) {
    Mat3 b = top[static_cast<std::size_t>(c)].basis;
    double g = top[static_cast<std::size_t>(c)].gamma;
    double sigma = 0.05;
    for (int step = 0; step < options.refine_steps && sigma > 1e-12; ++step) {
      Mat3 trial = b;
      for (int j = 0; j < dim; ++j)
        for (int i = 0; i < dim; ++i) trial(i, j) += sigma * normal01(rng);
      trial = unit_volume(dim, trial);
      const double gt = consider(trial);
      if (gt > g) {
        // keep a size-reduced basis so that steps stay well conditioned
        b = unit_volume(dim, BravaisLattice(dim, trial).enumerator().reduced);
        g = gt;
        sigma *= 1.5;
      } else {
        sigma *= 0.99;
      }
    }
  }
  return result;
}

std::vector<LatticeFamily> default_families(int dim) {
  switch (dim) {
    case 1: return {LatticeFamily::Chain};
    case 2: return {LatticeFamily::Triangular, LatticeFamily::Square};
    case 3:
      return {LatticeFamily::Bcc, LatticeFamily::Fcc, LatticeFamily::SimpleCubic,
              LatticeFamily::SimpleHexagonal};
    default: fail(ErrorCode::InvalidArgument, "dimension must be 1, 2 or 3");
  }
}

std::vector<double> open_grid(double hi, int n) {
  require(hi > 0.0 && n >= 1, "grid needs a positive upper bound and at least one point");
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = hi * (i + 1) / n;
  return out;
}

std::vector<PhaseDiagramRow> phase_diagram_scan(int dim, double k0,
                                                const std::vector<double>& r0k0_grid,
                                                const std::vector<double>& rho_grid,
                                                const std::vector<LatticeFamily>& families) {
  require(k0 > 0.0, "K0 must be positive");
  for (auto f : families) check_family(f, dim);
  const double gd = gamma_max(dim);
  const double rd = rho_d(dim, k0);

  std::vector<PhaseDiagramRow> rows;
  rows.reserve(r0k0_grid.size() * rho_grid.size());
  for (double x : r0k0_grid) {
    require(x > 0.0 && std::isfinite(x), "r0 K0 grid values must be positive");
    std::vector<StabilityInterval> intervals;
    for (auto f : families) intervals.push_back(stability_interval(f, dim, k0, x / k0));
    for (double y : rho_grid) {
      require(y > 0.0 && std::isfinite(y), "density grid values must be positive");
      PhaseDiagramRow row;
      row.r0k0 = x;
      row.rho_over_rho_d = y;
      row.prediction = x <= gd * (1.0 + 1e-12);
      if (row.prediction) {
        const double rho = y * rd;
        for (const auto& iv : intervals)
          if (iv.contains(rho)) row.stable.push_back(iv.family);
        row.gap = row.stable.empty();
        if (row.stable.size() == 1) {
          const auto& iv = *std::find_if(intervals.begin(), intervals.end(), [&](const auto& i) {
            return i.family == row.stable.front();
          });
          const bool at_end = std::abs(rho - iv.rho_low) <= 1e-9 * iv.rho_low ||
                              std::abs(rho - iv.rho_high) <= 1e-9 * iv.rho_high;
          if (at_end) row.unique_gsc = iv.family;
        }
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

double valence_density(int z, double k0) {
  require(z >= 1, "valence must be a positive integer");
  require(k0 > 0.0, "K0 must be positive");
  // Fermi sphere of radius K0/2 holds two electrons per state:
  // n_e = (K0/2)^3 / (3 pi^2), ions at n_e / Z.
  const double kf = 0.5 * k0;
  return kf * kf * kf / (3.0 * kPi * kPi) / z;
}

EndpointSweep random_endpoint_sweep(int dim, double rho, double k0, double r0, long trials,
                                    std::uint64_t seed, double rel) {
  require(rho > 0.0 && k0 > 0.0 && r0 > 0.0, "density, K0 and r0 must be positive");
  require(trials >= 0, "trial count must be nonnegative");
  std::mt19937_64 rng(seed);
  EndpointSweep out;
  const double scale = std::pow(rho, -1.0 / dim);
  for (long t = 0; t < trials; ++t) {
    const BravaisLattice b(dim, scale * random_unit_basis(dim, rng));
    ++out.trials;
    if (b.dual_shortest_length() >= k0 * (1.0 - rel) && b.shortest_length() >= r0 * (1.0 - rel))
      ++out.both_conditions;
  }
  return out;
}

}  // namespace bandgs
