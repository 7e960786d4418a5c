#include <doctest.h>

#include "oracles.hpp"
#include "perturb.hpp"
#include "stability.hpp"

using namespace bandgs;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

const auto kLinear = RadialBandLimitedPotential::named(Profile::Linear, 3, 1.0);

LatticeUnion bcc_at_threshold() {
  return LatticeUnion(
      family_lattice(LatticeFamily::Bcc, 3, threshold_density(LatticeFamily::Bcc, 3, 1.0)));
}

double pair_oracle(const PerturbationSpec& spec, const RadialBandLimitedPotential& pot) {
  return oracle::pair_form(spec.added, spec.removed_positions(),
                           [&](double r) { return oracle::phi_linear_3d(pot.k0(), r); });
}

}  // namespace

TEST_CASE("Gauss-Legendre rules integrate polynomials exactly") {
  for (int n : {1, 2, 5, 16, 64}) {
    const auto rule = detail::gauss_legendre(n);
    for (int p = 0; p < 2 * n; ++p) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += rule.weights[i] * std::pow(rule.nodes[i], p);
      const double exact = p % 2 ? 0.0 : 2.0 / (p + 1);
      CAPTURE(n);
      CAPTURE(p);
      CHECK(s == Approx(exact).epsilon(1e-13).scale(1.0));
    }
  }
}

TEST_CASE("identity perturbation") {
  PerturbationSpec spec;
  spec.background = bcc_at_threshold();
  spec.removed = {{0, {0, 0, 0}}, {0, {1, 0, -1}}};
  spec.added = spec.removed_positions();
  const double mu = mu_of(kLinear, spec.background.density());
  CHECK(std::abs(delta_u_fourier(kLinear, spec, mu)) <= 1e-14 * kLinear.phi_at_origin());
  CHECK(delta_u_direct(kLinear, spec, mu) == 0.0);

  // a permutation of the removed points
  std::swap(spec.added[0], spec.added[1]);
  CHECK(std::abs(delta_u_fourier(kLinear, spec, mu)) <= 1e-14 * kLinear.phi_at_origin());
  CHECK(std::abs(delta_u_direct(kLinear, spec, mu)) <= 1e-14 * kLinear.phi_at_origin());
}

TEST_CASE("random number-preserving specs on candidate backgrounds") {
  std::mt19937_64 rng(77);
  const double rho_fcc = threshold_density(LatticeFamily::Fcc, 3, 1.0);
  const std::vector<LatticeUnion> backgrounds = {
      bcc_at_threshold(), LatticeUnion(family_lattice(LatticeFamily::Fcc, 3, rho_fcc)),
      LatticeUnion(family_lattice(LatticeFamily::Fcc, 3, 1.5 * rho_fcc))};
  for (const auto& x : backgrounds) {
    const double mu = mu_of(kLinear, x.density());
    for (int t = 0; t < 15; ++t) {
      RandomSpecOptions opt;
      opt.removed = opt.added = 1 + static_cast<int>(rng() % 4);
      const auto spec = random_spec(x, rng, opt);
      const double scale = static_cast<double>(spec.added.size()) * kLinear.phi_at_origin();
      const double f = delta_u_fourier(kLinear, spec, mu);
      const double d = delta_u_direct(kLinear, spec, mu);
      CHECK(f >= -1e-10 * scale);
      CHECK(d >= -1e-6 * scale);
      CHECK(std::abs(f - d) <= 1e-5 * (1.0 + std::abs(f)));
      CHECK(std::abs(f - pair_oracle(spec, kLinear)) <= 1e-8 * scale);
    }
  }
}

TEST_CASE("non-number-preserving specs") {
  std::mt19937_64 rng(8);
  const auto x = bcc_at_threshold();
  const double rho = x.density();
  const double mu = mu_of(kLinear, rho);
  for (auto [removed, added] : {std::pair{2, 3}, std::pair{3, 2}, std::pair{0, 1}, std::pair{1, 0}}) {
    RandomSpecOptions opt;
    opt.removed = removed;
    opt.added = added;
    const auto spec = random_spec(x, rng, opt);
    CHECK_FALSE(spec.number_preserving);
    const double scale = std::max(1.0, static_cast<double>(added)) * kLinear.phi_at_origin();
    // at mu(rho) the linear term vanishes
    const double f = delta_u_fourier(kLinear, spec, mu);
    CHECK(f >= -1e-10 * scale);
    CHECK(std::abs(f - pair_oracle(spec, kLinear)) <= 1e-8 * scale);
    CHECK(std::abs(f - delta_u_direct(kLinear, spec, mu)) <= 1e-5 * (1.0 + std::abs(f)));
    // other chemical potentials shift it linearly
    const double shifted = delta_u_fourier(kLinear, spec, mu + 0.01);
    CHECK(shifted - f == Approx(0.01 * (removed - added)).epsilon(1e-9));
    CHECK(std::abs(shifted - delta_u_direct(kLinear, spec, mu + 0.01)) <= 1e-5 * (1.0 + std::abs(shifted)));
  }
}

TEST_CASE("small displacement of one point is quadratic") {
  const auto x = bcc_at_threshold();
  const double mu = mu_of(kLinear, x.density());
  const Vec3 dir = Vec3(1.0, 2.0, 2.0) / 3.0;
  auto du = [&](double delta, bool direct) {
    PerturbationSpec spec;
    spec.background = x;
    spec.removed = {{0, {1, 1, 0}}};
    spec.added = {spec.removed_positions()[0] + delta * dir};
    return direct ? delta_u_direct(kLinear, spec, mu) : delta_u_fourier(kLinear, spec, mu);
  };
  // phi(0) - phi(delta) ~ c delta^2, from the small-r series of phi
  const double c = 1.0 / (360.0 * kPi * kPi);
  for (double delta : {1e-2, 2e-2, 4e-2}) {
    const double f = du(delta, false);
    CHECK(f > 0.0);
    CHECK(f == Approx(du(delta, true)).epsilon(1e-6));
  }
  const double h = 1e-2;
  const double second = (du(2.0 * h, true) - 2.0 * du(h, true)) / (2.0 * h * h);
  const double quad = du(h, false) / (h * h);
  CHECK(quad == Approx(c).epsilon(1e-3));
  // finite differences of the direct value see the same curvature
  CHECK(std::abs(second - c) <= 5e-3 * c);
}

TEST_CASE("backgrounds with dual points in the band are refused") {
  PerturbationSpec spec;
  spec.background = LatticeUnion(BravaisLattice(3, Mat3::Identity() * 2.0 * kPi / 0.8));
  spec.removed = {{0, {0, 0, 0}}};
  spec.added = {Vec3(0.5, 0.0, 0.0)};
  try {
    (void)delta_u_fourier(kLinear, spec, 0.0);
    FAIL("expected DualTermNonzero");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DualTermNonzero);
  }
  // the direct route still works there
  CHECK(std::isfinite(delta_u_direct(kLinear, spec, 0.0)));
}

TEST_CASE("spec validation") {
  auto expect_invalid = [](const PerturbationSpec& spec) {
    try {
      spec.validate();
      FAIL("expected InvalidPerturbation");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::InvalidPerturbation);
    }
  };
  PerturbationSpec spec;
  spec.background = bcc_at_threshold();
  spec.removed = {{1, {0, 0, 0}}};
  spec.added = {Vec3::Zero()};
  expect_invalid(spec);
  spec.removed = {{0, {0, 0, 0}}, {0, {0, 0, 0}}};
  spec.added = {Vec3::Zero(), Vec3::Ones()};
  expect_invalid(spec);
  spec.removed = {{0, {0, 0, 0}}};
  expect_invalid(spec);  // size mismatch
  spec.number_preserving = false;
  CHECK_NOTHROW(spec.validate());
  spec.added = {Vec3(std::nan(""), 0.0, 0.0)};
  expect_invalid(spec);
  expect_invalid(PerturbationSpec{});
}

TEST_CASE("tempered background agrees with the fourier background") {
  std::mt19937_64 rng(3);
  const auto x = bcc_at_threshold();
  const double mu = mu_of(kLinear, x.density());
  for (int t = 0; t < 2; ++t) {
    const auto spec = random_spec(x, rng);
    const double f = delta_u_fourier(kLinear, spec, mu);
    const double d = delta_u_direct(kLinear, spec, mu, {}, BackgroundMethod::Tempered);
    CHECK(std::abs(f - d) <= 1e-5 * (1.0 + std::abs(f)));
  }
}

TEST_CASE("metastability comparison") {
  const double rho3 = threshold_density(LatticeFamily::Bcc, 3, 1.0);
  // sc has q < K0 at the bcc threshold density
  const double rho = 1.2 * rho3;
  const auto sc = family_lattice(LatticeFamily::SimpleCubic, 3, rho);
  const auto bcc = family_lattice(LatticeFamily::Bcc, 3, rho);
  REQUIRE(sc.dual_shortest_length() < 1.0);
  REQUIRE(bcc.dual_shortest_length() >= 1.0);
  const auto v = metastability_compare(kLinear, LatticeUnion(sc), LatticeUnion(bcc));
  CHECK(v.same_density);
  CHECK(v.x_excluded);
  CHECK(v.e_x > v.e_y);

  const auto same = metastability_compare(kLinear, LatticeUnion(bcc), LatticeUnion(bcc));
  CHECK(same.same_density);
  CHECK_FALSE(same.x_excluded);

  const auto other = metastability_compare(
      kLinear, LatticeUnion(sc), LatticeUnion(family_lattice(LatticeFamily::Bcc, 3, 2.0 * rho)));
  CHECK_FALSE(other.same_density);
  CHECK_FALSE(other.x_excluded);
}
