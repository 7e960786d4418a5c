#include <doctest.h>

#include <random>

#include "latsum.hpp"
#include "oracles.hpp"
#include "random.hpp"
#include "stability.hpp"

using namespace bandgs;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

BravaisLattice cubic(double side) { return BravaisLattice(3, Mat3::Identity() * side); }

// Distance from the shell |K| = K0 to the nearest other dual point.
double shell_clearance(const BravaisLattice& lattice, double k0) {
  double delta = k0;
  for (const auto& p : points_in_ball(lattice.dual(), Vec3::Zero(), 2.0 * k0))
    delta = std::min(delta, std::abs(p.distance - k0));
  return delta;
}

}  // namespace

TEST_CASE("zero profile sums to zero") {
  const auto z = RadialBandLimitedPotential::named(Profile::Zero, 3, 1.0);
  const auto b = family_lattice(LatticeFamily::Fcc, 3, 0.3);
  CHECK(tempered_sum(z, b, Vec3(0.1, 0.2, 0.3), 1e-3) == 0.0);
  CHECK(fourier_sum(z, b, Vec3::Zero()) == 0.0);
  const auto rep = poisson_verify(z, b, Vec3::Zero());
  CHECK(rep.converged);
  CHECK(rep.final_gap == 0.0);
}

TEST_CASE("tempered sum matches a brute-force box sum") {
  const double k0 = 5.0;  // q = 2 pi > K0
  const auto c = RadialBandLimitedPotential::named(Profile::Constant, 3, k0);
  const Mat3 basis = Mat3::Identity();
  const double ref = oracle::tempered_box(3, basis, Vec3::Zero(), 1e-2, 60,
                                          [&](double r) { return oracle::phi_constant_3d(k0, r); });
  const double got = tempered_sum(c, cubic(1.0), Vec3::Zero(), 1e-2);
  CHECK(std::abs(got - ref) <= 1e-8 * std::abs(ref));

  // off-origin point in a skewed lattice
  Mat3 skew;
  skew << 1.0, 0.3, -0.2, 0.0, 0.9, 0.4, 0.0, 0.0, 1.1;
  const auto l = RadialBandLimitedPotential::named(Profile::Linear, 3, 2.0);
  const Vec3 r(0.37, -0.12, 0.55);
  const double ref2 = oracle::tempered_box(3, skew, r, 5e-2, 40,
                                           [](double x) { return oracle::phi_linear_3d(2.0, x); });
  CHECK(std::abs(tempered_sum(l, BravaisLattice(3, skew), r, 5e-2) - ref2) <=
        1e-9 * l.phi_at_origin());
}

TEST_CASE("large eps leaves only the origin term") {
  const auto l = RadialBandLimitedPotential::named(Profile::Linear, 3, 1.0);
  const double t = tempered_sum(l, cubic(1.0), Vec3::Zero(), 1e3);
  CHECK(t == Approx(l.phi_at_origin()).epsilon(1e-12));
}

TEST_CASE("fourier sum examples") {
  const auto c = RadialBandLimitedPotential::named(Profile::Constant, 3, 1.0);
  // q > K0: only K = 0
  const auto wide = cubic(2.0 * kPi / 1.3);
  CHECK(fourier_sum(c, wide, Vec3(0.3, -1.0, 2.0)) == Approx(wide.density()).epsilon(1e-14));

  // 2 pi / a = 0.9 K0: origin plus six nearest dual points
  const auto seven = cubic(2.0 * kPi / 0.9);
  CHECK(fourier_sum(c, seven, Vec3::Zero()) == Approx(7.0 * seven.density()).epsilon(1e-13));
  CHECK(dual_points_in_band(c, seven).size() == 7);

  // dual point on the shell
  const auto on = cubic(2.0 * kPi);
  try {
    (void)fourier_sum(c, on, Vec3::Zero());
    FAIL("expected DiscontinuityOnShell");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DiscontinuityOnShell);
  }
  CHECK_THROWS_AS(poisson_verify(c, on, Vec3::Zero()), Error);
  // a profile vanishing at K0 is fine there
  const auto l = RadialBandLimitedPotential::named(Profile::Linear, 3, 1.0);
  CHECK(fourier_sum(l, on, Vec3(0.2, 0.0, 0.0)) == Approx(on.density()).epsilon(1e-14));
}

TEST_CASE("fourier sum is periodic") {
  std::mt19937_64 rng(41);
  const auto l = RadialBandLimitedPotential::named(Profile::Linear, 3, 1.0);
  for (int t = 0; t < 20; ++t) {
    const BravaisLattice unit(3, random_unit_basis(3, rng));
    const auto b = unit.scaled(unit.dual_shortest_length() / 0.6);
    const Vec3 r(uniform01(rng), uniform01(rng), uniform01(rng));
    const Coeffs n{static_cast<long>(rng() % 7) - 3, static_cast<long>(rng() % 7) - 3,
                   static_cast<long>(rng() % 7) - 3};
    CHECK(fourier_sum(l, b, r + b.point(n)) == fourier_sum(l, b, r));
  }
}

TEST_CASE("Poisson examples") {
  SUBCASE("bcc at the threshold density with the linear profile") {
    const auto l = RadialBandLimitedPotential::named(Profile::Linear, 3, 1.0);
    const double rho3 = threshold_density(LatticeFamily::Bcc, 3, 1.0);
    const auto b = family_lattice(LatticeFamily::Bcc, 3, rho3);
    const auto rep = poisson_verify(l, b, Vec3(0.31, 0.17, -0.23));
    CHECK(rep.converged);
    CHECK(rep.fourier == Approx(rho3).epsilon(1e-14));
    CHECK(std::abs(rep.limit - rho3) <= 1e-6 * (rho3 + l.phi_at_origin()));
  }
  SUBCASE("constant profile with q = 1.1 K0 converges to rho") {
    const auto c = RadialBandLimitedPotential::named(Profile::Constant, 3, 1.0);
    const auto b = family_lattice(LatticeFamily::Fcc, 3, 1.0);
    const auto s = b.scaled(b.dual_shortest_length() / 1.1);
    const auto rep = poisson_verify(c, s, Vec3(0.4, 0.0, 0.1));
    CHECK(rep.converged);
    CHECK(std::abs(rep.limit - s.density()) <= 1e-6 * (s.density() + c.phi_at_origin()));
    // brute-force cross-check of one rung
    const auto& step = rep.steps.at(3);
    const double box = oracle::tempered_box(
        3, s.basis(), Vec3(0.4, 0.0, 0.1), step.eps, 40,
        [](double x) { return oracle::phi_constant_3d(1.0, x); });
    CHECK(std::abs(step.tempered - box) <= 1e-9 * c.phi_at_origin());
  }
  SUBCASE("one-dimensional chain") {
    const auto c = RadialBandLimitedPotential::named(Profile::Constant, 1, 1.0);
    const double spacing = 2.0 * kPi / 1.5;
    const BravaisLattice chain(1, Mat3::Identity() * spacing);
    const auto rep = poisson_verify(c, chain, Vec3(0.7, 0.0, 0.0));
    CHECK(rep.converged);
    CHECK(std::abs(rep.limit - 1.0 / spacing) <= 1e-6 * (1.0 / spacing + c.phi_at_origin()));
    const auto& step = rep.steps.at(2);
    Mat3 basis = Mat3::Zero();
    basis(0, 0) = spacing;
    const double box = oracle::tempered_box(1, basis, Vec3(0.7, 0.0, 0.0), step.eps, 4000,
                                            [](double x) { return oracle::phi_constant_1d(1.0, x); });
    CHECK(std::abs(step.tempered - box) <= 1e-10 * c.phi_at_origin());
  }
}

TEST_CASE("Poisson identity on random lattices away from the shell") {
  std::mt19937_64 rng(2024);
  int done = 0;
  while (done < 50) {
    const BravaisLattice unit(3, random_unit_basis(3, rng));
    const double q = 0.8 + 1.2 * uniform01(rng);
    const auto b = unit.scaled(unit.dual_shortest_length() / q);
    if (shell_clearance(b, 1.0) < 0.3) continue;
    const Vec3 r = b.basis() * Vec3(uniform01(rng), uniform01(rng), uniform01(rng));
    for (auto p : {Profile::Constant, Profile::Linear}) {
      const auto pot = RadialBandLimitedPotential::named(p, 3, 1.0);
      const auto rep = poisson_verify(pot, b, r);
      CAPTURE(q);
      CAPTURE(profile_name(p));
      CHECK(rep.converged);
      CHECK(std::abs(rep.limit - rep.fourier) <=
            1e-6 * (std::abs(rep.fourier) + pot.phi_at_origin()));
    }
    ++done;
  }
}

TEST_CASE("halving tau moves the sum by at most the previous tail bound") {
  const auto l = RadialBandLimitedPotential::named(Profile::Linear, 3, 1.0);
  const auto b = family_lattice(LatticeFamily::Bcc, 3, 0.01);
  const Vec3 r(0.5, 1.5, -0.3);
  for (double eps : {1e-1, 1e-2, 1e-3}) {
    double tau = 1e-4;
    double prev = tempered_sum(l, b, r, eps, tau);
    for (int k = 0; k < 6; ++k) {
      const double next = tempered_sum(l, b, r, eps, tau / 2.0);
      CHECK(std::abs(next - prev) <= tau * l.phi_at_origin());
      CHECK(tempered_cutoff(b, eps, tau / 2.0) >= tempered_cutoff(b, eps, tau));
      prev = next;
      tau /= 2.0;
    }
  }
}

TEST_CASE("absolutely summable profile: tempered limit equals the plain sum") {
  const auto s = RadialBandLimitedPotential::named(Profile::Smooth, 3, 1.0);
  const auto f = family_lattice(LatticeFamily::Fcc, 3, 1.0);
  const auto b = f.scaled(f.dual_shortest_length() / 1.4);
  REQUIRE(shell_clearance(b, 1.0) > 0.1);
  const Vec3 r(1.0, -0.5, 2.0);
  const double limit = tempered_limit(s, b, r);
  const double plain = truncated_sum(s, b, r, 400.0);
  CHECK(std::abs(limit - plain) <= 1e-6 * (std::abs(limit) + s.phi_at_origin()));
  CHECK(std::abs(limit - fourier_sum(s, b, r)) <= 1e-6 * (std::abs(limit) + s.phi_at_origin()));
}

TEST_CASE("rectangular partial sums approach the fourier value for the smooth profile") {
  const auto s = RadialBandLimitedPotential::named(Profile::Smooth, 3, 1.0);
  const auto b = cubic(2.0 * kPi / 0.8);
  const Vec3 r(0.3, 0.0, 1.0);
  const double f = fourier_sum(s, b, r);
  CHECK(std::abs(rectangular_partial_sum(s, b, r, 30) - f) <= 1e-5 * (std::abs(f) + s.phi_at_origin()));
}

TEST_CASE("an exhausted schedule reports non-convergence") {
  const auto l = RadialBandLimitedPotential::named(Profile::Linear, 3, 1.0);
  const auto b = family_lattice(LatticeFamily::Bcc, 3, 0.05);
  TemperingSchedule sched;
  sched.max_steps = 2;
  const auto rep = poisson_verify(l, b, Vec3::Zero(), sched);
  CHECK_FALSE(rep.converged);
  CHECK(rep.steps.size() == 2);
  try {
    (void)tempered_limit(l, b, Vec3::Zero(), sched);
    FAIL("expected NonconvergentQuadrature");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonconvergentQuadrature);
  }
}

TEST_CASE("schedule validation") {
  const auto l = RadialBandLimitedPotential::named(Profile::Linear, 3, 1.0);
  const auto b = cubic(1.0);
  auto bad = [&](auto mutate) {
    TemperingSchedule s;
    mutate(s);
    CHECK_THROWS_AS(poisson_verify(l, b, Vec3::Zero(), s), Error);
  };
  bad([](TemperingSchedule& s) { s.ratio = 1.0; });
  bad([](TemperingSchedule& s) { s.ratio = 0.0; });
  bad([](TemperingSchedule& s) { s.max_steps = 0; });
  bad([](TemperingSchedule& s) { s.tau = 1e-2; });
  bad([](TemperingSchedule& s) { s.convergence_tol = 0.0; });
  CHECK_THROWS_AS(tempered_sum(l, b, Vec3::Zero(), 0.0), Error);
  CHECK_THROWS_AS(tempered_sum(RadialBandLimitedPotential::named(Profile::Linear, 2, 1.0), b,
                               Vec3::Zero(), 1.0),
                  Error);
}

TEST_CASE("summation is deterministic") {
  const auto l = RadialBandLimitedPotential::named(Profile::Linear, 3, 1.0);
  const auto b = family_lattice(LatticeFamily::SimpleHexagonal, 3, 0.04);
  const double a = tempered_sum(l, b, Vec3(0.1, 0.2, 0.3), 1e-3);
  for (int k = 0; k < 3; ++k) CHECK(tempered_sum(l, b, Vec3(0.1, 0.2, 0.3), 1e-3) == a);
}
