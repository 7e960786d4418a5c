#include <doctest.h>

#include <bandgs/bandgs.h>

#include <cmath>
#include <cstring>
#include <numbers>
#include <string>
#include <vector>

using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

struct Fixture {
  bgs_potential* lin = nullptr;
  bgs_lattice* bcc = nullptr;
  Fixture() {
    REQUIRE(bgs_potential_named("linear", 3, 1.0, &lin) == BGS_OK);
    double rho = 0.0;
    REQUIRE(bgs_threshold_density("bcc", 3, 1.0, &rho) == BGS_OK);
    REQUIRE(bgs_lattice_family("bcc", 3, rho, &bcc) == BGS_OK);
  }
  ~Fixture() {
    bgs_lattice_free(bcc);
    bgs_potential_free(lin);
  }
};

}  // namespace

TEST_CASE("version, status names and errors") {
  CHECK(std::strlen(bgs_version()) > 0);
  CHECK(std::string(bgs_status_name(BGS_OK)) == "Ok");
  CHECK(std::string(bgs_status_name(BGS_ERR_DISCONTINUITY_ON_SHELL)).size() > 0);

  bgs_lattice* b = nullptr;
  const double flat[9] = {1, 0, 0, 0, 1, 0, 1, 1, 0};
  CHECK(bgs_lattice_new(3, flat, &b) == BGS_ERR_DEGENERATE_BASIS);
  CHECK(b == nullptr);
  CHECK(std::strlen(bgs_last_error()) > 0);
  CHECK(bgs_lattice_family("fcc", 2, 1.0, &b) == BGS_ERR_FAMILY_DIMENSION_MISMATCH);
  CHECK(bgs_lattice_family("nope", 3, 1.0, &b) == BGS_ERR_INVALID_ARGUMENT);
  CHECK(bgs_lattice_new(3, nullptr, &b) == BGS_ERR_INVALID_ARGUMENT);
  CHECK(bgs_lattice_get_info(nullptr, nullptr) == BGS_ERR_INVALID_ARGUMENT);
  // free functions accept NULL
  bgs_lattice_free(nullptr);
  bgs_potential_free(nullptr);
  bgs_union_free(nullptr);
  bgs_spec_free(nullptr);
  bgs_poisson_report_free(nullptr);
  bgs_phase_diagram_free(nullptr);
  bgs_repulsion_free(nullptr);
}

TEST_CASE("lattice handles") {
  bgs_lattice* sc = nullptr;
  REQUIRE(bgs_lattice_family("sc", 3, 1.0, &sc) == BGS_OK);
  bgs_lattice_info info;
  REQUIRE(bgs_lattice_get_info(sc, &info) == BGS_OK);
  CHECK(info.dim == 3);
  CHECK(info.density == Approx(1.0).epsilon(1e-14));
  CHECK(info.gamma == Approx(2.0 * kPi).epsilon(1e-12));
  CHECK(info.dual_basis[0][0] == Approx(2.0 * kPi).epsilon(1e-14));

  bgs_lattice* dual = nullptr;
  REQUIRE(bgs_lattice_dual(sc, &dual) == BGS_OK);
  bgs_lattice_info dinfo;
  REQUIRE(bgs_lattice_get_info(dual, &dinfo) == BGS_OK);
  CHECK(dinfo.density * info.density == Approx(std::pow(2.0 * kPi, -3)).epsilon(1e-12));

  const double center[3] = {0, 0, 0};
  size_t count = 0;
  CHECK(bgs_lattice_points_in_ball(sc, center, 1.01, nullptr, 0, &count) == BGS_ERR_BUFFER_TOO_SMALL);
  CHECK(count == 7);
  std::vector<double> pts(3 * count);
  REQUIRE(bgs_lattice_points_in_ball(sc, center, 1.01, pts.data(), count, &count) == BGS_OK);
  CHECK(pts[0] == 0.0);
  CHECK(std::hypot(pts[3], pts[4], pts[5]) == Approx(1.0));

  const double axis[3] = {0, 0, 1};
  bgs_lattice* rot = nullptr;
  REQUIRE(bgs_lattice_rotated(sc, axis, 0.3, &rot) == BGS_OK);
  bgs_lattice_info rinfo;
  REQUIRE(bgs_lattice_get_info(rot, &rinfo) == BGS_OK);
  CHECK(rinfo.gamma == Approx(info.gamma).epsilon(1e-12));

  int dim = 0;
  double c = 0.0, g = 0.0;
  REQUIRE(bgs_family_constants("fcc", &dim, &c, &g) == BGS_OK);
  CHECK(dim == 3);
  CHECK(g == Approx(std::sqrt(6.0) * kPi).epsilon(1e-12));

  bgs_lattice_free(rot);
  bgs_lattice_free(dual);
  bgs_lattice_free(sc);
}

TEST_CASE("potentials and repulsion") {
  bgs_potential* p = nullptr;
  REQUIRE(bgs_potential_named("constant", 3, 1.0, &p) == BGS_OK);
  bgs_potential_info info;
  REQUIRE(bgs_potential_get_info(p, &info) == BGS_OK);
  CHECK(info.phi_at_origin == Approx(1.0 / (6.0 * kPi * kPi)).epsilon(1e-12));
  CHECK(info.vanishes_at_k0 == 0);
  double v = 0.0;
  REQUIRE(bgs_potential_phi(p, 2.0, &v) == BGS_OK);
  CHECK(v == Approx((std::sin(2.0) - 2.0 * std::cos(2.0)) / (2.0 * kPi * kPi * 8.0)).epsilon(1e-8));
  REQUIRE(bgs_potential_phi_hat(p, 1.5, &v) == BGS_OK);
  CHECK(v == 0.0);
  bgs_potential_free(p);

  const double k[3] = {0.0, 0.5, 1.0};
  const double vals[3] = {1.0, 0.5, 0.0};
  REQUIRE(bgs_potential_tabulated(3, 1.0, k, vals, 3, &p) == BGS_OK);
  REQUIRE(bgs_potential_phi_hat(p, 0.25, &v) == BGS_OK);
  CHECK(v == Approx(0.75));
  bgs_potential_free(p);
  const double bad[3] = {1.0, -0.5, 0.0};
  CHECK(bgs_potential_tabulated(3, 1.0, k, bad, 3, &p) == BGS_ERR_INVALID_ARGUMENT);
  CHECK(bgs_potential_named("wiggly", 3, 1.0, &p) == BGS_ERR_INVALID_ARGUMENT);

  bgs_repulsion* r = nullptr;
  REQUIRE(bgs_repulsion_new("hard_core", 2.0, 1.0, &r) == BGS_OK);
  REQUIRE(bgs_repulsion_psi(r, 1.0, &v) == BGS_OK);
  CHECK(std::isinf(v));
  REQUIRE(bgs_repulsion_psi(r, 2.5, &v) == BGS_OK);
  CHECK(v == 0.0);
  bgs_repulsion_free(r);
}

TEST_CASE("lattice sums and the Poisson report") {
  Fixture f;
  const double r[3] = {0, 0, 0};
  double fs = 0.0;
  REQUIRE(bgs_fourier_sum(f.lin, f.bcc, r, &fs) == BGS_OK);
  bgs_lattice_info info;
  REQUIRE(bgs_lattice_get_info(f.bcc, &info) == BGS_OK);
  bgs_potential_info pinfo;
  REQUIRE(bgs_potential_get_info(f.lin, &pinfo) == BGS_OK);
  CHECK(fs == Approx(info.density * pinfo.phi_hat_at_zero).epsilon(1e-12));

  double t = 0.0;
  REQUIRE(bgs_tempered_sum(f.lin, f.bcc, r, 1.0, 1e-12, &t) == BGS_OK);
  CHECK(std::isfinite(t));

  bgs_schedule s;
  bgs_schedule_default(&s);
  CHECK(s.ratio > 0.0);
  CHECK(s.ratio < 1.0);
  bgs_poisson_report* rep = nullptr;
  REQUIRE(bgs_poisson_verify(f.lin, f.bcc, r, &s, &rep) == BGS_OK);
  bgs_poisson_summary sum;
  REQUIRE(bgs_poisson_report_summary(rep, &sum) == BGS_OK);
  CHECK(sum.converged == 1);
  CHECK(sum.final_gap <= 1e-6 * (pinfo.phi_at_origin + std::abs(sum.limit)));
  bgs_poisson_step st;
  REQUIRE(bgs_poisson_report_step(rep, sum.steps - 1, &st) == BGS_OK);
  CHECK(st.extrapolated == sum.limit);
  CHECK(bgs_poisson_report_step(rep, sum.steps, &st) == BGS_ERR_INVALID_ARGUMENT);
  bgs_poisson_report_free(rep);

  bgs_potential* c = nullptr;
  REQUIRE(bgs_potential_named("constant", 3, 1.0, &c) == BGS_OK);
  CHECK(bgs_fourier_sum(c, f.bcc, r, &fs) == BGS_ERR_DISCONTINUITY_ON_SHELL);
  bgs_potential_free(c);

  s.max_steps = 1;
  REQUIRE(bgs_poisson_verify(f.lin, f.bcc, r, &s, &rep) == BGS_OK);
  REQUIRE(bgs_poisson_report_summary(rep, &sum) == BGS_OK);
  CHECK(sum.converged == 0);
  bgs_poisson_report_free(rep);
}

TEST_CASE("unions and energies") {
  Fixture f;
  bgs_union* u = nullptr;
  REQUIRE(bgs_union_new(&u) == BGS_OK);
  double rho = 0.0;
  REQUIRE(bgs_union_density(u, &rho) == BGS_OK);
  CHECK(rho == 0.0);
  REQUIRE(bgs_union_add(u, f.bcc, nullptr) == BGS_OK);
  const double axis[3] = {1.0, std::sqrt(2.0), std::sqrt(3.0)};
  bgs_lattice* rot = nullptr;
  REQUIRE(bgs_lattice_rotated(f.bcc, axis, 0.7, &rot) == BGS_OK);
  const double shift[3] = {0.3, 0.1, 0.2};
  REQUIRE(bgs_union_add(u, rot, shift) == BGS_OK);
  size_t n = 0;
  REQUIRE(bgs_union_size(u, &n) == BGS_OK);
  CHECK(n == 2);
  bgs_energy_report rep;
  REQUIRE(bgs_union_energy(f.lin, u, &rep) == BGS_OK);
  CHECK(rep.excess == 0.0);
  CHECK(rep.is_gsc_candidate == 1);
  double eps = 0.0, mu = 0.0;
  REQUIRE(bgs_epsilon_of_rho(f.lin, rep.rho, &eps) == BGS_OK);
  REQUIRE(bgs_mu_of(f.lin, rep.rho, &mu) == BGS_OK);
  CHECK(eps == rep.epsilon_rho);
  CHECK(mu == rep.mu);
  bgs_lattice_free(rot);
  bgs_union_free(u);

  // fcc at contact with a hard core
  bgs_lattice* fcc = nullptr;
  const double r0 = 2.0;
  REQUIRE(bgs_lattice_family("fcc", 3, std::sqrt(2.0) / (r0 * r0 * r0), &fcc) == BGS_OK);
  bgs_repulsion* hc = nullptr;
  REQUIRE(bgs_repulsion_new("hard_core", r0, 1.0, &hc) == BGS_OK);
  int feasible = 0;
  double psi = -1.0;
  REQUIRE(bgs_energy_with_repulsion(f.lin, hc, fcc, &rep, &feasible, &psi) == BGS_OK);
  CHECK(feasible == 1);
  CHECK(psi == 0.0);
  CHECK(rep.excess == 0.0);
  REQUIRE(bgs_energy_with_repulsion(f.lin, hc, fcc, &rep, nullptr, nullptr) == BGS_OK);
  bgs_repulsion_free(hc);
  bgs_lattice_free(fcc);
}

TEST_CASE("perturbation specs") {
  Fixture f;
  bgs_union* u = nullptr;
  REQUIRE(bgs_union_new(&u) == BGS_OK);
  REQUIRE(bgs_union_add(u, f.bcc, nullptr) == BGS_OK);
  double rho = 0.0, mu = 0.0;
  REQUIRE(bgs_union_density(u, &rho) == BGS_OK);
  REQUIRE(bgs_mu_of(f.lin, rho, &mu) == BGS_OK);

  bgs_spec* s = nullptr;
  REQUIRE(bgs_spec_new(u, 1, &s) == BGS_OK);
  const long c0[3] = {0, 0, 0};
  REQUIRE(bgs_spec_remove(s, 0, c0) == BGS_OK);
  CHECK(bgs_spec_validate(s) == BGS_ERR_INVALID_PERTURBATION);
  double pos[3];
  size_t comp = 9;
  long coeffs[3];
  REQUIRE(bgs_spec_removed_point(s, 0, &comp, coeffs, pos) == BGS_OK);
  CHECK(comp == 0);
  pos[0] += 0.1;
  REQUIRE(bgs_spec_add(s, pos) == BGS_OK);
  REQUIRE(bgs_spec_validate(s) == BGS_OK);
  size_t nr = 0, na = 0;
  int np = 0;
  REQUIRE(bgs_spec_counts(s, &nr, &na, &np) == BGS_OK);
  CHECK(nr == 1);
  CHECK(na == 1);
  CHECK(np == 1);
  double du_f = 0.0, du_d = 0.0;
  REQUIRE(bgs_delta_u_fourier(f.lin, s, mu, &du_f) == BGS_OK);
  REQUIRE(bgs_delta_u_direct(f.lin, s, mu, nullptr, &du_d) == BGS_OK);
  CHECK(du_f > 0.0);
  CHECK(du_f == Approx(du_d).epsilon(1e-5));
  REQUIRE(bgs_spec_remove(s, 3, c0) == BGS_OK);
  CHECK(bgs_spec_validate(s) == BGS_ERR_INVALID_PERTURBATION);
  bgs_spec_free(s);

  for (uint64_t seed = 1; seed <= 5; ++seed) {
    REQUIRE(bgs_spec_random(u, seed, 2, 3, &s) == BGS_OK);
    REQUIRE(bgs_spec_counts(s, &nr, &na, &np) == BGS_OK);
    CHECK(np == 0);
    REQUIRE(bgs_delta_u_fourier(f.lin, s, mu, &du_f) == BGS_OK);
    CHECK(du_f >= -1e-10 * 3.0);
    bgs_spec_free(s);
  }

  // dual points inside the band
  bgs_lattice* sc = nullptr;
  const double basis[9] = {2 * kPi / 0.8, 0, 0, 0, 2 * kPi / 0.8, 0, 0, 0, 2 * kPi / 0.8};
  REQUIRE(bgs_lattice_new(3, basis, &sc) == BGS_OK);
  bgs_union* v = nullptr;
  REQUIRE(bgs_union_new(&v) == BGS_OK);
  REQUIRE(bgs_union_add(v, sc, nullptr) == BGS_OK);
  REQUIRE(bgs_spec_random(v, 1, 1, 1, &s) == BGS_OK);
  CHECK(bgs_delta_u_fourier(f.lin, s, 0.0, &du_f) == BGS_ERR_DUAL_TERM_NONZERO);

  bgs_union* w = nullptr;
  REQUIRE(bgs_union_new(&w) == BGS_OK);
  double rb = 0.0;
  REQUIRE(bgs_threshold_density("bcc", 3, 1.0, &rb) == BGS_OK);
  bgs_lattice* bcc12 = nullptr;
  REQUIRE(bgs_lattice_family("bcc", 3, 1.2 * rb, &bcc12) == BGS_OK);
  bgs_lattice* sc12 = nullptr;
  REQUIRE(bgs_lattice_family("sc", 3, 1.2 * rb, &sc12) == BGS_OK);
  bgs_union* x = nullptr;
  REQUIRE(bgs_union_new(&x) == BGS_OK);
  REQUIRE(bgs_union_add(x, sc12, nullptr) == BGS_OK);
  REQUIRE(bgs_union_add(w, bcc12, nullptr) == BGS_OK);
  bgs_metastability m;
  REQUIRE(bgs_metastability_compare(f.lin, x, w, &m) == BGS_OK);
  CHECK(m.same_density == 1);
  CHECK(m.x_excluded == 1);

  bgs_spec_free(s);
  bgs_union_free(x);
  bgs_union_free(w);
  bgs_union_free(v);
  bgs_lattice_free(sc12);
  bgs_lattice_free(bcc12);
  bgs_lattice_free(sc);
  bgs_union_free(u);
}

TEST_CASE("stability through the C interface") {
  double g = 0.0, rd = 0.0, rf = 0.0;
  REQUIRE(bgs_gamma_max(3, &g) == BGS_OK);
  CHECK(g == Approx(std::sqrt(6.0) * kPi).epsilon(1e-14));
  REQUIRE(bgs_rho_d(3, 1.0, &rd) == BGS_OK);
  REQUIRE(bgs_threshold_density("fcc", 3, 1.0, &rf) == BGS_OK);
  CHECK(rf / rd == Approx(4.0 * std::sqrt(2.0) / (3.0 * std::sqrt(3.0))).epsilon(1e-12));
  double rc = 0.0;
  REQUIRE(bgs_contact_density("fcc", 3, 2.0, &rc) == BGS_OK);
  CHECK(rc == Approx(std::sqrt(2.0) / 8.0).epsilon(1e-14));

  bgs_interval a, c;
  REQUIRE(bgs_stability_interval("bcc", 3, 1.0, 3.0, &a) == BGS_OK);
  REQUIRE(bgs_constructive_interval("bcc", 3, 1.0, 3.0, &c) == BGS_OK);
  CHECK(a.nonempty == 1);
  CHECK(c.rho_high == Approx(a.rho_high).epsilon(1e-10));
  CHECK(bgs_stability_interval("fcc", 2, 1.0, 3.0, &a) == BGS_ERR_FAMILY_DIMENSION_MISMATCH);

  double z = 0.0;
  REQUIRE(bgs_valence_density(1, 1.0, &z) == BGS_OK);
  CHECK(std::round(z / rd * 1e4) / 1e4 == 1.4810);

  bgs_gamma_result gr;
  REQUIRE(bgs_gamma_search(2, 2000, 7, nullptr, &gr) == BGS_OK);
  CHECK(gr.gamma <= 4.0 * kPi / std::sqrt(3.0) + 1e-9);
  CHECK(gr.evaluations >= 2000);
  CHECK(bgs_gamma_search(2, 0, 7, nullptr, &gr) == BGS_ERR_INVALID_ARGUMENT);

  long both = -1;
  REQUIRE(bgs_endpoint_sweep(3, std::sqrt(2.0) / 27.0, 1.0, 3.0, 500, 3, &both) == BGS_OK);
  CHECK(both == 0);

  const double xs[2] = {1.0, g};
  const double ys[3] = {1.0, 1.5, 2.0};
  bgs_phase_diagram* d = nullptr;
  REQUIRE(bgs_phase_diagram_scan(3, 1.0, xs, 2, ys, 3, nullptr, 0, &d) == BGS_OK);
  size_t n = 0;
  REQUIRE(bgs_phase_diagram_size(d, &n) == BGS_OK);
  CHECK(n == 6);
  bgs_phase_row row;
  REQUIRE(bgs_phase_diagram_row(d, 0, &row) == BGS_OK);
  CHECK(row.r0k0 == 1.0);
  CHECK(std::string(row.stable) == "bcc");
  CHECK(std::string(row.unique_gsc) == "bcc");
  REQUIRE(bgs_phase_diagram_row(d, 4, &row) == BGS_OK);
  CHECK(row.gap == 1);
  CHECK(std::string(row.unique_gsc).empty());
  CHECK(bgs_phase_diagram_row(d, 6, &row) == BGS_ERR_INVALID_ARGUMENT);
  bgs_phase_diagram_free(d);

  const char* fams[1] = {"fcc"};
  REQUIRE(bgs_phase_diagram_scan(3, 1.0, xs, 1, ys, 1, fams, 1, &d) == BGS_OK);
  REQUIRE(bgs_phase_diagram_row(d, 0, &row) == BGS_OK);
  CHECK(std::string(row.stable).empty());
  bgs_phase_diagram_free(d);
}
