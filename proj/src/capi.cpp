#include "bandgs/bandgs.h"

#include <cmath>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "energy.hpp"
#include "perturb.hpp"
#include "stability.hpp"

using namespace bandgs;

struct bgs_lattice {
  BravaisLattice value;
};
struct bgs_potential {
  RadialBandLimitedPotential value;
};
struct bgs_repulsion {
  ShortRangeRepulsion value;
};
struct bgs_union {
  LatticeUnion value;
};
struct bgs_spec {
  PerturbationSpec value;
};
struct bgs_poisson_report {
  PoissonReport value;
};
struct bgs_phase_diagram {
  struct Row {
    PhaseDiagramRow row;
    std::string stable;
    std::string unique;
  };
  std::vector<Row> rows;
};

namespace {

thread_local std::string g_last_error;

bgs_status to_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return BGS_ERR_INVALID_ARGUMENT;
    case ErrorCode::DegenerateBasis: return BGS_ERR_DEGENERATE_BASIS;
    case ErrorCode::FamilyDimensionMismatch: return BGS_ERR_FAMILY_DIMENSION_MISMATCH;
    case ErrorCode::NonconvergentQuadrature: return BGS_ERR_NONCONVERGENT_QUADRATURE;
    case ErrorCode::DiscontinuityOnShell: return BGS_ERR_DISCONTINUITY_ON_SHELL;
    case ErrorCode::DualTermNonzero: return BGS_ERR_DUAL_TERM_NONZERO;
    case ErrorCode::InvalidPerturbation: return BGS_ERR_INVALID_PERTURBATION;
    case ErrorCode::UnsupportedUnion: return BGS_ERR_UNSUPPORTED_UNION;
  }
  return BGS_ERR_INTERNAL;
}

bgs_status set_error(bgs_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

template <class F>
bgs_status guarded(F&& f) {
  g_last_error.clear();
  try {
    f();
    return BGS_OK;
  } catch (const Error& e) {
    return set_error(to_status(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(BGS_ERR_OUT_OF_MEMORY, "out of memory");
  } catch (const std::exception& e) {
    return set_error(BGS_ERR_INTERNAL, e.what());
  } catch (...) {
    return set_error(BGS_ERR_INTERNAL, "unknown failure");
  }
}

template <class T>
const T& deref(const T* p, const char* what) {
  if (p == nullptr) fail(ErrorCode::InvalidArgument, std::string(what) + " is NULL");
  return *p;
}

template <class T>
T& deref(T* p, const char* what) {
  if (p == nullptr) fail(ErrorCode::InvalidArgument, std::string(what) + " is NULL");
  return *p;
}

template <class H, class T>
void emit(H** out, T&& value) {
  if (out == nullptr) fail(ErrorCode::InvalidArgument, "out is NULL");
  *out = new H{std::forward<T>(value)};
}

void check_dim(int dim) { require(dim >= 1 && dim <= 3, "dimension must be 1, 2 or 3"); }

Vec3 read_vec(int dim, const double* v, const char* what) {
  Vec3 out = Vec3::Zero();
  if (v == nullptr) fail(ErrorCode::InvalidArgument, std::string(what) + " is NULL");
  for (int k = 0; k < dim; ++k) out[k] = v[k];
  return out;
}

Mat3 read_basis(int dim, const double* rows) {
  if (rows == nullptr) fail(ErrorCode::InvalidArgument, "basis is NULL");
  Mat3 m = Mat3::Zero();
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) m(j, i) = rows[i * dim + j];
  return m;
}

void write_basis(const Mat3& m, double out[3][3]) {
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out[i][j] = m(j, i);
}

LatticeFamily parse_family(const char* tag) {
  if (tag == nullptr) fail(ErrorCode::InvalidArgument, "family tag is NULL");
  const auto f = family_from_tag(tag);
  if (!f) fail(ErrorCode::InvalidArgument, std::string("unknown lattice family '") + tag + "'");
  return *f;
}

TemperingSchedule read_schedule(const bgs_schedule* s) {
  TemperingSchedule out;
  if (s != nullptr) {
    out.eps0 = s->eps0;
    out.ratio = s->ratio;
    out.max_steps = s->max_steps;
    out.tau = s->tau;
    out.convergence_tol = s->convergence_tol;
    out.extrapolation_order = s->extrapolation_order;
    out.max_points = s->max_points;
  }
  out.validate();
  return out;
}

void fill_report(const EnergyReport& r, bgs_energy_report* out) {
  out->rho = r.rho;
  out->epsilon_rho = r.epsilon_rho;
  out->e_x = r.e_x;
  out->excess = r.excess;
  out->mu = r.mu;
  out->is_gsc_candidate = r.is_gsc_candidate ? 1 : 0;
}

void fill_interval(const StabilityInterval& iv, bgs_interval* out) {
  out->rho_low = iv.rho_low;
  out->rho_high = iv.rho_high;
  out->nonempty = iv.nonempty ? 1 : 0;
}

}  // namespace

extern "C" {

const char* bgs_version(void) { return "0.1.0"; }

const char* bgs_status_name(bgs_status status) {
  switch (status) {
    case BGS_OK: return "Ok";
    case BGS_ERR_INVALID_ARGUMENT: return "InvalidArgument";
    case BGS_ERR_DEGENERATE_BASIS: return "DegenerateBasis";
    case BGS_ERR_FAMILY_DIMENSION_MISMATCH: return "FamilyDimensionMismatch";
    case BGS_ERR_NONCONVERGENT_QUADRATURE: return "NonconvergentQuadrature";
    case BGS_ERR_DISCONTINUITY_ON_SHELL: return "DiscontinuityOnShell";
    case BGS_ERR_DUAL_TERM_NONZERO: return "DualTermNonzero";
    case BGS_ERR_INVALID_PERTURBATION: return "InvalidPerturbation";
    case BGS_ERR_UNSUPPORTED_UNION: return "UnsupportedUnion";
    case BGS_ERR_BUFFER_TOO_SMALL: return "BufferTooSmall";
    case BGS_ERR_OUT_OF_MEMORY: return "OutOfMemory";
    case BGS_ERR_INTERNAL: return "Internal";
  }
  return "Unknown";
}

const char* bgs_last_error(void) { return g_last_error.c_str(); }

// ---- lattices

bgs_status bgs_lattice_new(int dim, const double* basis, bgs_lattice** out) {
  return guarded([&] {
    check_dim(dim);
    emit(out, BravaisLattice(dim, read_basis(dim, basis)));
  });
}

bgs_status bgs_lattice_family(const char* tag, int dim, double density, bgs_lattice** out) {
  return guarded([&] {
    check_dim(dim);
    emit(out, family_lattice(parse_family(tag), dim, density));
  });
}

bgs_status bgs_lattice_dual(const bgs_lattice* lattice, bgs_lattice** out) {
  return guarded([&] {
    emit(out, deref(lattice, "lattice").value.dual());
  });
}

bgs_status bgs_lattice_rotated(const bgs_lattice* lattice, const double* axis, double angle,
                               bgs_lattice** out) {
  return guarded([&] {
    const auto& b = deref(lattice, "lattice").value;
    require(b.dim() == 3, "rotation is only defined for 3D lattices");
    const Vec3 a = read_vec(3, axis, "axis");
    require(a.norm() > 0.0, "rotation axis must be nonzero");
    emit(out, b.rotated(rotation_matrix(a, angle)));
  });
}

void bgs_lattice_free(bgs_lattice* lattice) { delete lattice; }

bgs_status bgs_lattice_get_info(const bgs_lattice* lattice, bgs_lattice_info* out) {
  return guarded([&] {
    const auto& b = deref(lattice, "lattice").value;
    auto& o = deref(out, "out");
    o.dim = b.dim();
    o.density = b.density();
    o.shortest_length = b.shortest_length();
    o.dual_shortest_length = b.dual_shortest_length();
    o.gamma = b.gamma();
    write_basis(b.basis(), o.basis);
    write_basis(b.dual_basis(), o.dual_basis);
    for (int k = 0; k < 3; ++k) o.shortest_witness[k] = b.shortest_witness()[k];
  });
}

bgs_status bgs_lattice_points_in_ball(const bgs_lattice* lattice, const double* center,
                                      double radius, double* positions, size_t capacity,
                                      size_t* count) {
  bgs_status status = BGS_OK;
  const bgs_status s = guarded([&] {
    const auto& b = deref(lattice, "lattice").value;
    require(radius >= 0.0, "radius must be nonnegative");
    const auto pts = points_in_ball(b, read_vec(b.dim(), center, "center"), radius);
    deref(count, "count") = pts.size();
    if (pts.size() > capacity) {
      status = set_error(BGS_ERR_BUFFER_TOO_SMALL, "buffer holds " + std::to_string(capacity) +
                                                       " points, " +
                                                       std::to_string(pts.size()) + " needed");
      return;
    }
    if (!pts.empty()) require(positions != nullptr, "positions is NULL");
    const int d = b.dim();
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (int k = 0; k < d; ++k) positions[i * d + k] = pts[i].position[k];
  });
  return s != BGS_OK ? s : status;
}

bgs_status bgs_family_constants(const char* tag, int* dim, double* density_constant,
                                double* gamma) {
  return guarded([&] {
    const auto f = parse_family(tag);
    if (dim) *dim = family_dimension(f);
    if (density_constant) *density_constant = family_density_constant(f);
    if (gamma) *gamma = family_gamma(f);
  });
}

// ---- potentials

bgs_status bgs_potential_named(const char* profile, int dim, double k0, bgs_potential** out) {
  return guarded([&] {
    if (profile == nullptr) fail(ErrorCode::InvalidArgument, "profile is NULL");
    const std::string name = profile;
    Profile p;
    if (name == "zero")
      p = Profile::Zero;
    else if (name == "constant")
      p = Profile::Constant;
    else if (name == "linear")
      p = Profile::Linear;
    else if (name == "smooth")
      p = Profile::Smooth;
    else
      fail(ErrorCode::InvalidArgument, "unknown profile '" + name + "'");
    emit(out, RadialBandLimitedPotential::named(p, dim, k0));
  });
}

bgs_status bgs_potential_tabulated(int dim, double k0, const double* k, const double* values,
                                   size_t n, bgs_potential** out) {
  return guarded([&] {
    require(n >= 2, "a tabulated profile needs at least two samples");
    require(k != nullptr && values != nullptr, "sample arrays are NULL");
    emit(out, RadialBandLimitedPotential::tabulated(
        dim, k0, std::vector<double>(k, k + n), std::vector<double>(values, values + n)));
  });
}

void bgs_potential_free(bgs_potential* pot) { delete pot; }

bgs_status bgs_potential_get_info(const bgs_potential* pot, bgs_potential_info* out) {
  return guarded([&] {
    const auto& p = deref(pot, "potential").value;
    auto& o = deref(out, "out");
    o.dim = p.dim();
    o.k0 = p.k0();
    o.phi_at_origin = p.phi_at_origin();
    o.phi_hat_at_zero = p.phi_hat_at_zero();
    o.vanishes_at_k0 = p.vanishes_continuously_at_k0() ? 1 : 0;
  });
}

bgs_status bgs_potential_phi(const bgs_potential* pot, double r, double* out) {
  return guarded([&] { deref(out, "out") = phi_value(deref(pot, "potential").value, r); });
}

bgs_status bgs_potential_phi_hat(const bgs_potential* pot, double k, double* out) {
  return guarded([&] {
    require(k >= 0.0, "wavenumber must be nonnegative");
    deref(out, "out") = deref(pot, "potential").value.phi_hat(k);
  });
}

bgs_status bgs_repulsion_new(const char* kind, double r0, double strength, bgs_repulsion** out) {
  return guarded([&] {
    if (kind == nullptr) fail(ErrorCode::InvalidArgument, "repulsion kind is NULL");
    const std::string k = kind;
    if (k == "hard_core" || k == "hard")
      emit(out, ShortRangeRepulsion::hard_core(r0));
    else if (k == "quadratic")
      emit(out, ShortRangeRepulsion::quadratic(r0, strength));
    else
      fail(ErrorCode::InvalidArgument, "unknown repulsion kind '" + k + "'");
  });
}

void bgs_repulsion_free(bgs_repulsion* rep) { delete rep; }

bgs_status bgs_repulsion_psi(const bgs_repulsion* rep, double r, double* out) {
  return guarded([&] { deref(out, "out") = psi_value(deref(rep, "repulsion").value, r); });
}

// ---- unions

bgs_status bgs_union_new(bgs_union** out) {
  return guarded([&] { emit(out, LatticeUnion{}); });
}

void bgs_union_free(bgs_union* u) { delete u; }

bgs_status bgs_union_add(bgs_union* u, const bgs_lattice* lattice, const double* shift) {
  return guarded([&] {
    auto& x = deref(u, "union").value;
    const auto& b = deref(lattice, "lattice").value;
    const Vec3 y = shift ? read_vec(b.dim(), shift, "shift") : Vec3::Zero();
    x.add(b, y);
  });
}

bgs_status bgs_union_density(const bgs_union* u, double* out) {
  return guarded([&] { deref(out, "out") = deref(u, "union").value.density(); });
}

bgs_status bgs_union_size(const bgs_union* u, size_t* out) {
  return guarded([&] { deref(out, "out") = deref(u, "union").value.size(); });
}

// ---- lattice sums

void bgs_schedule_default(bgs_schedule* out) {
  if (out == nullptr) return;
  const TemperingSchedule s;
  out->eps0 = s.eps0;
  out->ratio = s.ratio;
  out->max_steps = s.max_steps;
  out->tau = s.tau;
  out->convergence_tol = s.convergence_tol;
  out->extrapolation_order = s.extrapolation_order;
  out->max_points = s.max_points;
}

bgs_status bgs_tempered_sum(const bgs_potential* pot, const bgs_lattice* lattice, const double* r,
                            double eps, double tau, double* out) {
  return guarded([&] {
    const auto& b = deref(lattice, "lattice").value;
    deref(out, "out") =
        tempered_sum(deref(pot, "potential").value, b, read_vec(b.dim(), r, "r"), eps, tau);
  });
}

bgs_status bgs_fourier_sum(const bgs_potential* pot, const bgs_lattice* lattice, const double* r,
                           double* out) {
  return guarded([&] {
    const auto& b = deref(lattice, "lattice").value;
    deref(out, "out") = fourier_sum(deref(pot, "potential").value, b, read_vec(b.dim(), r, "r"));
  });
}

bgs_status bgs_poisson_verify(const bgs_potential* pot, const bgs_lattice* lattice,
                              const double* r, const bgs_schedule* schedule,
                              bgs_poisson_report** out) {
  return guarded([&] {
    const auto& b = deref(lattice, "lattice").value;
    auto rep = poisson_verify(deref(pot, "potential").value, b, read_vec(b.dim(), r, "r"),
                              read_schedule(schedule));
    emit(out, std::move(rep));
  });
}

void bgs_poisson_report_free(bgs_poisson_report* report) { delete report; }

bgs_status bgs_poisson_report_summary(const bgs_poisson_report* report, bgs_poisson_summary* out) {
  return guarded([&] {
    const auto& r = deref(report, "report").value;
    auto& o = deref(out, "out");
    o.steps = r.steps.size();
    o.fourier = r.fourier;
    o.limit = r.limit;
    o.final_gap = r.final_gap;
    o.converged = r.converged ? 1 : 0;
  });
}

bgs_status bgs_poisson_report_step(const bgs_poisson_report* report, size_t index,
                                   bgs_poisson_step* out) {
  return guarded([&] {
    const auto& r = deref(report, "report").value;
    require(index < r.steps.size(), "step index out of range");
    const auto& s = r.steps[index];
    deref(out, "out") = {s.eps, s.tempered, s.gap, s.extrapolated, s.extrapolated_gap};
  });
}

// ---- energies

bgs_status bgs_epsilon_of_rho(const bgs_potential* pot, double rho, double* out) {
  return guarded([&] { deref(out, "out") = epsilon_of_rho(deref(pot, "potential").value, rho); });
}

bgs_status bgs_mu_of(const bgs_potential* pot, double rho, double* out) {
  return guarded([&] { deref(out, "out") = mu_of(deref(pot, "potential").value, rho); });
}

bgs_status bgs_union_energy(const bgs_potential* pot, const bgs_union* u,
                            bgs_energy_report* out) {
  return guarded([&] {
    const auto r = union_energy_density(deref(pot, "potential").value, deref(u, "union").value);
    fill_report(r, &deref(out, "out"));
  });
}

bgs_status bgs_energy_with_repulsion(const bgs_potential* pot, const bgs_repulsion* rep,
                                     const bgs_lattice* lattice, bgs_energy_report* out,
                                     int* feasible, double* psi_energy) {
  return guarded([&] {
    const auto r = energy_with_repulsion(deref(pot, "potential").value,
                                         deref(rep, "repulsion").value,
                                         deref(lattice, "lattice").value);
    fill_report(r.energy, &deref(out, "out"));
    if (feasible) *feasible = r.feasible ? 1 : 0;
    if (psi_energy) *psi_energy = r.psi_energy;
  });
}

bgs_status bgs_direct_energy(const bgs_potential* pot, const bgs_union* u,
                             const bgs_schedule* schedule, double* out) {
  return guarded([&] {
    deref(out, "out") = direct_energy_density(deref(pot, "potential").value,
                                              deref(u, "union").value, read_schedule(schedule));
  });
}

// ---- perturbations

bgs_status bgs_spec_new(const bgs_union* background, int number_preserving, bgs_spec** out) {
  return guarded([&] {
    PerturbationSpec spec;
    spec.background = deref(background, "background").value;
    require(!spec.background.empty(), "background union is empty");
    spec.number_preserving = number_preserving != 0;
    emit(out, std::move(spec));
  });
}

bgs_status bgs_spec_random(const bgs_union* background, uint64_t seed, int removed, int added,
                           bgs_spec** out) {
  return guarded([&] {
    std::mt19937_64 rng(seed);
    RandomSpecOptions opts;
    opts.removed = removed;
    opts.added = added;
    emit(out, random_spec(deref(background, "background").value, rng, opts));
  });
}

void bgs_spec_free(bgs_spec* spec) { delete spec; }

bgs_status bgs_spec_remove(bgs_spec* spec, size_t component, const long* coeffs) {
  return guarded([&] {
    auto& s = deref(spec, "spec").value;
    require(coeffs != nullptr, "coeffs is NULL");
    RemovedPoint p;
    p.component = component;
    for (int k = 0; k < s.background.dim(); ++k) p.coeffs[k] = coeffs[k];
    s.removed.push_back(p);
  });
}

bgs_status bgs_spec_add(bgs_spec* spec, const double* position) {
  return guarded([&] {
    auto& s = deref(spec, "spec").value;
    s.added.push_back(read_vec(s.background.dim(), position, "position"));
  });
}

bgs_status bgs_spec_counts(const bgs_spec* spec, size_t* removed, size_t* added,
                           int* number_preserving) {
  return guarded([&] {
    const auto& s = deref(spec, "spec").value;
    if (removed) *removed = s.removed.size();
    if (added) *added = s.added.size();
    if (number_preserving) *number_preserving = s.number_preserving ? 1 : 0;
  });
}

bgs_status bgs_spec_removed_point(const bgs_spec* spec, size_t index, size_t* component,
                                  long* coeffs, double* position) {
  return guarded([&] {
    const auto& s = deref(spec, "spec").value;
    require(index < s.removed.size(), "removed point index out of range");
    const auto& p = s.removed[index];
    if (component) *component = p.component;
    if (coeffs)
      for (int k = 0; k < 3; ++k) coeffs[k] = p.coeffs[k];
    if (position) {
      const Vec3 x = s.background.point(p.component, p.coeffs);
      for (int k = 0; k < 3; ++k) position[k] = x[k];
    }
  });
}

bgs_status bgs_spec_added_point(const bgs_spec* spec, size_t index, double* position) {
  return guarded([&] {
    const auto& s = deref(spec, "spec").value;
    require(index < s.added.size(), "added point index out of range");
    require(position != nullptr, "position is NULL");
    for (int k = 0; k < 3; ++k) position[k] = s.added[index][k];
  });
}

bgs_status bgs_spec_validate(const bgs_spec* spec) {
  return guarded([&] { deref(spec, "spec").value.validate(); });
}

bgs_status bgs_delta_u_fourier(const bgs_potential* pot, const bgs_spec* spec, double mu,
                               double* out) {
  return guarded([&] {
    deref(out, "out") =
        delta_u_fourier(deref(pot, "potential").value, deref(spec, "spec").value, mu);
  });
}

bgs_status bgs_delta_u_direct(const bgs_potential* pot, const bgs_spec* spec, double mu,
                              const bgs_schedule* schedule, double* out) {
  return guarded([&] {
    deref(out, "out") = delta_u_direct(deref(pot, "potential").value, deref(spec, "spec").value,
                                       mu, read_schedule(schedule));
  });
}

bgs_status bgs_metastability_compare(const bgs_potential* pot, const bgs_union* x,
                                     const bgs_union* y, bgs_metastability* out) {
  return guarded([&] {
    const auto v = metastability_compare(deref(pot, "potential").value, deref(x, "x").value,
                                         deref(y, "y").value);
    auto& o = deref(out, "out");
    o.same_density = v.same_density ? 1 : 0;
    o.e_x = v.e_x;
    o.e_y = v.e_y;
    o.x_excluded = v.x_excluded ? 1 : 0;
  });
}

// ---- stability

bgs_status bgs_gamma_max(int dim, double* out) {
  return guarded([&] { deref(out, "out") = gamma_max(dim); });
}

bgs_status bgs_rho_d(int dim, double k0, double* out) {
  return guarded([&] {
    require(k0 > 0.0, "K0 must be positive");
    deref(out, "out") = rho_d(dim, k0);
  });
}

bgs_status bgs_threshold_density(const char* tag, int dim, double k0, double* out) {
  return guarded([&] { deref(out, "out") = threshold_density(parse_family(tag), dim, k0); });
}

bgs_status bgs_contact_density(const char* tag, int dim, double r0, double* out) {
  return guarded([&] { deref(out, "out") = contact_density(parse_family(tag), dim, r0); });
}

bgs_status bgs_stability_interval(const char* tag, int dim, double k0, double r0,
                                  bgs_interval* out) {
  return guarded([&] {
    require(k0 > 0.0 && r0 > 0.0, "K0 and r0 must be positive");
    fill_interval(stability_interval(parse_family(tag), dim, k0, r0), &deref(out, "out"));
  });
}

bgs_status bgs_constructive_interval(const char* tag, int dim, double k0, double r0,
                                     bgs_interval* out) {
  return guarded([&] {
    fill_interval(constructive_interval(parse_family(tag), dim, k0, r0), &deref(out, "out"));
  });
}

bgs_status bgs_valence_density(int z, double k0, double* out) {
  return guarded([&] { deref(out, "out") = valence_density(z, k0); });
}

bgs_status bgs_gamma_search(int dim, long trials, uint64_t seed, const double* seed_basis,
                            bgs_gamma_result* out) {
  return guarded([&] {
    check_dim(dim);
    GammaSearchOptions opts;
    opts.trials = trials;
    opts.seed = seed;
    if (seed_basis) opts.seed_basis = read_basis(dim, seed_basis);
    const auto r = gamma_search(dim, opts);
    auto& o = deref(out, "out");
    o.gamma = r.gamma;
    write_basis(r.basis, o.basis);
    o.evaluations = r.evaluations;
  });
}

bgs_status bgs_endpoint_sweep(int dim, double rho, double k0, double r0, long trials,
                              uint64_t seed, long* both) {
  return guarded([&] {
    check_dim(dim);
    deref(both, "both") = random_endpoint_sweep(dim, rho, k0, r0, trials, seed).both_conditions;
  });
}

bgs_status bgs_phase_diagram_scan(int dim, double k0, const double* r0k0, size_t nr0k0,
                                  const double* rho_over_rho_d, size_t nrho,
                                  const char* const* families, size_t nfamilies,
                                  bgs_phase_diagram** out) {
  return guarded([&] {
    check_dim(dim);
    require((r0k0 != nullptr || nr0k0 == 0) && (rho_over_rho_d != nullptr || nrho == 0),
            "grid arrays are NULL");
    std::vector<LatticeFamily> fams;
    if (families == nullptr || nfamilies == 0) {
      fams = default_families(dim);
    } else {
      for (size_t i = 0; i < nfamilies; ++i) fams.push_back(parse_family(families[i]));
    }
    const auto rows =
        phase_diagram_scan(dim, k0, std::vector<double>(r0k0, r0k0 + nr0k0),
                           std::vector<double>(rho_over_rho_d, rho_over_rho_d + nrho), fams);
    auto diagram = std::make_unique<bgs_phase_diagram>();
    diagram->rows.reserve(rows.size());
    for (const auto& row : rows) {
      bgs_phase_diagram::Row r{row, {}, {}};
      for (std::size_t i = 0; i < row.stable.size(); ++i) {
        if (i) r.stable += ';';
        r.stable += family_tag(row.stable[i]);
      }
      if (row.unique_gsc) r.unique = family_tag(*row.unique_gsc);
      diagram->rows.push_back(std::move(r));
    }
    auto& slot = deref(out, "out");
    slot = diagram.release();
  });
}

void bgs_phase_diagram_free(bgs_phase_diagram* diagram) { delete diagram; }

bgs_status bgs_phase_diagram_size(const bgs_phase_diagram* diagram, size_t* out) {
  return guarded([&] { deref(out, "out") = deref(diagram, "diagram").rows.size(); });
}

bgs_status bgs_phase_diagram_row(const bgs_phase_diagram* diagram, size_t index,
                                 bgs_phase_row* out) {
  return guarded([&] {
    const auto& d = deref(diagram, "diagram");
    require(index < d.rows.size(), "row index out of range");
    const auto& r = d.rows[index];
    auto& o = deref(out, "out");
    o.r0k0 = r.row.r0k0;
    o.rho_over_rho_d = r.row.rho_over_rho_d;
    o.stable = r.stable.c_str();
    o.unique_gsc = r.unique.c_str();
    o.gap = r.row.gap ? 1 : 0;
    o.prediction = r.row.prediction ? 1 : 0;
  });
}

}  // extern "C"
