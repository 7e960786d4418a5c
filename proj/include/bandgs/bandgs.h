#pragma once

/*
 * C interface to the band-limited ground-state library.
 *
 * Objects are opaque handles created by bgs_*_new / bgs_*_create style calls
 * and released by the matching bgs_*_free (free accepts NULL). Every fallible
 * call returns a bgs_status; on failure bgs_last_error() describes the problem
 * for the calling thread until its next API call.
 *
 * Vectors are passed as `dim` doubles. Bases are row-major with one primitive
 * vector per row: basis[i * dim + j] is component j of vector i. Fixed-size
 * output matrices use a 3x3 layout with unused entries zero.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(BGS_BUILDING_LIBRARY)
#define BGS_API __declspec(dllexport)
#else
#define BGS_API __declspec(dllimport)
#endif
#else
#define BGS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bgs_status {
  BGS_OK = 0,
  BGS_ERR_INVALID_ARGUMENT = 1,
  BGS_ERR_DEGENERATE_BASIS = 2,
  BGS_ERR_FAMILY_DIMENSION_MISMATCH = 3,
  BGS_ERR_NONCONVERGENT_QUADRATURE = 4,
  BGS_ERR_DISCONTINUITY_ON_SHELL = 5,
  BGS_ERR_DUAL_TERM_NONZERO = 6,
  BGS_ERR_INVALID_PERTURBATION = 7,
  BGS_ERR_UNSUPPORTED_UNION = 8,
  BGS_ERR_BUFFER_TOO_SMALL = 9,
  BGS_ERR_OUT_OF_MEMORY = 10,
  BGS_ERR_INTERNAL = 11
} bgs_status;

BGS_API const char* bgs_version(void);
BGS_API const char* bgs_status_name(bgs_status status);
BGS_API const char* bgs_last_error(void);

typedef struct bgs_lattice bgs_lattice;
typedef struct bgs_potential bgs_potential;
typedef struct bgs_repulsion bgs_repulsion;
typedef struct bgs_union bgs_union;
typedef struct bgs_spec bgs_spec;
typedef struct bgs_poisson_report bgs_poisson_report;
typedef struct bgs_phase_diagram bgs_phase_diagram;

/* ---- lattices ---- */

typedef struct bgs_lattice_info {
  int dim;
  double density;
  double shortest_length;      /* r_B */
  double dual_shortest_length; /* q_{B*} */
  double gamma;                /* r_B q_{B*} */
  double basis[3][3];
  double dual_basis[3][3];
  long shortest_witness[3];
} bgs_lattice_info;

BGS_API bgs_status bgs_lattice_new(int dim, const double* basis, bgs_lattice** out);
/* tag: chain, square, triangular, sc, bcc, fcc, sh */
BGS_API bgs_status bgs_lattice_family(const char* tag, int dim, double density, bgs_lattice** out);
BGS_API bgs_status bgs_lattice_dual(const bgs_lattice* lattice, bgs_lattice** out);
/* Rotation about `axis` (3 components) by `angle` radians; 3D only. */
BGS_API bgs_status bgs_lattice_rotated(const bgs_lattice* lattice, const double* axis, double angle,
                                       bgs_lattice** out);
BGS_API void bgs_lattice_free(bgs_lattice* lattice);
BGS_API bgs_status bgs_lattice_get_info(const bgs_lattice* lattice, bgs_lattice_info* out);
/* Writes up to `capacity` points (dim doubles each) sorted by distance; *count
   receives the total. Returns BGS_ERR_BUFFER_TOO_SMALL if capacity < total. */
BGS_API bgs_status bgs_lattice_points_in_ball(const bgs_lattice* lattice, const double* center,
                                              double radius, double* positions, size_t capacity,
                                              size_t* count);

BGS_API bgs_status bgs_family_constants(const char* tag, int* dim, double* density_constant,
                                        double* gamma);

/* ---- potentials ---- */

typedef struct bgs_potential_info {
  int dim;
  double k0;
  double phi_at_origin;
  double phi_hat_at_zero;
  int vanishes_at_k0;
} bgs_potential_info;

/* profile: zero, constant, linear, smooth */
BGS_API bgs_status bgs_potential_named(const char* profile, int dim, double k0,
                                       bgs_potential** out);
/* Linear interpolation of n samples; k[0] = 0 and k[n-1] = k0. */
BGS_API bgs_status bgs_potential_tabulated(int dim, double k0, const double* k, const double* values,
                                           size_t n, bgs_potential** out);
BGS_API void bgs_potential_free(bgs_potential* pot);
BGS_API bgs_status bgs_potential_get_info(const bgs_potential* pot, bgs_potential_info* out);
BGS_API bgs_status bgs_potential_phi(const bgs_potential* pot, double r, double* out);
BGS_API bgs_status bgs_potential_phi_hat(const bgs_potential* pot, double k, double* out);

/* kind: hard_core, quadratic (strength * (1 - r/r0)^2) */
BGS_API bgs_status bgs_repulsion_new(const char* kind, double r0, double strength,
                                     bgs_repulsion** out);
BGS_API void bgs_repulsion_free(bgs_repulsion* rep);
BGS_API bgs_status bgs_repulsion_psi(const bgs_repulsion* rep, double r, double* out);

/* ---- unions ---- */

BGS_API bgs_status bgs_union_new(bgs_union** out);
BGS_API void bgs_union_free(bgs_union* u);
/* shift may be NULL for no shift. */
BGS_API bgs_status bgs_union_add(bgs_union* u, const bgs_lattice* lattice, const double* shift);
BGS_API bgs_status bgs_union_density(const bgs_union* u, double* out);
BGS_API bgs_status bgs_union_size(const bgs_union* u, size_t* out);

/* ---- lattice sums ---- */

typedef struct bgs_schedule {
  double eps0; /* <= 0 selects K0^2 */
  double ratio;
  int max_steps;
  double tau;
  double convergence_tol;
  int extrapolation_order;
  double max_points;
} bgs_schedule;

BGS_API void bgs_schedule_default(bgs_schedule* out);

BGS_API bgs_status bgs_tempered_sum(const bgs_potential* pot, const bgs_lattice* lattice,
                                    const double* r, double eps, double tau, double* out);
BGS_API bgs_status bgs_fourier_sum(const bgs_potential* pot, const bgs_lattice* lattice,
                                   const double* r, double* out);

typedef struct bgs_poisson_step {
  double eps;
  double tempered;
  double gap;
  double extrapolated;
  double extrapolated_gap;
} bgs_poisson_step;

typedef struct bgs_poisson_summary {
  size_t steps;
  double fourier;
  double limit;
  double final_gap;
  int converged;
} bgs_poisson_summary;

/* schedule may be NULL for defaults. */
BGS_API bgs_status bgs_poisson_verify(const bgs_potential* pot, const bgs_lattice* lattice,
                                      const double* r, const bgs_schedule* schedule,
                                      bgs_poisson_report** out);
BGS_API void bgs_poisson_report_free(bgs_poisson_report* report);
BGS_API bgs_status bgs_poisson_report_summary(const bgs_poisson_report* report,
                                              bgs_poisson_summary* out);
BGS_API bgs_status bgs_poisson_report_step(const bgs_poisson_report* report, size_t index,
                                           bgs_poisson_step* out);

/* ---- energies ---- */

typedef struct bgs_energy_report {
  double rho;
  double epsilon_rho;
  double e_x;
  double excess;
  double mu;
  int is_gsc_candidate;
} bgs_energy_report;

BGS_API bgs_status bgs_epsilon_of_rho(const bgs_potential* pot, double rho, double* out);
BGS_API bgs_status bgs_mu_of(const bgs_potential* pot, double rho, double* out);
BGS_API bgs_status bgs_union_energy(const bgs_potential* pot, const bgs_union* u,
                                    bgs_energy_report* out);
/* feasible and psi_energy may be NULL. */
BGS_API bgs_status bgs_energy_with_repulsion(const bgs_potential* pot, const bgs_repulsion* rep,
                                             const bgs_lattice* lattice, bgs_energy_report* out,
                                             int* feasible, double* psi_energy);
BGS_API bgs_status bgs_direct_energy(const bgs_potential* pot, const bgs_union* u,
                                     const bgs_schedule* schedule, double* out);

/* ---- perturbations ---- */

BGS_API bgs_status bgs_spec_new(const bgs_union* background, int number_preserving,
                                bgs_spec** out);
/* Random spec: `removed` points near the origin cell replaced by `added` points. */
BGS_API bgs_status bgs_spec_random(const bgs_union* background, uint64_t seed, int removed,
                                   int added, bgs_spec** out);
BGS_API void bgs_spec_free(bgs_spec* spec);
/* coeffs holds dim integer lattice coordinates in the component's basis. */
BGS_API bgs_status bgs_spec_remove(bgs_spec* spec, size_t component, const long* coeffs);
BGS_API bgs_status bgs_spec_add(bgs_spec* spec, const double* position);
BGS_API bgs_status bgs_spec_counts(const bgs_spec* spec, size_t* removed, size_t* added,
                                   int* number_preserving);
/* coeffs receives 3 values, position receives 3 values; either may be NULL. */
BGS_API bgs_status bgs_spec_removed_point(const bgs_spec* spec, size_t index, size_t* component,
                                          long* coeffs, double* position);
BGS_API bgs_status bgs_spec_added_point(const bgs_spec* spec, size_t index, double* position);
BGS_API bgs_status bgs_spec_validate(const bgs_spec* spec);

BGS_API bgs_status bgs_delta_u_fourier(const bgs_potential* pot, const bgs_spec* spec, double mu,
                                       double* out);
BGS_API bgs_status bgs_delta_u_direct(const bgs_potential* pot, const bgs_spec* spec, double mu,
                                      const bgs_schedule* schedule, double* out);

typedef struct bgs_metastability {
  int same_density;
  double e_x;
  double e_y;
  int x_excluded;
} bgs_metastability;

BGS_API bgs_status bgs_metastability_compare(const bgs_potential* pot, const bgs_union* x,
                                             const bgs_union* y, bgs_metastability* out);

/* ---- stability ---- */

typedef struct bgs_interval {
  double rho_low;
  double rho_high;
  int nonempty;
} bgs_interval;

BGS_API bgs_status bgs_gamma_max(int dim, double* out);
BGS_API bgs_status bgs_rho_d(int dim, double k0, double* out);
BGS_API bgs_status bgs_threshold_density(const char* tag, int dim, double k0, double* out);
BGS_API bgs_status bgs_contact_density(const char* tag, int dim, double r0, double* out);
BGS_API bgs_status bgs_stability_interval(const char* tag, int dim, double k0, double r0,
                                          bgs_interval* out);
BGS_API bgs_status bgs_constructive_interval(const char* tag, int dim, double k0, double r0,
                                             bgs_interval* out);
BGS_API bgs_status bgs_valence_density(int z, double k0, double* out);

typedef struct bgs_gamma_result {
  double gamma;
  double basis[3][3];
  long evaluations;
} bgs_gamma_result;

/* seed_basis (dim x dim, row-major) may be NULL. */
BGS_API bgs_status bgs_gamma_search(int dim, long trials, uint64_t seed, const double* seed_basis,
                                    bgs_gamma_result* out);

/* Random lattices at density rho; *both counts those with q >= K0 and r >= r0. */
BGS_API bgs_status bgs_endpoint_sweep(int dim, double rho, double k0, double r0, long trials,
                                      uint64_t seed, long* both);

typedef struct bgs_phase_row {
  double r0k0;
  double rho_over_rho_d;
  const char* stable;     /* semicolon-joined tags, owned by the diagram */
  const char* unique_gsc; /* empty when none */
  int gap;
  int prediction;
} bgs_phase_row;

/* families: NULL (with nfamilies 0) selects the default list for dim. */
BGS_API bgs_status bgs_phase_diagram_scan(int dim, double k0, const double* r0k0, size_t nr0k0,
                                          const double* rho_over_rho_d, size_t nrho,
                                          const char* const* families, size_t nfamilies,
                                          bgs_phase_diagram** out);
BGS_API void bgs_phase_diagram_free(bgs_phase_diagram* diagram);
BGS_API bgs_status bgs_phase_diagram_size(const bgs_phase_diagram* diagram, size_t* out);
BGS_API bgs_status bgs_phase_diagram_row(const bgs_phase_diagram* diagram, size_t index,
                                         bgs_phase_row* out);

#ifdef __cplusplus
}
#endif
