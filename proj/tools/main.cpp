#include <bandgs/bandgs.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "config.hpp"
#include "table.hpp"

namespace bgs_cli {
namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitDomain = 2;
constexpr int kExitNotConverged = 3;

class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void check(bgs_status s) {
  if (s != BGS_OK) throw DomainError(std::string(bgs_status_name(s)) + ": " + bgs_last_error());
}

template <class T>
using Owned = std::unique_ptr<T, void (*)(T*)>;

Owned<bgs_lattice> own(bgs_lattice* p) { return {p, bgs_lattice_free}; }
Owned<bgs_potential> own(bgs_potential* p) { return {p, bgs_potential_free}; }
Owned<bgs_repulsion> own(bgs_repulsion* p) { return {p, bgs_repulsion_free}; }
Owned<bgs_union> own(bgs_union* p) { return {p, bgs_union_free}; }
Owned<bgs_spec> own(bgs_spec* p) { return {p, bgs_spec_free}; }
Owned<bgs_poisson_report> own(bgs_poisson_report* p) { return {p, bgs_poisson_report_free}; }
Owned<bgs_phase_diagram> own(bgs_phase_diagram* p) { return {p, bgs_phase_diagram_free}; }

struct Options {
  std::string config_path;
  std::string out_path;
  std::string format = "csv";
  std::optional<std::uint64_t> seed;
  std::optional<int> dim;
};

struct Context {
  Config cfg;
  Options opts;
  int dim = 3;
  std::uint64_t seed = 1;
};

std::string basis_text(const double m[3][3], int dim) {
  std::string out;
  for (int i = 0; i < dim; ++i) {
    if (i) out += "; ";
    for (int j = 0; j < dim; ++j) out += (j ? " " : "") + format_double(m[i][j]);
  }
  return out;
}

// ---- building library objects from the config

Owned<bgs_potential> make_potential(const Context& ctx) {
  const std::string profile = ctx.cfg.text_or("potential.profile", "linear");
  const double k0 = ctx.cfg.number_or("potential.k0", 1.0);
  bgs_potential* p = nullptr;
  if (profile == "tabulated") {
    const auto path = ctx.cfg.text("potential.table");
    if (!path) throw UsageError("potential.profile = tabulated needs potential.table");
    std::ifstream in(*path);
    if (!in) throw UsageError("cannot open potential table '" + *path + "'");
    std::vector<double> k, v;
    std::string line;
    for (int n = 1; std::getline(in, line); ++n) {
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.resize(hash);
      std::istringstream row(line);
      double a, b;
      if (!(row >> a)) continue;
      std::string extra;
      if (!(row >> b) || (row >> extra))
        throw UsageError(*path + ":" + std::to_string(n) + ": expected two numbers 'k value'");
      k.push_back(a);
      v.push_back(b);
    }
    check(bgs_potential_tabulated(ctx.dim, k0, k.data(), v.data(), k.size(), &p));
  } else {
    check(bgs_potential_named(profile.c_str(), ctx.dim, k0, &p));
  }
  return own(p);
}

std::optional<Owned<bgs_repulsion>> make_repulsion(const Context& ctx) {
  if (!ctx.cfg.has("repulsion.kind") && !ctx.cfg.has("repulsion.r0")) return std::nullopt;
  const std::string kind = ctx.cfg.text_or("repulsion.kind", "hard_core");
  bgs_repulsion* r = nullptr;
  check(bgs_repulsion_new(kind.c_str(), ctx.cfg.number("repulsion.r0"),
                          ctx.cfg.number_or("repulsion.strength", 1.0), &r));
  return own(r);
}

double resolve_density(const Context& ctx, const std::string& prefix, const std::string& family) {
  const double k0 = ctx.cfg.number_or("potential.k0", 1.0);
  const bool has_density = ctx.cfg.has(prefix + ".density");
  const bool has_ratio = ctx.cfg.has(prefix + ".density_over_rho_d");
  if (has_density && has_ratio)
    throw UsageError(prefix + ": give either density or density_over_rho_d, not both");
  if (has_ratio) {
    double rd = 0.0;
    check(bgs_rho_d(ctx.dim, k0, &rd));
    return ctx.cfg.number(prefix + ".density_over_rho_d") * rd;
  }
  const auto text = ctx.cfg.text(prefix + ".density");
  if (!text) throw UsageError(prefix + ": missing density (or density_over_rho_d)");
  double rho = 0.0;
  if (*text == "threshold") {
    check(bgs_threshold_density(family.c_str(), ctx.dim, k0, &rho));
  } else if (*text == "contact") {
    check(bgs_contact_density(family.c_str(), ctx.dim, ctx.cfg.number("repulsion.r0"), &rho));
  } else {
    rho = ctx.cfg.number(prefix + ".density");
  }
  return rho;
}

// A lattice from "<prefix>.family/density" or "<prefix>.basis", optionally rotated.
Owned<bgs_lattice> make_lattice(const Context& ctx, const std::string& prefix) {
  bgs_lattice* b = nullptr;
  const bool has_basis = ctx.cfg.has(prefix + ".basis");
  const auto family = ctx.cfg.text(prefix + ".family");
  if (has_basis && family) throw UsageError(prefix + ": give either family or basis, not both");
  if (has_basis) {
    const auto rows = ctx.cfg.matrix(prefix + ".basis", static_cast<std::size_t>(ctx.dim));
    if (rows.size() != static_cast<std::size_t>(ctx.dim))
      throw UsageError(prefix + ".basis: expected " + std::to_string(ctx.dim) + " rows, got " +
                       std::to_string(rows.size()));
    std::vector<double> flat;
    for (const auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
    check(bgs_lattice_new(ctx.dim, flat.data(), &b));
  } else if (family) {
    check(bgs_lattice_family(family->c_str(), ctx.dim, resolve_density(ctx, prefix, *family), &b));
  } else {
    throw UsageError(prefix + ": missing family or basis");
  }
  auto lattice = own(b);
  if (ctx.cfg.has(prefix + ".rotation")) {
    const auto v = ctx.cfg.numbers(prefix + ".rotation");
    if (v.size() != 4) throw UsageError(prefix + ".rotation: expected 'ax ay az angle'");
    bgs_lattice* r = nullptr;
    check(bgs_lattice_rotated(lattice.get(), v.data(), v[3], &r));
    lattice = own(r);
  }
  return lattice;
}

std::vector<double> read_vector(const Context& ctx, const std::string& key) {
  auto v = ctx.cfg.numbers(key);
  if (v.size() != static_cast<std::size_t>(ctx.dim))
    throw UsageError(key + ": expected " + std::to_string(ctx.dim) + " components, got " +
                     std::to_string(v.size()));
  return v;
}

Owned<bgs_union> make_union(const Context& ctx) {
  bgs_union* u = nullptr;
  check(bgs_union_new(&u));
  auto x = own(u);
  if (ctx.cfg.has("lattice.family") || ctx.cfg.has("lattice.basis")) {
    const auto lattice = make_lattice(ctx, "lattice");
    if (ctx.cfg.has("union.shifts")) {
      for (const auto& s : ctx.cfg.matrix("union.shifts", static_cast<std::size_t>(ctx.dim)))
        check(bgs_union_add(x.get(), lattice.get(), s.data()));
    } else {
      check(bgs_union_add(x.get(), lattice.get(), nullptr));
    }
  }
  std::vector<long> indices;
  for (const auto& key : ctx.cfg.keys_with_prefix("union.")) {
    const auto dot = key.find('.', 6);
    if (dot == std::string::npos) continue;
    const long n = std::stol(key.substr(6, dot - 6));
    if (indices.empty() || indices.back() != n) indices.push_back(n);
  }
  std::sort(indices.begin(), indices.end());
  indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
  for (long n : indices) {
    const std::string prefix = "union." + std::to_string(n);
    const auto lattice = make_lattice(ctx, prefix);
    std::vector<double> shift(static_cast<std::size_t>(ctx.dim), 0.0);
    if (ctx.cfg.has(prefix + ".shift")) shift = read_vector(ctx, prefix + ".shift");
    check(bgs_union_add(x.get(), lattice.get(), shift.data()));
  }
  std::size_t size = 0;
  check(bgs_union_size(x.get(), &size));
  if (size == 0) throw UsageError("no lattice configured (lattice.* or union.<n>.*)");
  return x;
}

bgs_schedule make_schedule(const Context& ctx) {
  bgs_schedule s;
  bgs_schedule_default(&s);
  s.eps0 = ctx.cfg.number_or("schedule.eps0", s.eps0);
  s.ratio = ctx.cfg.number_or("schedule.ratio", s.ratio);
  s.max_steps = static_cast<int>(ctx.cfg.integer_or("schedule.max_steps", s.max_steps));
  s.tau = ctx.cfg.number_or("schedule.tau", s.tau);
  s.convergence_tol = ctx.cfg.number_or("schedule.tol", s.convergence_tol);
  s.extrapolation_order =
      static_cast<int>(ctx.cfg.integer_or("schedule.extrapolation_order", s.extrapolation_order));
  s.max_points = ctx.cfg.number_or("schedule.max_points", s.max_points);
  return s;
}

// ---- subcommands

Table cmd_lattice_info(const Context& ctx) {
  const auto lattice = make_lattice(ctx, "lattice");
  bgs_lattice_info info;
  check(bgs_lattice_get_info(lattice.get(), &info));
  const double k0 = ctx.cfg.number_or("potential.k0", 1.0);
  double rd = 0.0;
  check(bgs_rho_d(info.dim, k0, &rd));
  Table t;
  t.command = "lattice-info";
  t.columns = {"dim",  "density", "rho_over_rho_d", "r_b",  "q_b",
               "gamma", "q_over_k0", "basis",        "dual_basis"};
  t.add_row({static_cast<long>(info.dim), info.density, info.density / rd, info.shortest_length,
             info.dual_shortest_length, info.gamma, info.dual_shortest_length / k0,
             basis_text(info.basis, info.dim), basis_text(info.dual_basis, info.dim)});
  t.summary = {{"k0", k0}};
  return t;
}

Table cmd_potential_eval(const Context& ctx) {
  const auto pot = make_potential(ctx);
  const auto rep = make_repulsion(ctx);
  bgs_potential_info info;
  check(bgs_potential_get_info(pot.get(), &info));

  std::vector<double> radii;
  if (ctx.cfg.has("eval.radii")) {
    radii = ctx.cfg.numbers("eval.radii");
  } else {
    const double rmax = ctx.cfg.number_or("eval.rmax", 50.0 / info.k0);
    const long n = ctx.cfg.integer_or("eval.count", 101);
    if (n < 1) throw UsageError("eval.count must be at least 1");
    for (long i = 0; i < n; ++i)
      radii.push_back(n == 1 ? 0.0 : rmax * static_cast<double>(i) / static_cast<double>(n - 1));
  }

  Table t;
  t.command = "potential-eval";
  t.columns = {"r", "phi"};
  if (rep) t.columns.push_back("psi");
  for (double r : radii) {
    double phi = 0.0;
    check(bgs_potential_phi(pot.get(), r, &phi));
    std::vector<Cell> row{r, phi};
    if (rep) {
      double psi = 0.0;
      check(bgs_repulsion_psi(rep->get(), r, &psi));
      row.push_back(psi);
    }
    t.add_row(std::move(row));
  }
  t.summary = {{"dim", static_cast<long>(info.dim)},
               {"k0", info.k0},
               {"profile", ctx.cfg.text_or("potential.profile", "linear")},
               {"phi_at_origin", info.phi_at_origin},
               {"phi_hat_at_zero", info.phi_hat_at_zero},
               {"vanishes_at_k0", info.vanishes_at_k0 != 0}};
  return t;
}

Table cmd_verify_poisson(const Context& ctx, bool& converged) {
  const auto pot = make_potential(ctx);
  const auto lattice = make_lattice(ctx, "lattice");
  std::vector<double> r(static_cast<std::size_t>(ctx.dim), 0.0);
  if (ctx.cfg.has("point")) r = read_vector(ctx, "point");
  const bgs_schedule s = make_schedule(ctx);
  bgs_poisson_report* raw = nullptr;
  check(bgs_poisson_verify(pot.get(), lattice.get(), r.data(), &s, &raw));
  const auto report = own(raw);
  bgs_poisson_summary sum;
  check(bgs_poisson_report_summary(report.get(), &sum));

  Table t;
  t.command = "verify-poisson";
  t.columns = {"eps", "tempered_value", "gap_to_fourier", "extrapolated", "extrapolated_gap"};
  for (std::size_t i = 0; i < sum.steps; ++i) {
    bgs_poisson_step st;
    check(bgs_poisson_report_step(report.get(), i, &st));
    t.add_row({st.eps, st.tempered, st.gap, st.extrapolated, st.extrapolated_gap});
  }
  t.summary = {{"fourier", sum.fourier},
               {"limit", sum.limit},
               {"final_gap", sum.final_gap},
               {"converged", sum.converged != 0},
               {"steps", static_cast<long>(sum.steps)}};
  converged = sum.converged != 0;
  return t;
}

Table cmd_energy(const Context& ctx) {
  const auto pot = make_potential(ctx);
  const auto rep = make_repulsion(ctx);
  const auto x = make_union(ctx);

  Table t;
  t.command = "energy";
  t.columns = {"rho", "epsilon_rho", "e_x", "excess", "mu", "is_gsc_candidate"};
  bgs_energy_report r;
  std::vector<Cell> extra;
  if (rep) {
    std::size_t size = 0;
    check(bgs_union_size(x.get(), &size));
    if (size != 1 || ctx.cfg.has("union.shifts"))
      throw DomainError("UnsupportedUnion: energies with repulsion are defined for a single Bravais "
                        "lattice only");
    const auto lattice = make_lattice(ctx, "lattice");
    int feasible = 1;
    double psi = 0.0;
    check(bgs_energy_with_repulsion(pot.get(), rep->get(), lattice.get(), &r, &feasible, &psi));
    t.columns.insert(t.columns.end(), {"feasible", "psi_energy"});
    extra = {feasible != 0, psi};
  } else {
    check(bgs_union_energy(pot.get(), x.get(), &r));
  }
  if (ctx.cfg.flag_or("energy.direct", false)) {
    const bgs_schedule s = make_schedule(ctx);
    double direct = 0.0;
    check(bgs_direct_energy(pot.get(), x.get(), &s, &direct));
    t.columns.push_back("e_x_direct");
    extra.push_back(direct);
  }
  std::vector<Cell> row{r.rho, r.epsilon_rho, r.e_x, r.excess, r.mu, r.is_gsc_candidate != 0};
  row.insert(row.end(), extra.begin(), extra.end());
  t.add_row(std::move(row));
  return t;
}

std::vector<Owned<bgs_spec>> specs_from_file(const Context& ctx, const bgs_union* background,
                                             const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open spec file '" + path + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(path + ": " + e.what());
  }
  const nlohmann::json& list = doc.is_object() && doc.contains("specs") ? doc["specs"] : doc;
  if (!list.is_array()) throw UsageError(path + ": expected a list of specs");

  std::vector<Owned<bgs_spec>> out;
  try {
    for (const auto& item : list) {
      const bool np = item.value("number_preserving", true);
      bgs_spec* raw = nullptr;
      check(bgs_spec_new(background, np ? 1 : 0, &raw));
      auto spec = own(raw);
      for (const auto& rp : item.at("removed")) {
        const auto coeffs = rp.at("coeffs").get<std::vector<long>>();
        if (coeffs.size() != static_cast<std::size_t>(ctx.dim))
          throw UsageError(path + ": removed point coeffs must have " + std::to_string(ctx.dim) +
                           " entries");
        check(bgs_spec_remove(spec.get(), rp.value("component", std::size_t{0}), coeffs.data()));
      }
      for (const auto& ap : item.at("added")) {
        const auto x = ap.get<std::vector<double>>();
        if (x.size() != static_cast<std::size_t>(ctx.dim))
          throw UsageError(path + ": added points must have " + std::to_string(ctx.dim) +
                           " coordinates");
        check(bgs_spec_add(spec.get(), x.data()));
      }
      check(bgs_spec_validate(spec.get()));
      out.push_back(std::move(spec));
    }
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(path + ": " + e.what());
  }
  return out;
}

Table cmd_gsc_test(const Context& ctx) {
  const auto pot = make_potential(ctx);
  const auto x = make_union(ctx);
  bgs_potential_info info;
  check(bgs_potential_get_info(pot.get(), &info));
  double rho = 0.0;
  check(bgs_union_density(x.get(), &rho));
  double mu = 0.0;
  const std::string mu_text = ctx.cfg.text_or("gsc.mu", "auto");
  if (mu_text == "auto")
    check(bgs_mu_of(pot.get(), rho, &mu));
  else
    mu = ctx.cfg.number("gsc.mu");

  std::vector<Owned<bgs_spec>> specs;
  if (const auto path = ctx.cfg.text("gsc.spec_file")) {
    specs = specs_from_file(ctx, x.get(), *path);
  } else {
    const long n = ctx.cfg.integer_or("gsc.random", 50);
    const int removed = static_cast<int>(ctx.cfg.integer_or("gsc.removed", 3));
    const int added = static_cast<int>(ctx.cfg.integer_or("gsc.added", 3));
    if (n < 1) throw UsageError("gsc.random must be at least 1");
    for (long i = 0; i < n; ++i) {
      bgs_spec* raw = nullptr;
      check(bgs_spec_random(x.get(), ctx.seed + static_cast<std::uint64_t>(i), removed, added,
                            &raw));
      specs.push_back(own(raw));
    }
  }
  const bool direct = ctx.cfg.flag_or("gsc.direct", false);
  const bgs_schedule sched = make_schedule(ctx);

  Table t;
  t.command = "gsc-test";
  t.columns = {"spec", "removed", "added", "number_preserving", "mu", "delta_u_fourier"};
  if (direct) t.columns.insert(t.columns.end(), {"delta_u_direct", "method_gap"});
  t.columns.insert(t.columns.end(), {"scale", "passes"});

  bool all_pass = true;
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < specs.size(); ++i) {
    std::size_t nr = 0, na = 0;
    int np = 0;
    check(bgs_spec_counts(specs[i].get(), &nr, &na, &np));
    double du = 0.0;
    check(bgs_delta_u_fourier(pot.get(), specs[i].get(), mu, &du));
    const double scale = static_cast<double>(std::max<std::size_t>({na, nr, 1})) * info.phi_at_origin;
    bool pass = du >= -1e-10 * scale;
    std::vector<Cell> row{static_cast<long>(i), static_cast<long>(nr), static_cast<long>(na),
                          np != 0, mu, du};
    if (direct) {
      double dd = 0.0;
      check(bgs_delta_u_direct(pot.get(), specs[i].get(), mu, &sched, &dd));
      pass = pass && dd >= -1e-6 * scale && std::abs(du - dd) <= 1e-5 * (1.0 + std::abs(du));
      row.push_back(dd);
      row.push_back(dd - du);
    }
    row.push_back(scale);
    row.push_back(pass);
    t.add_row(std::move(row));
    all_pass = all_pass && pass;
    if (scale > 0.0) worst = std::min(worst, du / scale);
  }
  t.summary = {{"rho", rho},
               {"mu", mu},
               {"specs", static_cast<long>(specs.size())},
               {"all_pass", all_pass},
               {"min_normalized_delta_u", worst}};
  return t;
}

Table cmd_phase_diagram(const Context& ctx) {
  const double k0 = ctx.cfg.number_or("potential.k0", 1.0);
  double gd = 0.0;
  check(bgs_gamma_max(ctx.dim, &gd));
  const double xmax = ctx.cfg.number_or("scan.r0k0_max", gd);
  const long nx = ctx.cfg.integer_or("scan.r0k0_points", 200);
  const double ymax = ctx.cfg.number_or("scan.rho_max", 4.0);
  const long ny = ctx.cfg.integer_or("scan.rho_points", 200);
  if (nx < 1 || ny < 1) throw UsageError("scan grids need at least one point");
  if (!(xmax > 0.0) || !(ymax > 0.0)) throw UsageError("scan upper bounds must be positive");
  std::vector<double> xs, ys;
  for (long i = 1; i <= nx; ++i) xs.push_back(xmax * static_cast<double>(i) / static_cast<double>(nx));
  for (long i = 1; i <= ny; ++i) ys.push_back(ymax * static_cast<double>(i) / static_cast<double>(ny));

  std::vector<std::string> names;
  if (const auto f = ctx.cfg.text("scan.families")) {
    std::string tok;
    std::istringstream in(*f);
    while (std::getline(in, tok, ',')) {
      const auto a = tok.find_first_not_of(' ');
      const auto b = tok.find_last_not_of(' ');
      if (a != std::string::npos) names.push_back(tok.substr(a, b - a + 1));
    }
  }
  std::vector<const char*> ptrs;
  for (const auto& n : names) ptrs.push_back(n.c_str());

  bgs_phase_diagram* raw = nullptr;
  check(bgs_phase_diagram_scan(ctx.dim, k0, xs.data(), xs.size(), ys.data(), ys.size(),
                               ptrs.empty() ? nullptr : ptrs.data(), ptrs.size(), &raw));
  const auto diagram = own(raw);
  std::size_t n = 0;
  check(bgs_phase_diagram_size(diagram.get(), &n));

  Table t;
  t.command = "phase-diagram";
  t.columns = {"r0K0", "rho_over_rho_d", "stable_families", "gap", "unique_gsc", "prediction"};
  for (std::size_t i = 0; i < n; ++i) {
    bgs_phase_row row;
    check(bgs_phase_diagram_row(diagram.get(), i, &row));
    const Cell gap = row.prediction ? Cell{row.gap != 0} : Cell{std::string("na")};
    t.add_row({row.r0k0, row.rho_over_rho_d, std::string(row.stable), gap,
               std::string(row.unique_gsc), row.prediction != 0});
  }
  double rd = 0.0;
  check(bgs_rho_d(ctx.dim, k0, &rd));
  t.summary = {{"dim", static_cast<long>(ctx.dim)}, {"k0", k0}, {"gamma_d", gd}, {"rho_d", rd}};
  return t;
}

Table cmd_gamma_search(const Context& ctx) {
  const long trials = ctx.cfg.integer_or("search.trials", ctx.dim == 3 ? 100000 : 10000);
  if (trials < 1) throw UsageError("search.trials must be at least 1");
  bgs_gamma_result r;
  check(bgs_gamma_search(ctx.dim, trials, ctx.seed, nullptr, &r));
  double gd = 0.0;
  check(bgs_gamma_max(ctx.dim, &gd));
  Table t;
  t.command = "gamma-search";
  t.columns = {"dim", "trials", "seed", "gamma", "gamma_d", "deficit", "exceeds_bound",
               "evaluations", "basis"};
  t.add_row({static_cast<long>(ctx.dim), trials, static_cast<long>(ctx.seed), r.gamma, gd,
             gd - r.gamma, r.gamma > gd + 1e-9, r.evaluations, basis_text(r.basis, ctx.dim)});
  return t;
}

// ---- driver

int run(const std::string& command, const Options& opts) {
  Context ctx;
  ctx.opts = opts;
  if (!opts.config_path.empty()) ctx.cfg = Config::load(opts.config_path);
  if (opts.format != "csv" && opts.format != "json")
    throw UsageError("--format must be csv or json");

  if (opts.dim) {
    ctx.dim = *opts.dim;
  } else if (ctx.cfg.has("dimension")) {
    ctx.dim = static_cast<int>(ctx.cfg.integer_or("dimension", 3));
  } else if (const auto f = ctx.cfg.text("lattice.family")) {
    int d = 3;
    if (bgs_family_constants(f->c_str(), &d, nullptr, nullptr) == BGS_OK) ctx.dim = d;
  }
  if (ctx.dim < 1 || ctx.dim > 3) throw UsageError("dimension must be 1, 2 or 3");
  ctx.seed = opts.seed ? *opts.seed : static_cast<std::uint64_t>(ctx.cfg.integer_or("seed", 1));

  Table table;
  int code = kExitOk;
  if (command == "lattice-info") {
    table = cmd_lattice_info(ctx);
  } else if (command == "potential-eval") {
    table = cmd_potential_eval(ctx);
  } else if (command == "verify-poisson") {
    bool converged = false;
    table = cmd_verify_poisson(ctx, converged);
    if (!converged) code = kExitNotConverged;
  } else if (command == "energy") {
    table = cmd_energy(ctx);
  } else if (command == "gsc-test") {
    table = cmd_gsc_test(ctx);
  } else if (command == "phase-diagram") {
    if (ctx.dim == 1) throw UsageError("phase-diagram needs --dim 2 or 3");
    table = cmd_phase_diagram(ctx);
  } else if (command == "gamma-search") {
    if (ctx.dim == 1) throw UsageError("gamma-search needs --dim 2 or 3");
    table = cmd_gamma_search(ctx);
  } else {
    throw UsageError("unknown command '" + command + "'");
  }

  std::ostringstream buf;
  if (opts.format == "json")
    table.write_json(buf);
  else
    table.write_csv(buf);
  if (opts.out_path.empty()) {
    std::cout << buf.str();
  } else {
    std::ofstream out(opts.out_path, std::ios::binary);
    if (!out) throw UsageError("cannot write '" + opts.out_path + "'");
    out << buf.str();
  }
  if (code == kExitNotConverged) std::cerr << "verify-poisson: tempered sums did not converge\n";
  return code;
}

}  // namespace
}  // namespace bgs_cli

int main(int argc, char** argv) {
  using namespace bgs_cli;
  CLI::App app{"Ground states of band-limited pair potentials"};
  app.require_subcommand(1);
  app.fallthrough();

  Options opts;
  std::uint64_t seed = 0;
  int dim = 0;
  app.add_option("--config", opts.config_path, "configuration file (key = value)");
  app.add_option("--out", opts.out_path, "output file (default: stdout)");
  app.add_option("--format", opts.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  auto* seed_opt = app.add_option("--seed", seed, "random seed");
  auto* dim_opt = app.add_option("--dim", dim, "dimension 1, 2 or 3")->check(CLI::Range(1, 3));

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"lattice-info", "lattice summary: density, r_B, q_B*, gamma, dual basis"},
      {"potential-eval", "phi(r) on a radial grid"},
      {"verify-poisson", "tempered direct sums against the reciprocal-space sum"},
      {"energy", "energy density report of a lattice union"},
      {"gsc-test", "perturbation energies of a candidate ground state"},
      {"phase-diagram", "stability scan over (r0 K0, rho / rho_d)"},
      {"gamma-search", "randomized maximization of r_B q_B*"},
  };
  for (const auto& [name, help] : commands) app.add_subcommand(name, help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }
  if (seed_opt->count()) opts.seed = seed;
  if (dim_opt->count()) opts.dim = dim;

  try {
    return run(app.get_subcommands().front()->get_name(), opts);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitDomain;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitDomain;
  }
}
