#include "lattice.hpp"

#include <algorithm>
#include <limits>
#include <numbers>
#include <string>

namespace bandgs {

namespace {

constexpr double kPi = std::numbers::pi;

struct FamilyInfo {
  LatticeFamily family;
  std::string_view tag;
  int dim;
};

constexpr FamilyInfo kFamilies[] = {
    {LatticeFamily::Chain, "chain", 1},
    {LatticeFamily::Square, "square", 2},
    {LatticeFamily::Triangular, "triangular", 2},
    {LatticeFamily::SimpleCubic, "sc", 3},
    {LatticeFamily::Bcc, "bcc", 3},
    {LatticeFamily::Fcc, "fcc", 3},
    {LatticeFamily::SimpleHexagonal, "sh", 3},
};

Mat3 padded(int dim, const Mat3& m) {
  Mat3 out = Mat3::Zero();
  out.topLeftCorner(dim, dim) = m.topLeftCorner(dim, dim);
  return out;
}

double block_det(int dim, const Mat3& m) {
  switch (dim) {
    case 1: return m(0, 0);
    case 2: return m.topLeftCorner<2, 2>().determinant();
    default: return m.determinant();
  }
}

Mat3 block_inverse(int dim, const Mat3& m) {
  Mat3 out = Mat3::Zero();
  switch (dim) {
    case 1: out(0, 0) = 1.0 / m(0, 0); break;
    case 2: out.topLeftCorner<2, 2>() = m.topLeftCorner<2, 2>().inverse(); break;
    default: out = m.inverse(); break;
  }
  return out;
}

struct Shortest {
  double length;
  Coeffs witness;
};

// Exact shortest nonzero vector: enumerate the ball whose radius is the
// shortest reduced column.
Shortest shortest_vector(const detail::BallEnumerator& en) {
  double bound = std::numeric_limits<double>::infinity();
  for (int k = 0; k < en.dim; ++k) bound = std::min(bound, en.reduced.col(k).norm());
  bound *= 1.0 + 1e-12;

  double best2 = std::numeric_limits<double>::infinity();
  std::vector<std::pair<double, Coeffs>> hits;
  en.visit(Vec3::Zero(), bound, [&](const Vec3&, const Coeffs& n, double d2) {
    if (n[0] == 0 && n[1] == 0 && n[2] == 0) return;
    if (d2 <= best2 * (1.0 + 1e-12)) {
      best2 = std::min(best2, d2);
      hits.emplace_back(d2, en.to_basis_coeffs(n));
    }
  });
  Coeffs witness{0, 0, 0};
  bool have = false;
  for (const auto& [d2, c] : hits) {
    if (d2 > best2 * (1.0 + 1e-12)) continue;
    if (!have || c < witness) {
      witness = c;
      have = true;
    }
  }
  return {std::sqrt(best2), witness};
}

}  // namespace

std::string_view family_tag(LatticeFamily family) noexcept {
  for (const auto& info : kFamilies)
    if (info.family == family) return info.tag;
  return "unknown";
}

std::optional<LatticeFamily> family_from_tag(std::string_view tag) noexcept {
  for (const auto& info : kFamilies)
    if (info.tag == tag) return info.family;
  if (tag == "tr") return LatticeFamily::Triangular;
  if (tag == "simple_cubic") return LatticeFamily::SimpleCubic;
  if (tag == "simple_hexagonal") return LatticeFamily::SimpleHexagonal;
  return std::nullopt;
}

int family_dimension(LatticeFamily family) noexcept {
  for (const auto& info : kFamilies)
    if (info.family == family) return info.dim;
  return 0;
}

double family_density_constant(LatticeFamily family) noexcept {
  const double pi2 = kPi * kPi;
  const double pi3 = pi2 * kPi;
  switch (family) {
    case LatticeFamily::Chain: return 1.0 / (2.0 * kPi);
    case LatticeFamily::Square: return 1.0 / (4.0 * pi2);
    case LatticeFamily::Triangular: return std::sqrt(3.0) / (8.0 * pi2);
    case LatticeFamily::SimpleCubic: return 1.0 / (8.0 * pi3);
    case LatticeFamily::Bcc: return 1.0 / (8.0 * std::sqrt(2.0) * pi3);
    case LatticeFamily::Fcc: return 1.0 / (6.0 * std::sqrt(3.0) * pi3);
    case LatticeFamily::SimpleHexagonal: return std::sqrt(3.0) / (16.0 * pi3);
  }
  return 0.0;
}

double family_gamma(LatticeFamily family) noexcept {
  switch (family) {
    case LatticeFamily::Triangular: return 4.0 * kPi / std::sqrt(3.0);
    case LatticeFamily::Bcc:
    case LatticeFamily::Fcc: return std::sqrt(6.0) * kPi;
    default: return 2.0 * kPi;
  }
}

namespace detail {

BallEnumerator BallEnumerator::build(int dim, const Mat3& basis) {
  BallEnumerator en;
  en.dim = dim;
  Mat3 b = padded(dim, basis);
  Eigen::Matrix3i u = Eigen::Matrix3i::Identity();

  // Greedy pairwise size reduction; each applied step strictly shortens a
  // column, so the loop terminates.
  for (int sweep = 0; sweep < 1000; ++sweep) {
    bool changed = false;
    for (int i = 0; i < dim; ++i) {
      for (int j = 0; j < dim; ++j) {
        if (i == j) continue;
        const double ratio = b.col(i).dot(b.col(j)) / b.col(j).squaredNorm();
        if (std::abs(ratio) <= 0.5 + 1e-12) continue;
        const double mu = std::round(ratio);
        b.col(i) -= mu * b.col(j);
        u.col(i) -= static_cast<int>(mu) * u.col(j);
        changed = true;
      }
    }
    if (!changed) break;
  }
  for (int k = dim; k < 3; ++k) b.col(k) = Vec3::Unit(k);

  en.reduced = b;
  en.unimodular = u;
  Eigen::HouseholderQR<Mat3> qr(b);
  en.tri = qr.matrixQR().triangularView<Eigen::Upper>();
  en.qt = qr.householderQ().transpose();
  return en;
}

}  // namespace detail

BravaisLattice::BravaisLattice(int dim, const Mat3& basis) : dim_(dim) {
  require(dim >= 1 && dim <= 3, "lattice dimension must be 1, 2 or 3");
  require(basis.topLeftCorner(dim, dim).allFinite(), "basis entries must be finite");
  basis_ = padded(dim, basis);

  double max_norm = 0.0;
  for (int k = 0; k < dim; ++k) max_norm = std::max(max_norm, basis_.col(k).norm());
  const double det = block_det(dim, basis_);
  if (!(std::abs(det) >= 1e-12 * std::pow(max_norm, dim)) || max_norm == 0.0)
    fail(ErrorCode::DegenerateBasis, "primitive vectors are linearly dependent (|det| = " +
                                         std::to_string(std::abs(det)) + ")");

  inverse_ = block_inverse(dim, basis_);
  dual_ = 2.0 * kPi * inverse_.transpose();
  density_ = 1.0 / std::abs(det);

  direct_enum_ = detail::BallEnumerator::build(dim, basis_);
  dual_enum_ = detail::BallEnumerator::build(dim, dual_);
  const auto direct = shortest_vector(direct_enum_);
  r_ = direct.length;
  witness_ = direct.witness;
  q_ = shortest_vector(dual_enum_).length;
}

Vec3 BravaisLattice::point(const Coeffs& n) const noexcept {
  Vec3 x = Vec3::Zero();
  for (int k = 0; k < dim_; ++k) x += basis_.col(k) * static_cast<double>(n[k]);
  return x;
}

bool BravaisLattice::contains(const Vec3& x, double tol) const noexcept {
  const Vec3 t = coordinates(x);
  for (int k = 0; k < dim_; ++k)
    if (std::abs(t[k] - std::round(t[k])) > tol) return false;
  for (int k = dim_; k < 3; ++k)
    if (std::abs(x[k]) > tol) return false;
  return true;
}

BravaisLattice BravaisLattice::dual() const { return BravaisLattice(dim_, dual_); }

BravaisLattice BravaisLattice::rotated(const Mat3& rotation) const {
  Mat3 rot = Mat3::Identity();
  rot.topLeftCorner(dim_, dim_) = rotation.topLeftCorner(dim_, dim_);
  return BravaisLattice(dim_, rot * basis_);
}

BravaisLattice BravaisLattice::scaled(double factor) const {
  return BravaisLattice(dim_, factor * basis_);
}

BravaisLattice make_lattice(int dim, const Mat3& basis) { return BravaisLattice(dim, basis); }

BravaisLattice dual_lattice(const BravaisLattice& lattice) { return lattice.dual(); }

double shortest_vector_length(const BravaisLattice& lattice) { return lattice.shortest_length(); }

double gamma(const BravaisLattice& lattice) { return lattice.gamma(); }

std::vector<LatticePoint> points_in_ball(const BravaisLattice& lattice, const Vec3& center,
                                         double radius) {
  require(radius >= 0.0, "radius must be nonnegative");
  // Absorbs round-off between the reduced and the original basis.
  const double slack =
      1e-12 * (radius + center.norm() + lattice.shortest_length());
  std::vector<LatticePoint> out;
  const auto& en = lattice.enumerator();
  en.visit(center, radius + slack, [&](const Vec3&, const Coeffs& n, double) {
    const Coeffs c = en.to_basis_coeffs(n);
    const Vec3 x = lattice.point(c);
    out.push_back({x, c, (x - center).norm()});
  });
  std::sort(out.begin(), out.end(), [](const LatticePoint& a, const LatticePoint& b) {
    if (a.distance != b.distance) return a.distance < b.distance;
    return a.coeffs < b.coeffs;
  });
  return out;
}

BravaisLattice family_lattice(LatticeFamily family, int dim, double density) {
  require(density > 0.0 && std::isfinite(density), "density must be positive");
  if (family_dimension(family) != dim)
    fail(ErrorCode::FamilyDimensionMismatch,
         std::string(family_tag(family)) + " is not a " + std::to_string(dim) +
             "-dimensional lattice family");

  const double s3 = std::sqrt(3.0);
  Mat3 unit = Mat3::Zero();  // conventional length a = 1; columns are primitive vectors
  switch (family) {
    case LatticeFamily::Chain: unit(0, 0) = 1.0; break;
    case LatticeFamily::Square: unit.topLeftCorner<2, 2>().setIdentity(); break;
    case LatticeFamily::Triangular:
      unit.col(0) << 1.0, 0.0, 0.0;
      unit.col(1) << 0.5, s3 / 2.0, 0.0;
      break;
    case LatticeFamily::SimpleCubic: unit.setIdentity(); break;
    case LatticeFamily::Bcc:
      unit.col(0) << -0.5, 0.5, 0.5;
      unit.col(1) << 0.5, -0.5, 0.5;
      unit.col(2) << 0.5, 0.5, -0.5;
      break;
    case LatticeFamily::Fcc:
      unit.col(0) << 0.0, 0.5, 0.5;
      unit.col(1) << 0.5, 0.0, 0.5;
      unit.col(2) << 0.5, 0.5, 0.0;
      break;
    case LatticeFamily::SimpleHexagonal:
      unit.col(0) << 1.0, 0.0, 0.0;
      unit.col(1) << 0.5, s3 / 2.0, 0.0;
      unit.col(2) << 0.0, 0.0, s3 / 2.0;
      break;
  }
  const double unit_density = 1.0 / std::abs(block_det(dim, unit));
  const double a = std::pow(unit_density / density, 1.0 / dim);
  return BravaisLattice(dim, a * unit);
}

Mat3 rotation_matrix(const Vec3& axis, double angle) {
  require(axis.norm() > 0.0, "rotation axis must be nonzero");
  return Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix();
}

LatticeUnion::LatticeUnion(BravaisLattice lattice, const Vec3& shift) {
  add(std::move(lattice), shift);
}

LatticeUnion::LatticeUnion(std::vector<UnionComponent> components) {
  for (auto& c : components) add(std::move(c.lattice), c.shift);
}

void LatticeUnion::add(BravaisLattice lattice, const Vec3& shift) {
  if (components_.empty()) dim_ = lattice.dim();
  require(lattice.dim() == dim_, "all union components must share one dimension");
  Vec3 y = shift;
  for (int k = dim_; k < 3; ++k) y[k] = 0.0;
  components_.push_back({std::move(lattice), y});
}

double LatticeUnion::density() const noexcept {
  double rho = 0.0;
  for (const auto& c : components_) rho += c.lattice.density();
  return rho;
}

Vec3 LatticeUnion::point(std::size_t component, const Coeffs& n) const {
  const auto& c = components_.at(component);
  return c.lattice.point(n) + c.shift;
}

}  // namespace bandgs
