#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <optional>
#include <string_view>
#include <vector>

#include "error.hpp"

namespace bandgs {

// Vectors and matrices are always 3D; a d-dimensional object uses the leading
// d components (columns) and keeps the rest at zero.
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Coeffs = std::array<long, 3>;

enum class LatticeFamily {
  Chain,
  Square,
  Triangular,
  SimpleCubic,
  Bcc,
  Fcc,
  SimpleHexagonal,
};

std::string_view family_tag(LatticeFamily family) noexcept;
std::optional<LatticeFamily> family_from_tag(std::string_view tag) noexcept;
int family_dimension(LatticeFamily family) noexcept;

/// Shape constant c such that rho(B) = c * q_{B*}^d for every member.
double family_density_constant(LatticeFamily family) noexcept;

/// r_B * q_{B*}; independent of density.
double family_gamma(LatticeFamily family) noexcept;

struct LatticePoint {
  Vec3 position;
  Coeffs coeffs;  // integer coordinates in the lattice's own basis
  double distance;
};

namespace detail {

// Pairwise size-reduced basis and its QR factor. Enumeration walks the
// upper-triangular factor level by level, so every lattice point inside the
// requested ball is visited exactly once.
struct BallEnumerator {
  int dim = 0;
  Mat3 reduced = Mat3::Identity();
  Eigen::Matrix3i unimodular = Eigen::Matrix3i::Identity();  // basis * U = reduced
  Mat3 tri = Mat3::Identity();
  Mat3 qt = Mat3::Identity();

  static BallEnumerator build(int dim, const Mat3& basis);

  Coeffs to_basis_coeffs(const Coeffs& reduced_coeffs) const noexcept {
    Coeffs out{0, 0, 0};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) out[i] += unimodular(i, j) * reduced_coeffs[j];
    return out;
  }

  // Visits f(position, reduced_coeffs, dist2) for every point with
  // |position - center| <= radius. Order: last reduced coefficient outermost,
  // each ascending.
  template <class F>
  void visit(const Vec3& center, double radius, F&& f) const;
};

template <class F>
void BallEnumerator::visit(const Vec3& center, double radius, F&& f) const {
  if (!(radius >= 0.0)) return;
  const Vec3 c = qt * center;
  const double r2 = radius * radius;

  auto bounds = [&](int k, double target, double rem, long& lo, long& hi) {
    if (k >= dim) {
      lo = hi = 0;
      return;
    }
    const double half = std::sqrt(std::max(0.0, rem));
    double a = (target - half) / tri(k, k);
    double b = (target + half) / tri(k, k);
    if (a > b) std::swap(a, b);
    const double pad = 1e-9 * (1.0 + std::abs(a) + std::abs(b));
    lo = static_cast<long>(std::ceil(a - pad));
    hi = static_cast<long>(std::floor(b + pad));
  };

  Coeffs n{0, 0, 0};
  long lo2, hi2;
  bounds(2, c[2], r2, lo2, hi2);
  for (n[2] = lo2; n[2] <= hi2; ++n[2]) {
    const double y2 = dim > 2 ? tri(2, 2) * n[2] - c[2] : 0.0;
    const double rem2 = r2 - y2 * y2;
    if (rem2 < 0.0 && dim > 2) continue;
    long lo1, hi1;
    bounds(1, c[1] - tri(1, 2) * n[2], rem2, lo1, hi1);
    for (n[1] = lo1; n[1] <= hi1; ++n[1]) {
      const double y1 = dim > 1 ? tri(1, 1) * n[1] + tri(1, 2) * n[2] - c[1] : 0.0;
      const double rem1 = rem2 - y1 * y1;
      if (rem1 < 0.0 && dim > 1) continue;
      long lo0, hi0;
      bounds(0, c[0] - tri(0, 1) * n[1] - tri(0, 2) * n[2], rem1, lo0, hi0);
      const Vec3 base = reduced.col(1) * static_cast<double>(n[1]) +
                        reduced.col(2) * static_cast<double>(n[2]);
      for (n[0] = lo0; n[0] <= hi0; ++n[0]) {
        const Vec3 x = base + reduced.col(0) * static_cast<double>(n[0]);
        const double d2 = (x - center).squaredNorm();
        if (d2 <= r2) f(x, n, d2);
      }
    }
  }
}

}  // namespace detail

/// Bravais lattice in d = 1, 2 or 3 dimensions with its dual, density and
/// shortest-vector lengths cached at construction.
class BravaisLattice {
 public:
  /// Columns of `basis` are the primitive vectors. Throws DegenerateBasis if
  /// |det| < 1e-12 * (max column norm)^d.
  BravaisLattice(int dim, const Mat3& basis);

  int dim() const noexcept { return dim_; }
  const Mat3& basis() const noexcept { return basis_; }
  const Mat3& dual_basis() const noexcept { return dual_; }
  double density() const noexcept { return density_; }
  double shortest_length() const noexcept { return r_; }
  double dual_shortest_length() const noexcept { return q_; }
  double gamma() const noexcept { return r_ * q_; }

  // Lexicographically smallest coefficient tuple among the shortest vectors.
  const Coeffs& shortest_witness() const noexcept { return witness_; }

  Vec3 point(const Coeffs& n) const noexcept;
  Vec3 coordinates(const Vec3& x) const noexcept { return inverse_ * x; }
  bool contains(const Vec3& x, double tol = 1e-8) const noexcept;

  BravaisLattice dual() const;
  BravaisLattice rotated(const Mat3& rotation) const;
  BravaisLattice scaled(double factor) const;

  const detail::BallEnumerator& enumerator() const noexcept { return direct_enum_; }
  const detail::BallEnumerator& dual_enumerator() const noexcept { return dual_enum_; }

 private:
  int dim_;
  Mat3 basis_;
  Mat3 dual_;
  Mat3 inverse_;
  double density_;
  double r_;
  double q_;
  Coeffs witness_;
  detail::BallEnumerator direct_enum_;
  detail::BallEnumerator dual_enum_;
};

BravaisLattice make_lattice(int dim, const Mat3& basis);
BravaisLattice dual_lattice(const BravaisLattice& lattice);
double shortest_vector_length(const BravaisLattice& lattice);
double gamma(const BravaisLattice& lattice);

/// All lattice points R with |R - center| <= radius, sorted by distance and
/// then lexicographically by coefficients.
std::vector<LatticePoint> points_in_ball(const BravaisLattice& lattice, const Vec3& center,
                                         double radius);

/// Canonical member of `family` with exactly the requested density.
BravaisLattice family_lattice(LatticeFamily family, int dim, double density);

Mat3 rotation_matrix(const Vec3& axis, double angle);

struct UnionComponent {
  BravaisLattice lattice;
  Vec3 shift = Vec3::Zero();
};

/// X = union of (B_j + y_j); coincident points are kept with multiplicity.
class LatticeUnion {
 public:
  LatticeUnion() = default;
  explicit LatticeUnion(BravaisLattice lattice, const Vec3& shift = Vec3::Zero());
  explicit LatticeUnion(std::vector<UnionComponent> components);

  void add(BravaisLattice lattice, const Vec3& shift = Vec3::Zero());

  int dim() const noexcept { return dim_; }
  double density() const noexcept;
  std::size_t size() const noexcept { return components_.size(); }
  bool empty() const noexcept { return components_.empty(); }
  const std::vector<UnionComponent>& components() const noexcept { return components_; }
  const UnionComponent& operator[](std::size_t j) const { return components_.at(j); }

  Vec3 point(std::size_t component, const Coeffs& n) const;

 private:
  int dim_ = 0;
  std::vector<UnionComponent> components_;
};

}  // namespace bandgs
