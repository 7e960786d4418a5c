#pragma once

#include <array>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"

namespace bandgs {

enum class Profile {
  Zero,
  Constant,   // phi_hat = 1 on [0, K0]
  Linear,     // phi_hat = 1 - k/K0
  Smooth,     // phi_hat = (1 - (k/K0)^2)^4, three continuous derivatives at K0
  Tabulated,  // linear interpolation of (k, phi_hat) samples
  Custom,
};

std::string_view profile_name(Profile profile) noexcept;

/// Piecewise Chebyshev interpolant of phi(r) on [0, rmax]. Panels have fixed
/// width, so a table extended to a larger radius reproduces the smaller one
/// bit for bit.
class RadialTable {
 public:
  static constexpr int kDegree = 32;
  using Panel = std::array<double, kDegree + 1>;

  RadialTable(double panel_width, std::vector<Panel> panels)
      : width_(panel_width), inv_width_(1.0 / panel_width), panels_(std::move(panels)) {}

  static std::shared_ptr<const RadialTable> build(const std::function<double(double)>& phi,
                                                  double panel_width, double rmax,
                                                  const RadialTable* prefix = nullptr);

  double rmax() const noexcept { return width_ * static_cast<double>(panels_.size()); }
  double panel_width() const noexcept { return width_; }

  double operator()(double r) const noexcept {
    std::size_t idx = static_cast<std::size_t>(r * inv_width_);
    if (idx >= panels_.size()) idx = panels_.size() - 1;
    const double x = 2.0 * (r * inv_width_ - static_cast<double>(idx)) - 1.0;
    const Panel& c = panels_[idx];
    // Clenshaw recurrence
    double b1 = 0.0, b2 = 0.0;
    const double x2 = 2.0 * x;
    for (int j = kDegree; j >= 1; --j) {
      const double b0 = c[j] + x2 * b1 - b2;
      b2 = b1;
      b1 = b0;
    }
    return c[0] + x * b1 - b2;
  }

 private:
  double width_;
  double inv_width_;
  std::vector<Panel> panels_;
};

/// Pair potential given by a nonnegative radial Fourier profile supported on
/// |k| <= K0. phi(r) is the d-dimensional inverse transform.
class RadialBandLimitedPotential {
 public:
  static RadialBandLimitedPotential named(Profile profile, int dim, double k0);
  static RadialBandLimitedPotential tabulated(int dim, double k0, std::vector<double> k,
                                              std::vector<double> values);
  static RadialBandLimitedPotential custom(int dim, double k0,
                                           std::function<double(double)> profile,
                                           bool vanishes_at_k0,
                                           std::vector<double> kinks = {});

  int dim() const noexcept { return dim_; }
  double k0() const noexcept { return k0_; }
  Profile profile() const noexcept { return profile_; }
  bool continuous_at_origin() const noexcept { return true; }
  bool vanishes_continuously_at_k0() const noexcept { return vanishes_at_k0_; }
  const std::vector<double>& kinks() const noexcept { return kinks_; }

  /// Radial profile; zero for k > K0.
  double phi_hat(double k) const;
  double phi_hat_at_zero() const noexcept { return phi_hat0_; }
  double phi_at_origin() const noexcept { return phi0_; }

  /// Adaptive Gauss-Kronrod quadrature of the radial kernel; absolute error
  /// target 1e-13 * phi(0). Throws NonconvergentQuadrature.
  double phi(double r) const;

  /// Interpolation table covering at least [0, rmax], shared between copies.
  std::shared_ptr<const RadialTable> table(double rmax) const;

 private:
  RadialBandLimitedPotential(int dim, double k0, Profile profile,
                             std::function<double(double)> fn, bool vanishes,
                             std::vector<double> kinks);
  double integrate(double r, double abs_tol) const;

  struct TableCache;

  int dim_;
  double k0_;
  Profile profile_;
  std::function<double(double)> fn_;  // evaluated on [0, K0] only
  bool vanishes_at_k0_;
  std::vector<double> kinks_;
  double phi_hat0_ = 0.0;
  double phi0_ = 0.0;
  std::shared_ptr<TableCache> cache_;
};

double phi_value(const RadialBandLimitedPotential& pot, double r);
double phi_at_origin(const RadialBandLimitedPotential& pot);
double phi_hat_at_zero(const RadialBandLimitedPotential& pot);

/// Short-range repulsion psi >= 0 with psi(r) = 0 for r >= r0.
class ShortRangeRepulsion {
 public:
  enum class Kind { HardCore, Quadratic, Custom };

  static ShortRangeRepulsion hard_core(double r0);
  /// psi(r) = strength * (1 - r/r0)^2 inside the range.
  static ShortRangeRepulsion quadratic(double r0, double strength = 1.0);
  static ShortRangeRepulsion custom(double r0, std::function<double(double)> inside,
                                    bool strictly_positive_inside = true);

  Kind kind() const noexcept { return kind_; }
  double r0() const noexcept { return r0_; }
  bool is_hard_core() const noexcept { return kind_ == Kind::HardCore; }
  double strength() const noexcept { return strength_; }
  bool strictly_positive_inside() const noexcept { return strict_; }

  /// +infinity inside a hard core.
  double operator()(double r) const;

 private:
  ShortRangeRepulsion(Kind kind, double r0, double strength, bool strict,
                      std::function<double(double)> fn)
      : kind_(kind), r0_(r0), strength_(strength), strict_(strict), fn_(std::move(fn)) {}

  Kind kind_;
  double r0_;
  double strength_;
  bool strict_;
  std::function<double(double)> fn_;
};

double psi_value(const ShortRangeRepulsion& rep, double r);

}  // namespace bandgs
