#include "potential.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

namespace bandgs {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kMaxDepth = 14;

using Kronrod = boost::math::quadrature::gauss_kronrod<double, 15>;

struct PanelResult {
  double value;
  double error;  // |K15 - G7|
  double l1;
};

template <class F>
PanelResult gauss_kronrod15(const F& f, double a, double b) {
  static const auto& x = Kronrod::abscissa();
  static const auto& wk = Kronrod::weights();
  static const auto& wg = boost::math::quadrature::gauss<double, 7>::weights();
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  const double f0 = f(c);
  double k = wk[0] * f0, g = wg[0] * f0, l1 = wk[0] * std::abs(f0);
  for (std::size_t i = 1; i < x.size(); ++i) {
    const double fp = f(c + h * x[i]), fm = f(c - h * x[i]);
    k += wk[i] * (fp + fm);
    l1 += wk[i] * (std::abs(fp) + std::abs(fm));
    if (i % 2 == 0) g += wg[i / 2] * (fp + fm);
  }
  return {k * h, std::abs(k - g) * h, l1 * h};
}

}  // namespace

struct RadialBandLimitedPotential::TableCache {
  std::mutex mutex;
  std::shared_ptr<const RadialTable> table;
};

std::string_view profile_name(Profile profile) noexcept {
  switch (profile) {
    case Profile::Zero: return "zero";
    case Profile::Constant: return "constant";
    case Profile::Linear: return "linear";
    case Profile::Smooth: return "smooth";
    case Profile::Tabulated: return "tabulated";
    case Profile::Custom: return "custom";
  }
  return "unknown";
}

RadialBandLimitedPotential::RadialBandLimitedPotential(int dim, double k0, Profile profile,
                                                       std::function<double(double)> fn,
                                                       bool vanishes, std::vector<double> kinks)
    : dim_(dim),
      k0_(k0),
      profile_(profile),
      fn_(std::move(fn)),
      vanishes_at_k0_(vanishes),
      kinks_(std::move(kinks)),
      cache_(std::make_shared<TableCache>()) {
  require(dim >= 1 && dim <= 3, "potential dimension must be 1, 2 or 3");
  require(k0 > 0.0 && std::isfinite(k0), "K0 must be positive and finite");

  std::sort(kinks_.begin(), kinks_.end());
  kinks_.erase(std::remove_if(kinks_.begin(), kinks_.end(),
                              [&](double k) { return !(k > 0.0 && k < k0_); }),
               kinks_.end());
  kinks_.erase(std::unique(kinks_.begin(), kinks_.end()), kinks_.end());

  constexpr int samples = 4096;
  for (int i = 0; i <= samples; ++i) {
    const double v = fn_(k0_ * i / samples);
    require(std::isfinite(v), "profile must be finite on [0, K0]");
    require(v >= 0.0, "profile must be nonnegative on [0, K0]");
  }
  phi_hat0_ = fn_(0.0);

  // phi(0) with a relative target; the first pass fixes the absolute scale.
  const double rough = integrate(0.0, std::numeric_limits<double>::infinity());
  phi0_ = rough > 0.0 ? integrate(0.0, 1e-15 * rough) : 0.0;
}

RadialBandLimitedPotential RadialBandLimitedPotential::named(Profile profile, int dim, double k0) {
  require(k0 > 0.0, "K0 must be positive");
  switch (profile) {
    case Profile::Zero:
      return {dim, k0, profile, [](double) { return 0.0; }, true, {}};
    case Profile::Constant:
      return {dim, k0, profile, [](double) { return 1.0; }, false, {}};
    case Profile::Linear:
      return {dim, k0, profile, [k0](double k) { return std::max(0.0, 1.0 - k / k0); }, true, {}};
    case Profile::Smooth:
      return {dim, k0, profile,
              [k0](double k) {
                const double t = std::max(0.0, 1.0 - (k / k0) * (k / k0));
                return (t * t) * (t * t);
              },
              true, {}};
    default:
      fail(ErrorCode::InvalidArgument, "profile has no closed-form definition");
  }
}

RadialBandLimitedPotential RadialBandLimitedPotential::tabulated(int dim, double k0,
                                                                 std::vector<double> k,
                                                                 std::vector<double> values) {
  require(k.size() >= 2 && k.size() == values.size(),
          "profile table needs at least two (k, value) pairs of equal length");
  require(k.front() == 0.0, "profile table must start at k = 0");
  for (std::size_t i = 1; i < k.size(); ++i)
    require(k[i] > k[i - 1], "profile table abscissae must be strictly increasing");
  require(std::abs(k.back() - k0) <= 1e-12 * k0, "profile table must end at k = K0");
  k.back() = k0;
  for (double v : values) require(v >= 0.0 && std::isfinite(v), "profile values must be >= 0");

  const bool vanishes = values.back() == 0.0;
  std::vector<double> kinks(k.begin() + 1, k.end() - 1);
  auto fn = [k = std::move(k), v = std::move(values)](double x) {
    if (x <= k.front()) return v.front();
    if (x >= k.back()) return v.back();
    const auto it = std::upper_bound(k.begin(), k.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - k.begin());
    const double t = (x - k[i - 1]) / (k[i] - k[i - 1]);
    return v[i - 1] + t * (v[i] - v[i - 1]);
  };
  return {dim, k0, Profile::Tabulated, std::move(fn), vanishes, std::move(kinks)};
}

RadialBandLimitedPotential RadialBandLimitedPotential::custom(
    int dim, double k0, std::function<double(double)> profile, bool vanishes_at_k0,
    std::vector<double> kinks) {
  require(static_cast<bool>(profile), "custom profile callable is empty");
  return {dim, k0, Profile::Custom, std::move(profile), vanishes_at_k0, std::move(kinks)};
}

double RadialBandLimitedPotential::phi_hat(double k) const {
  k = std::abs(k);
  if (k > k0_) return 0.0;
  return fn_(k);
}

double RadialBandLimitedPotential::integrate(double r, double abs_tol) const {
  std::function<double(double)> kernel;
  switch (dim_) {
    case 1:
      kernel = [&](double k) { return fn_(k) * std::cos(k * r) / kPi; };
      break;
    case 2:
      kernel = [&](double k) { return fn_(k) * k * std::cyl_bessel_j(0.0, k * r) / (2.0 * kPi); };
      break;
    default:
      if (r == 0.0)
        kernel = [&](double k) { return fn_(k) * k * k / (2.0 * kPi * kPi); };
      else
        kernel = [&](double k) { return fn_(k) * k * std::sin(k * r) / (2.0 * kPi * kPi * r); };
      break;
  }

  std::vector<double> breaks{0.0};
  breaks.insert(breaks.end(), kinks_.begin(), kinks_.end());
  breaks.push_back(k0_);

  const double max_width = r > 0.0 ? kPi / (4.0 * r) : k0_;
  const double density = abs_tol / k0_;  // tolerance per unit of k

  auto panel = [&](auto&& self, double a, double b, int depth) -> double {
    const auto [value, err, l1] = gauss_kronrod15(kernel, a, b);
    // round-off in the oscillatory factor grows with k r
    const double floor = 50.0 * std::numeric_limits<double>::epsilon() * l1 * (1.0 + b * r);
    if (err <= std::max(density * (b - a), floor) ||
        !(abs_tol < std::numeric_limits<double>::infinity()))
      return value;
    if (depth >= kMaxDepth || b - a <= 1e-14 * k0_)
      fail(ErrorCode::NonconvergentQuadrature,
           "adaptive quadrature stalled at r = " + std::to_string(r));
    const double m = 0.5 * (a + b);
    return self(self, a, m, depth + 1) + self(self, m, b, depth + 1);
  };

  double sum = 0.0, comp = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double a = breaks[i], b = breaks[i + 1];
    const int n = std::max(1, static_cast<int>(std::ceil((b - a) / max_width)));
    for (int p = 0; p < n; ++p) {
      const double lo = a + (b - a) * p / n;
      const double hi = p + 1 == n ? b : a + (b - a) * (p + 1) / n;
      const double v = panel(panel, lo, hi, 0);
      const double t = sum + v;
      comp += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
      sum = t;
    }
  }
  return sum + comp;
}

double RadialBandLimitedPotential::phi(double r) const {
  require(r >= 0.0 && std::isfinite(r), "phi requires a finite r >= 0");
  if (phi0_ == 0.0) return 0.0;
  if (r == 0.0) return phi0_;
  return integrate(r, 1e-13 * phi0_);
}

std::shared_ptr<const RadialTable> RadialBandLimitedPotential::table(double rmax) const {
  std::lock_guard lock(cache_->mutex);
  const auto& current = cache_->table;
  if (current && current->rmax() >= rmax) return current;
  const double target = current ? std::max(rmax, 1.5 * current->rmax()) : rmax;
  cache_->table = RadialTable::build([this](double r) { return phi(r); }, 8.0 / k0_, target,
                                     current.get());
  return cache_->table;
}

double phi_value(const RadialBandLimitedPotential& pot, double r) { return pot.phi(r); }

double phi_at_origin(const RadialBandLimitedPotential& pot) { return pot.phi_at_origin(); }

double phi_hat_at_zero(const RadialBandLimitedPotential& pot) { return pot.phi_hat_at_zero(); }

ShortRangeRepulsion ShortRangeRepulsion::hard_core(double r0) {
  require(r0 > 0.0 && std::isfinite(r0), "repulsion range r0 must be positive");
  return {Kind::HardCore, r0, std::numeric_limits<double>::infinity(), true, {}};
}

ShortRangeRepulsion ShortRangeRepulsion::quadratic(double r0, double strength) {
  require(r0 > 0.0 && std::isfinite(r0), "repulsion range r0 must be positive");
  require(strength >= 0.0 && std::isfinite(strength), "repulsion strength must be >= 0");
  return {Kind::Quadratic, r0, strength, strength > 0.0, {}};
}

ShortRangeRepulsion ShortRangeRepulsion::custom(double r0, std::function<double(double)> inside,
                                                bool strictly_positive_inside) {
  require(r0 > 0.0 && std::isfinite(r0), "repulsion range r0 must be positive");
  require(static_cast<bool>(inside), "custom repulsion callable is empty");
  return {Kind::Custom, r0, 1.0, strictly_positive_inside, std::move(inside)};
}

double ShortRangeRepulsion::operator()(double r) const {
  require(r >= 0.0, "psi requires r >= 0");
  if (r >= r0_) return 0.0;
  switch (kind_) {
    case Kind::HardCore: return std::numeric_limits<double>::infinity();
    case Kind::Quadratic: {
      const double t = 1.0 - r / r0_;
      return strength_ * t * t;
    }
    case Kind::Custom: {
      const double v = fn_(r);
      require(v >= 0.0, "repulsion profile must be nonnegative");
      return v;
    }
  }
  return 0.0;
}

double psi_value(const ShortRangeRepulsion& rep, double r) { return rep(r); }

}  // namespace bandgs
