#include <cmath>
#include <numbers>

#include "potential.hpp"

namespace bandgs {

std::shared_ptr<const RadialTable> RadialTable::build(const std::function<double(double)>& phi,
                                                      double panel_width, double rmax,
                                                      const RadialTable* prefix) {
  require(panel_width > 0.0 && rmax >= 0.0, "invalid radial table extent");
  constexpr int n = kDegree + 1;
  const auto count = static_cast<std::size_t>(std::ceil(rmax / panel_width)) + 1;

  std::vector<Panel> panels;
  panels.reserve(count);
  if (prefix && prefix->width_ == panel_width)
    for (std::size_t i = 0; i < std::min(count, prefix->panels_.size()); ++i)
      panels.push_back(prefix->panels_[i]);

  std::array<double, n> nodes{};
  for (int j = 0; j < n; ++j) nodes[j] = std::cos(std::numbers::pi * (j + 0.5) / n);

  std::array<double, n> values{};
  for (std::size_t p = panels.size(); p < count; ++p) {
    const double a = panel_width * static_cast<double>(p);
    for (int j = 0; j < n; ++j) values[j] = phi(a + 0.5 * panel_width * (nodes[j] + 1.0));
    Panel c{};
    for (int m = 0; m < n; ++m) {
      double s = 0.0;
      for (int j = 0; j < n; ++j) s += values[j] * std::cos(std::numbers::pi * m * (j + 0.5) / n);
      c[m] = 2.0 * s / n;
    }
    c[0] *= 0.5;
    panels.push_back(c);
  }
  return std::make_shared<const RadialTable>(panel_width, std::move(panels));
}

}  // namespace bandgs
