#pragma once

// Least-squares slope of log y against log x.

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>

#include "scnls/errors.hpp"

namespace scnls {

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  double band95 = 0.0;  // half-width of the 95% confidence interval on the slope
  double max_residual = 0.0;
  std::size_t points = 0;

  bool within(double lo, double hi) const { return slope >= lo && slope <= hi; }
};

inline SlopeFit fit_loglog(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size(), "fit_loglog: x and y differ in length");
  require(x.size() >= 3, "fit_loglog: slope fits need at least 3 points");
  const std::size_t n = x.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    require(x[i] > 0.0 && y[i] > 0.0 && std::isfinite(y[i]),
            "fit_loglog: values must be positive and finite");
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = std::log(x[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(y[i]) - my);
  }
  require(sxx > 0.0, "fit_loglog: x values must not all coincide");
  SlopeFit f;
  f.points = n;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = std::log(y[i]) - (f.intercept + f.slope * std::log(x[i]));
    ssr += r * r;
    f.max_residual = std::max(f.max_residual, std::abs(r));
  }
  if (n > 2) {
    f.slope_stderr = std::sqrt(ssr / static_cast<double>(n - 2) / sxx);
    const boost::math::students_t dist(static_cast<double>(n - 2));
    f.band95 = boost::math::quantile(boost::math::complement(dist, 0.025)) * f.slope_stderr;
  }
  return f;
}

}  // namespace scnls
