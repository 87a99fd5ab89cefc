// Copyright 2026 The genpower Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "genpower/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace genpower::dist {

namespace {

// Inner errors are averaged against a density, so matching tolerances suffice.
constexpr double kInnerTol = 1e-9;
constexpr double kOuterTol = 1e-9;
constexpr double kZLimit = 8.5;

// Phi(z) - Phi(z - w) without cancellation in either tail.
double normal_interval(double z, double w) {
  if (z - 0.5 * w > 0) return normal_sf(z - w) - normal_sf(z);
  return normal_cdf(z) - normal_cdf(z - w);
}

// Range of k iid standard normals: P(R <= w).
double normal_range_cdf(double w, double k) {
  if (w <= 0) return 0.0;
  constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934;
  const int ik = static_cast<int>(k);
  const bool whole = double(ik) == k && ik <= 64;
  auto f = [&](double z) {
    const double d = normal_interval(z, w);
    if (d <= 0) return 0.0;
    double p = 1;
    if (whole) {
      for (int i = 1; i < ik; ++i) p *= d;
    } else {
      p = std::pow(d, k - 1);
    }
    return kInvSqrt2Pi * std::exp(-0.5 * z * z) * p;
  };
  // phi(z) bounds the integrand; nothing of note lies outside +-limit.
  return std::clamp(k * integrate(f, -kZLimit, kZLimit, kInnerTol), 0.0, 1.0);
}

// Density of s where s^2 ~ chi2(df) / df.
double log_scale_density(double s, double df) {
  return std::log(2.0) + 0.5 * df * std::log(0.5 * df) - std::lgamma(0.5 * df) +
         (df - 1) * std::log(s) - 0.5 * df * s * s;
}

// Where the scale density has dropped e^-40 below its mode. The density is
// log-concave for df >= 1, so the mass outside is negligible.
std::pair<double, double> scale_support(double df) {
  constexpr double kDrop = 40.0;
  if (df < 1) return {0.0, 12.0 / std::sqrt(df) + 10.0};
  const double mode = std::sqrt((df - 1) / df);
  const double top = log_scale_density(std::max(mode, 1e-300), df) - kDrop;
  auto below = [&](double s) { return s <= 0 || log_scale_density(s, df) < top; };
  auto edge = [&](double inside, double outside) {
    for (int i = 0; i < 100; ++i) {
      const double mid = 0.5 * (inside + outside);
      (below(mid) ? outside : inside) = mid;
    }
    return outside;
  };
  double far = mode + 1;
  while (!below(far)) far = mode + 2 * (far - mode);
  const double lo = df <= 1 || mode <= 0 ? 0.0 : edge(mode, 0.0);
  return {lo, edge(mode, far)};
}

}  // namespace

double binomial_half_cdf(std::uint64_t k, std::uint64_t n) {
  if (k >= n) return 1.0;
  if (n <= 60) {
    // Exact integer binomial coefficients; C(60, 30) fits in 64 bits.
    std::uint64_t coef = 1;
    std::uint64_t total = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
      coef = coef * (n - i + 1) / i;
      total += coef;
    }
    return std::ldexp(double(total), -static_cast<int>(n));
  }
  double total = 0;
  for (std::uint64_t i = 0; i <= k; ++i) {
    const double log_term = std::lgamma(double(n) + 1) - std::lgamma(double(i) + 1) -
                            std::lgamma(double(n - i) + 1) - double(n) * std::log(2.0);
    total += std::exp(log_term);
  }
  return std::min(total, 1.0);
}

double srange_cdf(double q, double k, double df) {
  if (!(k >= 2)) throw DataError("studentized range requires at least 2 groups");
  if (!(df > 0)) throw DataError("degrees of freedom must be positive");
  if (q <= 0) return 0.0;
  if (std::isinf(q)) return 1.0;
  if (std::isinf(df)) return normal_range_cdf(q, k);

  const auto [lo, hi] = scale_support(df);
  auto g = [&](double s) {
    if (s <= 0) return 0.0;
    return std::exp(log_scale_density(s, df)) * normal_range_cdf(q * s, k);
  };
  return std::clamp(integrate(g, lo, hi, kOuterTol), 0.0, 1.0);
}

double srange_quantile(double p, double k, double df) {
  if (!(p > 0 && p < 1)) throw DataError("quantile probability must be in (0, 1)");
  double lo = 0;
  double hi = 8;
  while (srange_cdf(hi, k, df) < p) {
    lo = hi;
    hi *= 2;
    if (hi > 1e6) throw DataError("studentized range quantile did not bracket");
  }
  while (hi - lo > 1e-8) {
    const double mid = 0.5 * (lo + hi);
    if (srange_cdf(mid, k, df) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace genpower::dist
