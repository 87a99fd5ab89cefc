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

// Distribution functions for the hypothesis tests: Student t and F through
// the regularized incomplete beta function, the studentized range through
// nested adaptive Gauss-Kronrod quadrature, and small exact binomials.

#ifndef GENPOWER_DISTRIBUTIONS_HPP_
#define GENPOWER_DISTRIBUTIONS_HPP_

#include <cmath>
#include <cstdint>
#include <limits>

#include "genpower/common.hpp"

namespace genpower::dist {

namespace detail {

// Continued fraction for I_x(a, b) (modified Lentz).
template <typename Scalar>
Scalar beta_continued_fraction(Scalar a, Scalar b, Scalar x) {
  constexpr int kMaxIter = 20000;
  const Scalar eps = std::numeric_limits<Scalar>::epsilon();
  const Scalar tiny = std::numeric_limits<Scalar>::min() / eps;
  const Scalar qab = a + b;
  const Scalar qap = a + 1;
  const Scalar qam = a - 1;
  Scalar c = 1;
  Scalar d = 1 - qab * x / qap;
  if (std::abs(d) < tiny) d = tiny;
  d = 1 / d;
  Scalar h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const Scalar m2 = Scalar(2 * m);
    Scalar aa = Scalar(m) * (b - Scalar(m)) * x / ((qam + m2) * (a + m2));
    d = 1 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1 / d;
    h *= d * c;
    aa = -(a + Scalar(m)) * (qab + Scalar(m)) * x / ((a + m2) * (qap + m2));
    d = 1 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1 / d;
    const Scalar del = d * c;
    h *= del;
    if (std::abs(del - 1) <= eps) break;
  }
  return h;
}

}  // namespace detail

// Regularized incomplete beta I_x(a, b).
template <typename Scalar>
Scalar incomplete_beta(Scalar a, Scalar b, Scalar x) {
  if (!(a > 0) || !(b > 0)) throw DataError("incomplete beta requires a, b > 0");
  if (x <= 0) return Scalar(0);
  if (x >= 1) return Scalar(1);
  using std::exp;
  using std::lgamma;
  using std::log;
  using std::log1p;
  const Scalar front =
      exp(lgamma(a + b) - lgamma(a) - lgamma(b) + a * log(x) + b * log1p(-x));
  if (x < (a + 1) / (a + b + 2)) return front * detail::beta_continued_fraction(a, b, x) / a;
  return 1 - front * detail::beta_continued_fraction(b, a, Scalar(1) - x) / b;
}

template <typename Scalar>
Scalar normal_cdf(Scalar z) {
  using std::erfc;
  return Scalar(0.5) * erfc(-z / std::sqrt(Scalar(2)));
}

// Upper tail 1 - Phi(z), accurate for large z.
template <typename Scalar>
Scalar normal_sf(Scalar z) {
  using std::erfc;
  return Scalar(0.5) * erfc(z / std::sqrt(Scalar(2)));
}

inline void check_df(double df) {
  if (!(df > 0)) throw DataError("degrees of freedom must be positive");
}

// Student t CDF.
template <typename Scalar>
Scalar t_cdf(Scalar t, Scalar df) {
  check_df(static_cast<double>(df));
  if (std::isinf(t)) return t > 0 ? Scalar(1) : Scalar(0);
  const Scalar tail = Scalar(0.5) * incomplete_beta(df / 2, Scalar(0.5), df / (df + t * t));
  return t > 0 ? 1 - tail : tail;
}

// Two-sided p-value P(|T| >= |t|).
template <typename Scalar>
Scalar t_two_sided_p(Scalar t, Scalar df) {
  check_df(static_cast<double>(df));
  if (std::isinf(t)) return Scalar(0);
  return incomplete_beta(df / 2, Scalar(0.5), df / (df + t * t));
}

template <typename Scalar>
Scalar f_cdf(Scalar f, Scalar d1, Scalar d2) {
  check_df(static_cast<double>(d1));
  check_df(static_cast<double>(d2));
  if (f <= 0) return Scalar(0);
  if (std::isinf(f)) return Scalar(1);
  return incomplete_beta(d1 / 2, d2 / 2, d1 * f / (d1 * f + d2));
}

// Upper tail P(F >= f); the same incomplete-beta call as the two-sided t
// p-value when d1 = 1.
template <typename Scalar>
Scalar f_sf(Scalar f, Scalar d1, Scalar d2) {
  check_df(static_cast<double>(d1));
  check_df(static_cast<double>(d2));
  if (f <= 0) return Scalar(1);
  if (std::isinf(f)) return Scalar(0);
  return incomplete_beta(d2 / 2, d1 / 2, d2 / (d2 + d1 * f));
}

// Upper tail of chi-square with one degree of freedom.
template <typename Scalar>
Scalar chi2_1_sf(Scalar x) {
  using std::erfc;
  if (x <= 0) return Scalar(1);
  return erfc(std::sqrt(x / 2));
}

// P(X <= k) for X ~ Binomial(n, 1/2), exact in double for n < 53.
double binomial_half_cdf(std::uint64_t k, std::uint64_t n);

// P(|Z_(k) - Z_(1)| / s <= q) for k normal means and s^2 ~ chi2(df)/df.
// `df` may be infinity.
double srange_cdf(double q, double k, double df);

// Inverse of srange_cdf in q, by bisection to 1e-8.
double srange_quantile(double p, double k, double df);

// Adaptive 7/15-point Gauss-Kronrod integration of f on [a, b].
template <typename F>
double integrate(F&& f, double a, double b, double abs_tol, int max_panels = 200);

}  // namespace genpower::dist

#include "genpower/integrate_inl.hpp"

#endif  // GENPOWER_DISTRIBUTIONS_HPP_
