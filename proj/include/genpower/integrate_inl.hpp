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

#ifndef GENPOWER_INTEGRATE_INL_HPP_
#define GENPOWER_INTEGRATE_INL_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <vector>

namespace genpower::dist {

namespace detail {

// Kronrod nodes on [0, 1] (symmetric); odd indices are shared with the
// 7-point Gauss rule.
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a;
  double b;
  double value;
  double error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

// 15-point Kronrod estimate with the embedded 7-point Gauss rule; the error
// is scaled the same way as QUADPACK's QK15.
template <typename F>
Panel kronrod15(F& f, double a, double b) {
  const double centre = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  std::array<double, 7> f1{};
  std::array<double, 7> f2{};
  const double fc = f(centre);
  double kronrod = fc * kKronrodWeights[7];
  double gauss = fc * kGaussWeights[3];
  double abs_sum = std::abs(kronrod);
  for (int i = 0; i < 7; ++i) {
    const double dx = half * kKronrodNodes[i];
    f1[i] = f(centre - dx);
    f2[i] = f(centre + dx);
    kronrod += kKronrodWeights[i] * (f1[i] + f2[i]);
    abs_sum += kKronrodWeights[i] * (std::abs(f1[i]) + std::abs(f2[i]));
    if (i % 2 == 1) gauss += kGaussWeights[i / 2] * (f1[i] + f2[i]);
  }
  const double mean = 0.5 * kronrod;
  double asc = kKronrodWeights[7] * std::abs(fc - mean);
  for (int i = 0; i < 7; ++i) {
    asc += kKronrodWeights[i] * (std::abs(f1[i] - mean) + std::abs(f2[i] - mean));
  }
  const double h = std::abs(half);
  double err = std::abs((kronrod - gauss) * half);
  asc *= h;
  abs_sum *= h;
  if (asc != 0 && err != 0) err = asc * std::min(1.0, std::pow(200 * err / asc, 1.5));
  constexpr double kEps = 2.220446049250313e-16;
  constexpr double kTiny = 2.2250738585072014e-308;
  if (abs_sum > kTiny / (50 * kEps)) err = std::max(err, 50 * kEps * abs_sum);
  return Panel{a, b, kronrod * half, err};
}

}  // namespace detail

// Globally adaptive: the panel with the largest error estimate is bisected
// until the summed estimate drops below abs_tol or max_panels is reached.
template <typename F>
double integrate(F&& f, double a, double b, double abs_tol, int max_panels) {
  std::priority_queue<detail::Panel> heap;
  heap.push(detail::kronrod15(f, a, b));
  double value = heap.top().value;
  double error = heap.top().error;
  int panels = 1;
  while (error > abs_tol && panels < max_panels) {
    const detail::Panel worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    const detail::Panel left = detail::kronrod15(f, worst.a, mid);
    const detail::Panel right = detail::kronrod15(f, mid, worst.b);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++panels;
  }
  // Re-sum to shed the drift of the running total.
  double total = 0;
  while (!heap.empty()) {
    total += heap.top().value;
    heap.pop();
  }
  (void)value;
  return total;
}

}  // namespace genpower::dist

#endif  // GENPOWER_INTEGRATE_INL_HPP_
