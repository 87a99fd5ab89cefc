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

#ifndef GENPOWER_ACCEPTANCE  // the acceptance binary supplies its own main
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#endif
#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "genpower/common.hpp"
#include "genpower/distributions.hpp"
#include "genpower/stats.hpp"

using namespace genpower;
using namespace genpower::stats;

namespace {

bool rel_close(double got, double want, double tol) {
  return std::abs(got - want) <= tol * std::max(1.0, std::abs(want));
}

// Cell means 13, 11, 9, 7 with +-0.5 noise, two per cell.
FactorDesign balanced_2x2() {
  FactorDesign d("a", "b");
  const double v[4][2] = {{12.5, 13.5}, {10.5, 11.5}, {8.5, 9.5}, {6.5, 7.5}};
  const char* la[4] = {"a1", "a1", "a2", "a2"};
  const char* lb[4] = {"b1", "b2", "b1", "b2"};
  for (int c = 0; c < 4; ++c) {
    for (double x : v[c]) d.add(x, la[c], lb[c]);
  }
  return d;
}

// Oracle: residual sum of squares of the least-squares fit on design X,
// solved by the normal equations in long double.
double rss_oracle(const std::vector<std::vector<double>>& x, const std::vector<double>& y) {
  const std::size_t n = y.size();
  const std::size_t p = x.empty() ? 0 : x[0].size();
  std::vector<std::vector<long double>> a(p, std::vector<long double>(p + 1, 0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t r = 0; r < p; ++r) {
      for (std::size_t c = 0; c < p; ++c) a[r][c] += x[i][r] * x[i][c];
      a[r][p] += x[i][r] * y[i];
    }
  }
  for (std::size_t c = 0; c < p; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < p; ++r) {
      if (std::fabs(a[r][c]) > std::fabs(a[piv][c])) piv = r;
    }
    std::swap(a[c], a[piv]);
    for (std::size_t r = 0; r < p; ++r) {
      if (r == c) continue;
      const long double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k <= p; ++k) a[r][k] -= f * a[c][k];
    }
  }
  long double rss = 0;
  for (std::size_t i = 0; i < n; ++i) {
    long double fit = 0;
    for (std::size_t r = 0; r < p; ++r) fit += x[i][r] * (a[r][p] / a[r][r]);
    rss += (y[i] - fit) * (y[i] - fit);
  }
  return double(rss);
}

}  // namespace

TEST_CASE("balanced 2x2 ANOVA fixture") {
  for (SsType type : {SsType::kI, SsType::kII, SsType::kIII}) {
    const AnovaResult r = anova(balanced_2x2(), type);
    CHECK(rel_close(r.term("a").ss, 32, 1e-9));
    CHECK(rel_close(r.term("b").ss, 8, 1e-9));
    CHECK(std::abs(r.term("a:b").ss) <= 1e-9);
    CHECK(rel_close(r.ss_residual, 2, 1e-9));
    CHECK(r.df_residual == 4);
    CHECK(rel_close(r.term("a").f, 64, 1e-9));
    CHECK(rel_close(r.term("b").f, 16, 1e-9));
    CHECK(rel_close(r.ss_total, 42, 1e-9));
  }
}

TEST_CASE("F equals t squared on random two-group designs") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> noise(0, 1);
  std::uniform_int_distribution<int> size(2, 30);
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<double> g1(size(rng));
    std::vector<double> g2(size(rng));
    const double shift = noise(rng);
    for (auto& v : g1) v = noise(rng) * 2 + 5;
    for (auto& v : g2) v = noise(rng) * 2 + 5 + shift;
    FactorDesign d("g");
    for (double v : g1) d.add(v, "x");
    for (double v : g2) d.add(v, "y");
    const auto t = t_test(g1, g2);
    const auto a = anova(d);
    CHECK(rel_close(a.term("g").f, t.t * t.t, 1e-9));
    CHECK(rel_close(a.term("g").p, t.p, 1e-9));

    // Hand pooled-variance t.
    auto mean = [](const std::vector<double>& v) {
      double s = 0;
      for (double x : v) s += x;
      return s / double(v.size());
    };
    const double m1 = mean(g1), m2 = mean(g2);
    double ss = 0;
    for (double x : g1) ss += (x - m1) * (x - m1);
    for (double x : g2) ss += (x - m2) * (x - m2);
    const double n1 = double(g1.size()), n2 = double(g2.size());
    const double sp2 = ss / (n1 + n2 - 2);
    const double t_oracle = (m1 - m2) / std::sqrt(sp2 * (1 / n1 + 1 / n2));
    CHECK(rel_close(t.t, t_oracle, 1e-9));
    CHECK(t.df == n1 + n2 - 2);
  }
}

TEST_CASE("unbalanced sums of squares against a normal-equations oracle") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> noise(0, 1);
  FactorDesign d("a", "b");
  std::vector<double> y;
  std::vector<int> ia, ib;
  const int counts[2][3] = {{3, 5, 2}, {6, 2, 4}};
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 3; ++b) {
      for (int k = 0; k < counts[a][b]; ++k) {
        const double v = 1.0 * a + 0.5 * b + 0.8 * a * b + noise(rng);
        d.add(v, a ? "a2" : "a1", "b" + std::to_string(b + 1));
        y.push_back(v);
        ia.push_back(a);
        ib.push_back(b);
      }
    }
  }
  // Sum-to-zero coding built independently of the library.
  auto row = [&](std::size_t i, bool with_a, bool with_b, bool with_ab) {
    std::vector<double> r{1.0};
    const double ca = ia[i] == 0 ? 1.0 : -1.0;
    double cb[2] = {ib[i] == 0 ? 1.0 : ib[i] == 2 ? -1.0 : 0.0,
                    ib[i] == 1 ? 1.0 : ib[i] == 2 ? -1.0 : 0.0};
    if (with_a) r.push_back(ca);
    if (with_b) {
      r.push_back(cb[0]);
      r.push_back(cb[1]);
    }
    if (with_ab) {
      r.push_back(ca * cb[0]);
      r.push_back(ca * cb[1]);
    }
    return r;
  };
  auto rss = [&](bool a, bool b, bool ab) {
    std::vector<std::vector<double>> x;
    for (std::size_t i = 0; i < y.size(); ++i) x.push_back(row(i, a, b, ab));
    return rss_oracle(x, y);
  };
  const double r0 = rss(false, false, false), ra = rss(true, false, false),
               rb = rss(false, true, false), rab = rss(true, true, false),
               full = rss(true, true, true);

  const auto t1 = anova(d, SsType::kI);
  CHECK(rel_close(t1.term("a").ss, r0 - ra, 1e-9));
  CHECK(rel_close(t1.term("b").ss, ra - rab, 1e-9));
  CHECK(rel_close(t1.term("a:b").ss, rab - full, 1e-9));
  const auto t2 = anova(d, SsType::kII);
  CHECK(rel_close(t2.term("a").ss, rb - rab, 1e-9));
  CHECK(rel_close(t2.term("b").ss, ra - rab, 1e-9));
  CHECK(rel_close(t2.term("a:b").ss, rab - full, 1e-9));
  const auto t3 = anova(d, SsType::kIII);
  CHECK(rel_close(t3.term("a").ss, rss(false, true, true) - full, 1e-9));
  CHECK(rel_close(t3.term("b").ss, rss(true, false, true) - full, 1e-9));
  CHECK(rel_close(t3.ss_residual, full, 1e-9));
  CHECK(t3.df_residual == double(y.size() - 6));
}

TEST_CASE("ANOVA edge cases") {
  SUBCASE("all-equal values give F = 0") {
    FactorDesign d("a", "b");
    for (const char* a : {"x", "y"}) {
      for (const char* b : {"u", "v"}) {
        d.add(3.0, a, b);
        d.add(3.0, a, b);
      }
    }
    const auto r = anova(d);
    for (const auto& t : r.terms) {
      CHECK(t.f == 0);
      CHECK(t.p == 1);
    }
  }
  SUBCASE("empty cell is an error naming the cell") {
    FactorDesign d("a", "b");
    d.add(1, "x", "u");
    d.add(2, "x", "v");
    d.add(3, "y", "u");
    d.add(4, "y", "u");
    d.set_levels_b({"u", "v"});
    CHECK_THROWS_AS(anova(d), DataError);
  }
}

TEST_CASE("Tukey critical values against published tables") {
  CHECK(std::abs(dist::srange_quantile(0.95, 4, 20) - 3.958) <= 5e-3);
  CHECK(std::abs(dist::srange_quantile(0.95, 3, 10) - 3.877) <= 5e-3);
  CHECK(std::abs(dist::srange_quantile(0.95, 2, 1e6) - 2.772) <= 5e-3);
  CHECK(std::abs(dist::srange_quantile(0.99, 5, 30) - 5.048) <= 5e-3);
  // k = 2: the range of two normals is sqrt(2)|Z|, so q = sqrt(2) t.
  const double t975 = 2.085963447;  // t(0.975, 20)
  CHECK(std::abs(dist::srange_quantile(0.95, 2, 20) - std::sqrt(2.0) * t975) <= 1e-5);
}

TEST_CASE("Tukey-Kramer on a three-group design") {
  const std::vector<TukeyGroup> g = {{"a", 5, 10.0}, {"b", 5, 12.0}, {"c", 8, 10.5}};
  const auto r = tukey_hsd(g, 1.5, 15, 0.05);
  REQUIRE(r.comparisons.size() == 3);
  const auto& ab = r.comparisons[0];
  CHECK(ab.group_1 == "a");
  CHECK(ab.group_2 == "b");
  CHECK(rel_close(ab.q, 2.0 / std::sqrt(1.5 / 2 * (0.2 + 0.2)), 1e-12));
  CHECK(ab.significant == (ab.q > r.q_critical));
  for (const auto& c : r.comparisons) CHECK((c.p_adj < 0.05) == (c.q > r.q_critical));
}

TEST_CASE("McNemar") {
  CHECK(std::abs(mcnemar(0, 10).p - std::ldexp(1.0, -9)) <= 1e-12);
  CHECK(mcnemar(0, 10).exact);
  CHECK(mcnemar(5, 5).p == doctest::Approx(1.0));
  // Continuity-corrected chi-square: (|30-10|-1)^2/40 = 9.025.
  const auto big = mcnemar(30, 10);
  CHECK_FALSE(big.exact);
  CHECK(big.p == doctest::Approx(std::erfc(std::sqrt(9.025 / 2))).epsilon(1e-10));
}

TEST_CASE("Bonferroni") {
  const std::vector<double> p = {0.001, 0.01, 0.04};
  const auto r = bonferroni(p, 0.05);
  CHECK(r.m == 3);
  CHECK(r.threshold == doctest::Approx(0.05 / 3));
  CHECK(r.significant[0]);
  CHECK(r.significant[1]);
  CHECK_FALSE(r.significant[2]);
  CHECK(r.p_adjusted[2] == doctest::Approx(0.12));
}

TEST_CASE("distribution functions against reference values") {
  CHECK(dist::t_two_sided_p(2.085963447, 20.0) == doctest::Approx(0.05).epsilon(1e-8));
  CHECK(dist::t_two_sided_p(12.7062047, 1.0) == doctest::Approx(0.05).epsilon(1e-7));
  CHECK(dist::f_sf(4.964602744, 1.0, 10.0) == doctest::Approx(0.05).epsilon(1e-8));
  CHECK(dist::chi2_1_sf(3.841458821) == doctest::Approx(0.05).epsilon(1e-8));
  CHECK(dist::binomial_half_cdf(0, 10) == std::ldexp(1.0, -10));
  CHECK(dist::binomial_half_cdf(10, 10) == 1.0);
}

TEST_CASE("Gauss-Kronrod integrates polynomials exactly") {
  for (int k = 0; k <= 20; ++k) {
    const double got =
        dist::integrate([k](double x) { return std::pow(x, k); }, 0.0, 1.0, 1e-14, 1);
    CHECK(rel_close(got, 1.0 / (k + 1), 1e-13));
  }
  const double gauss = dist::integrate([](double x) { return std::exp(-x * x / 2); }, -10.0,
                                       10.0, 1e-12);
  CHECK(rel_close(gauss, std::sqrt(2 * M_PI), 1e-11));
}
