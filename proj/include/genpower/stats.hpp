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

// Group summaries, Student's t-test, one- and two-way ANOVA on unbalanced
// designs, Tukey-Kramer HSD, Bonferroni correction and McNemar's test.

#ifndef GENPOWER_STATS_HPP_
#define GENPOWER_STATS_HPP_

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "genpower/common.hpp"
#include "genpower/distributions.hpp"

namespace genpower::stats {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Derived>
typename Derived::Scalar mean(const Eigen::MatrixBase<Derived>& x) {
  return x.size() == 0 ? typename Derived::Scalar(0) : x.mean();
}

// Unbiased sample variance; 0 for fewer than two values.
template <typename Derived>
typename Derived::Scalar sample_variance(const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  if (x.size() < 2) return Scalar(0);
  const Scalar m = x.mean();
  return (x.array() - m).square().sum() / Scalar(x.size() - 1);
}

// One or two crossed factors. Level order is the order of first appearance
// unless given explicitly.
class FactorDesign {
 public:
  struct Observation {
    double value;
    std::string a;
    std::string b;  // empty for one-way designs
  };

  FactorDesign(std::string factor_a, std::string factor_b = {});

  void add(double value, std::string a, std::string b = {});
  void set_levels_a(std::vector<std::string> levels);
  void set_levels_b(std::vector<std::string> levels);

  bool two_way() const { return !factor_b_.empty(); }
  const std::string& factor_a() const { return factor_a_; }
  const std::string& factor_b() const { return factor_b_; }
  const std::vector<std::string>& levels_a() const { return levels_a_; }
  const std::vector<std::string>& levels_b() const { return levels_b_; }
  const std::vector<Observation>& observations() const { return obs_; }
  std::size_t size() const { return obs_.size(); }

  std::size_t level_a(std::size_t i) const;
  std::size_t level_b(std::size_t i) const;
  Vector<double> values() const;

 private:
  std::string factor_a_;
  std::string factor_b_;
  std::vector<std::string> levels_a_;
  std::vector<std::string> levels_b_;
  std::vector<Observation> obs_;
};

struct GroupSummary {
  std::string a;
  std::string b;
  std::size_t n = 0;
  double mean = 0;
  double stderr_mean = 0;  // s / sqrt(n); 0 when n < 2
};

// One entry per cell (or per level for one-way designs), in level order.
// Empty cells are reported with n = 0.
std::vector<GroupSummary> group_summary(const FactorDesign& design);

struct TTestResult {
  double t = 0;
  double df = 0;
  double p = 1;
  double mean_1 = 0;
  double mean_2 = 0;
};

// Pooled-variance two-sample t-test, two-sided.
TTestResult t_test(std::span<const double> x1, std::span<const double> x2);

enum class SsType : std::uint8_t { kI = 1, kII = 2, kIII = 3 };
std::optional<SsType> parse_ss_type(std::string_view s);

struct AnovaTerm {
  std::string name;  // factor name, "A:B" for the interaction, or "model"
  double ss = 0;
  double df = 0;
  double ms = 0;
  double f = 0;
  double p = 1;
};

struct AnovaResult {
  SsType type = SsType::kII;
  std::vector<AnovaTerm> terms;  // main effects then interaction
  AnovaTerm model;               // omnibus over all cells
  double ss_residual = 0;
  double df_residual = 0;
  double ms_residual = 0;
  double ss_total = 0;
  std::size_t n = 0;

  const AnovaTerm& term(std::string_view name) const;
};

// Least-squares ANOVA with sum-to-zero contrasts. Two-way designs fit the
// full factorial model and need every cell populated; one-way designs fit
// factor A alone. Throws DataError on empty cells or no residual df.
AnovaResult anova(const FactorDesign& design, SsType type = SsType::kII);

struct TukeyGroup {
  std::string name;
  std::size_t n = 0;
  double mean = 0;
};

struct TukeyComparison {
  std::string group_1;
  std::string group_2;
  double diff = 0;  // mean_1 - mean_2
  double q = 0;
  double p_adj = 1;
  bool significant = false;
};

struct TukeyResult {
  double alpha = 0.05;
  double mse = 0;
  double df_residual = 0;
  std::size_t k = 0;
  double q_critical = 0;
  std::vector<TukeyComparison> comparisons;
};

TukeyResult tukey_hsd(const std::vector<TukeyGroup>& groups, double mse, double df_residual,
                      double alpha = 0.05);

enum class TukeyGrouping : std::uint8_t { kCells, kFactorA, kFactorB };

// Groups from `design`, MSE and residual df from its ANOVA model.
TukeyResult tukey_hsd(const FactorDesign& design, TukeyGrouping grouping, double alpha = 0.05);

struct BonferroniResult {
  double alpha = 0.05;
  std::size_t m = 0;
  double threshold = 0;
  std::vector<double> p_adjusted;
  std::vector<bool> significant;
};

// `m` defaults to p.size() when 0.
BonferroniResult bonferroni(std::span<const double> p, double alpha = 0.05, std::size_t m = 0);

struct McNemarResult {
  std::uint64_t b = 0;  // first right, second wrong
  std::uint64_t c = 0;  // first wrong, second right
  bool exact = false;
  double statistic = 0;
  double p = 1;
};

// Exact binomial when b + c < 25, otherwise continuity-corrected chi-square.
McNemarResult mcnemar(std::uint64_t b, std::uint64_t c);
McNemarResult mcnemar(std::span<const int> pred_1, std::span<const int> pred_2,
                      std::span<const int> gold);

}  // namespace genpower::stats

#endif  // GENPOWER_STATS_HPP_
