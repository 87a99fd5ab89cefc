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

#include "genpower/stats.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <mutex>
#include <tuple>

#include <fmt/core.h>

namespace genpower::stats {

namespace {

std::size_t level_index(const std::vector<std::string>& levels, const std::string& v) {
  const auto it = std::find(levels.begin(), levels.end(), v);
  if (it == levels.end()) throw DataError(fmt::format("unknown factor level '{}'", v));
  return static_cast<std::size_t>(it - levels.begin());
}

void add_level(std::vector<std::string>& levels, const std::string& v) {
  if (std::find(levels.begin(), levels.end(), v) == levels.end()) levels.push_back(v);
}

// Sum-to-zero coding of a factor with L levels: L - 1 columns.
Matrix<double> contrast_block(const std::vector<std::size_t>& level, std::size_t levels) {
  Matrix<double> x = Matrix<double>::Zero(static_cast<Eigen::Index>(level.size()),
                                          static_cast<Eigen::Index>(levels - 1));
  for (std::size_t i = 0; i < level.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    if (level[i] + 1 == levels) {
      x.row(r).setConstant(-1.0);
    } else {
      x(r, static_cast<Eigen::Index>(level[i])) = 1.0;
    }
  }
  return x;
}

Matrix<double> interaction_block(const Matrix<double>& a, const Matrix<double>& b) {
  Matrix<double> x(a.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.cols(); ++i) {
    for (Eigen::Index j = 0; j < b.cols(); ++j) {
      x.col(i * b.cols() + j) = a.col(i).cwiseProduct(b.col(j));
    }
  }
  return x;
}

Matrix<double> hstack(const std::vector<const Matrix<double>*>& blocks, Eigen::Index rows) {
  Eigen::Index cols = 0;
  for (const auto* b : blocks) cols += b->cols();
  Matrix<double> x(rows, cols);
  Eigen::Index c = 0;
  for (const auto* b : blocks) {
    x.middleCols(c, b->cols()) = *b;
    c += b->cols();
  }
  return x;
}

struct Fit {
  double rss = 0;
  Eigen::Index rank = 0;
};

Fit least_squares(const Matrix<double>& x, const Vector<double>& y) {
  Eigen::ColPivHouseholderQR<Matrix<double>> qr(x);
  const Vector<double> beta = qr.solve(y);
  return Fit{(y - x * beta).squaredNorm(), qr.rank()};
}

void finish_term(AnovaTerm& t, double ms_residual, double df_residual) {
  t.ms = t.df > 0 ? t.ss / t.df : 0.0;
  if (ms_residual <= 0) {
    t.f = t.ss <= 0 ? 0.0 : std::numeric_limits<double>::infinity();
    t.p = t.ss <= 0 ? 1.0 : 0.0;
    return;
  }
  t.f = t.ms / ms_residual;
  t.p = t.df > 0 ? dist::f_sf(t.f, t.df, df_residual) : 1.0;
}

}  // namespace

FactorDesign::FactorDesign(std::string factor_a, std::string factor_b)
    : factor_a_(std::move(factor_a)), factor_b_(std::move(factor_b)) {}

void FactorDesign::add(double value, std::string a, std::string b) {
  if (!std::isfinite(value)) throw DataError("non-finite observation");
  if (two_way() && b.empty()) throw DataError("two-way design needs a level for " + factor_b_);
  add_level(levels_a_, a);
  if (two_way()) add_level(levels_b_, b);
  obs_.push_back(Observation{value, std::move(a), std::move(b)});
}

void FactorDesign::set_levels_a(std::vector<std::string> levels) {
  for (const auto& l : levels_a_) level_index(levels, l);
  levels_a_ = std::move(levels);
}

void FactorDesign::set_levels_b(std::vector<std::string> levels) {
  for (const auto& l : levels_b_) level_index(levels, l);
  levels_b_ = std::move(levels);
}

std::size_t FactorDesign::level_a(std::size_t i) const { return level_index(levels_a_, obs_[i].a); }
std::size_t FactorDesign::level_b(std::size_t i) const { return level_index(levels_b_, obs_[i].b); }

Vector<double> FactorDesign::values() const {
  Vector<double> y(static_cast<Eigen::Index>(obs_.size()));
  for (std::size_t i = 0; i < obs_.size(); ++i) y(static_cast<Eigen::Index>(i)) = obs_[i].value;
  return y;
}

std::vector<GroupSummary> group_summary(const FactorDesign& design) {
  const std::size_t lb = design.two_way() ? design.levels_b().size() : 1;
  std::vector<std::vector<double>> cells(design.levels_a().size() * lb);
  for (std::size_t i = 0; i < design.size(); ++i) {
    const std::size_t j = design.two_way() ? design.level_b(i) : 0;
    cells[design.level_a(i) * lb + j].push_back(design.observations()[i].value);
  }
  std::vector<GroupSummary> out;
  for (std::size_t a = 0; a < design.levels_a().size(); ++a) {
    for (std::size_t b = 0; b < lb; ++b) {
      const auto& v = cells[a * lb + b];
      GroupSummary g;
      g.a = design.levels_a()[a];
      if (design.two_way()) g.b = design.levels_b()[b];
      g.n = v.size();
      const Eigen::Map<const Vector<double>> x(v.data(), static_cast<Eigen::Index>(v.size()));
      g.mean = mean(x);
      g.stderr_mean = v.size() < 2 ? 0.0 : std::sqrt(sample_variance(x) / double(v.size()));
      out.push_back(std::move(g));
    }
  }
  return out;
}

TTestResult t_test(std::span<const double> x1, std::span<const double> x2) {
  if (x1.empty() || x2.empty()) throw DataError("t-test needs observations in both groups");
  if (x1.size() + x2.size() < 3) throw DataError("t-test needs at least 3 observations");
  const Eigen::Map<const Vector<double>> a(x1.data(), static_cast<Eigen::Index>(x1.size()));
  const Eigen::Map<const Vector<double>> b(x2.data(), static_cast<Eigen::Index>(x2.size()));
  const double n1 = double(x1.size());
  const double n2 = double(x2.size());
  TTestResult r;
  r.mean_1 = a.mean();
  r.mean_2 = b.mean();
  r.df = n1 + n2 - 2;
  const double pooled =
      ((n1 - 1) * sample_variance(a) + (n2 - 1) * sample_variance(b)) / r.df;
  const double se = std::sqrt(pooled * (1 / n1 + 1 / n2));
  const double diff = r.mean_1 - r.mean_2;
  if (se <= 0) {
    r.t = diff == 0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff);
    r.p = diff == 0 ? 1.0 : 0.0;
    return r;
  }
  r.t = diff / se;
  r.p = dist::t_two_sided_p(r.t, r.df);
  return r;
}

std::optional<SsType> parse_ss_type(std::string_view s) {
  if (s == "1" || s == "I") return SsType::kI;
  if (s == "2" || s == "II") return SsType::kII;
  if (s == "3" || s == "III") return SsType::kIII;
  return std::nullopt;
}

const AnovaTerm& AnovaResult::term(std::string_view name) const {
  for (const auto& t : terms) {
    if (t.name == name) return t;
  }
  if (model.name == name) return model;
  throw DataError(fmt::format("no ANOVA term '{}'", name));
}

AnovaResult anova(const FactorDesign& design, SsType type) {
  const std::size_t n = design.size();
  const std::size_t la = design.levels_a().size();
  const std::size_t lb = design.two_way() ? design.levels_b().size() : 1;
  if (la < 2) throw DataError(fmt::format("factor {} needs at least 2 levels", design.factor_a()));
  if (design.two_way() && lb < 2) {
    throw DataError(fmt::format("factor {} needs at least 2 levels", design.factor_b()));
  }
  for (const auto& g : group_summary(design)) {
    if (g.n == 0) {
      throw DataError(design.two_way()
                          ? fmt::format("empty cell {}={}, {}={}", design.factor_a(), g.a,
                                        design.factor_b(), g.b)
                          : fmt::format("empty level {}={}", design.factor_a(), g.a));
    }
  }
  if (n <= la * lb) throw DataError("no residual degrees of freedom");

  const auto rows = static_cast<Eigen::Index>(n);
  Vector<double> y = design.values();
  const double scale = y.squaredNorm();
  y.array() -= y.mean();

  AnovaResult r;
  r.type = type;
  r.n = n;
  r.ss_total = y.squaredNorm();
  if (r.ss_total <= 1e-24 * scale) {
    r.ss_total = 0;
    y.setZero();
  }
  const double eps = 1e-11 * r.ss_total;
  auto clean = [eps](double ss) { return ss <= eps ? 0.0 : ss; };

  const Matrix<double> ones = Matrix<double>::Ones(rows, 1);
  std::vector<std::size_t> lev_a(n);
  for (std::size_t i = 0; i < n; ++i) lev_a[i] = design.level_a(i);
  const Matrix<double> xa = contrast_block(lev_a, la);
  const double rss_null = y.squaredNorm();

  if (!design.two_way()) {
    const Fit full = least_squares(hstack({&ones, &xa}, rows), y);
    r.df_residual = double(n) - double(full.rank);
    r.ss_residual = clean(full.rss);
    AnovaTerm a{design.factor_a(), clean(rss_null - full.rss), double(la - 1)};
    r.terms.push_back(a);
  } else {
    std::vector<std::size_t> lev_b(n);
    for (std::size_t i = 0; i < n; ++i) lev_b[i] = design.level_b(i);
    const Matrix<double> xb = contrast_block(lev_b, lb);
    const Matrix<double> xab = interaction_block(xa, xb);
    const Fit full = least_squares(hstack({&ones, &xa, &xb, &xab}, rows), y);
    if (full.rank != 1 + xa.cols() + xb.cols() + xab.cols()) {
      throw DataError("design matrix is rank deficient");
    }
    const double rss_a = least_squares(hstack({&ones, &xa}, rows), y).rss;
    const double rss_b = least_squares(hstack({&ones, &xb}, rows), y).rss;
    const double rss_ab = least_squares(hstack({&ones, &xa, &xb}, rows), y).rss;
    double ss_a = 0;
    double ss_b = 0;
    switch (type) {
      case SsType::kI:
        ss_a = rss_null - rss_a;
        ss_b = rss_a - rss_ab;
        break;
      case SsType::kII:
        ss_a = rss_b - rss_ab;
        ss_b = rss_a - rss_ab;
        break;
      case SsType::kIII:
        ss_a = least_squares(hstack({&ones, &xb, &xab}, rows), y).rss - full.rss;
        ss_b = least_squares(hstack({&ones, &xa, &xab}, rows), y).rss - full.rss;
        break;
    }
    r.df_residual = double(n) - double(full.rank);
    r.ss_residual = clean(full.rss);
    r.terms.push_back(AnovaTerm{design.factor_a(), clean(ss_a), double(la - 1)});
    r.terms.push_back(AnovaTerm{design.factor_b(), clean(ss_b), double(lb - 1)});
    r.terms.push_back(AnovaTerm{design.factor_a() + ":" + design.factor_b(),
                                clean(rss_ab - full.rss), double((la - 1) * (lb - 1))});
  }
  r.ms_residual = r.ss_residual / r.df_residual;
  for (auto& t : r.terms) finish_term(t, r.ms_residual, r.df_residual);
  r.model = AnovaTerm{"model", clean(rss_null - r.ss_residual), double(la * lb - 1)};
  finish_term(r.model, r.ms_residual, r.df_residual);
  return r;
}

namespace {

// The quantile costs a few hundred cdf evaluations; analyses ask for the
// same (k, df, alpha) over and over.
double tukey_critical(double k, double df, double alpha) {
  static std::mutex mu;
  static std::map<std::tuple<double, double, double>, double> memo;
  const auto key = std::make_tuple(k, df, alpha);
  {
    std::lock_guard<std::mutex> lock(mu);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
  }
  const double q = dist::srange_quantile(1 - alpha, k, df);
  std::lock_guard<std::mutex> lock(mu);
  memo.emplace(key, q);
  return q;
}

}  // namespace

TukeyResult tukey_hsd(const std::vector<TukeyGroup>& groups, double mse, double df_residual,
                      double alpha) {
  if (groups.size() < 2) throw DataError("Tukey HSD needs at least 2 groups");
  if (!(alpha > 0 && alpha < 1)) throw DataError("alpha must be in (0, 1)");
  TukeyResult r;
  r.alpha = alpha;
  r.mse = mse;
  r.df_residual = df_residual;
  r.k = groups.size();
  const double k = double(groups.size());
  r.q_critical = tukey_critical(k, df_residual, alpha);
  for (std::size_t i = 0; i < groups.size(); ++i) {
    for (std::size_t j = i + 1; j < groups.size(); ++j) {
      const auto& gi = groups[i];
      const auto& gj = groups[j];
      if (gi.n == 0 || gj.n == 0) throw DataError("Tukey HSD group is empty");
      TukeyComparison c;
      c.group_1 = gi.name;
      c.group_2 = gj.name;
      c.diff = gi.mean - gj.mean;
      const double se = std::sqrt(mse / 2 * (1 / double(gi.n) + 1 / double(gj.n)));
      if (se <= 0) {
        c.q = c.diff == 0 ? 0.0 : std::numeric_limits<double>::infinity();
        c.p_adj = c.diff == 0 ? 1.0 : 0.0;
      } else {
        c.q = std::abs(c.diff) / se;
        c.p_adj = std::clamp(1 - dist::srange_cdf(c.q, k, df_residual), 0.0, 1.0);
      }
      c.significant = c.p_adj < alpha;
      r.comparisons.push_back(std::move(c));
    }
  }
  return r;
}

TukeyResult tukey_hsd(const FactorDesign& design, TukeyGrouping grouping, double alpha) {
  const AnovaResult fit = anova(design);
  std::vector<TukeyGroup> groups;
  if (grouping == TukeyGrouping::kCells) {
    for (const auto& g : group_summary(design)) {
      groups.push_back(
          TukeyGroup{design.two_way() ? g.a + ":" + g.b : g.a, g.n, g.mean});
    }
  } else {
    if (grouping == TukeyGrouping::kFactorB && !design.two_way()) {
      throw DataError("one-way design has no second factor");
    }
    const bool use_a = grouping == TukeyGrouping::kFactorA;
    const auto& levels = use_a ? design.levels_a() : design.levels_b();
    std::vector<double> sum(levels.size(), 0.0);
    std::vector<std::size_t> count(levels.size(), 0);
    for (std::size_t i = 0; i < design.size(); ++i) {
      const std::size_t l = use_a ? design.level_a(i) : design.level_b(i);
      sum[l] += design.observations()[i].value;
      ++count[l];
    }
    for (std::size_t l = 0; l < levels.size(); ++l) {
      groups.push_back(TukeyGroup{levels[l], count[l], count[l] ? sum[l] / double(count[l]) : 0});
    }
  }
  return tukey_hsd(groups, fit.ms_residual, fit.df_residual, alpha);
}

BonferroniResult bonferroni(std::span<const double> p, double alpha, std::size_t m) {
  if (!(alpha > 0 && alpha < 1)) throw DataError("alpha must be in (0, 1)");
  BonferroniResult r;
  r.alpha = alpha;
  r.m = m == 0 ? p.size() : m;
  if (r.m < p.size()) throw DataError("Bonferroni m is smaller than the number of tests");
  r.threshold = r.m == 0 ? alpha : alpha / double(r.m);
  for (double v : p) {
    r.p_adjusted.push_back(std::min(1.0, v * double(r.m)));
    r.significant.push_back(v < r.threshold);
  }
  return r;
}

McNemarResult mcnemar(std::uint64_t b, std::uint64_t c) {
  McNemarResult r;
  r.b = b;
  r.c = c;
  const std::uint64_t n = b + c;
  if (n == 0) return r;
  if (n < 25) {
    r.exact = true;
    r.statistic = double(std::min(b, c));
    r.p = std::min(1.0, 2 * dist::binomial_half_cdf(std::min(b, c), n));
    return r;
  }
  const double d = std::abs(double(b) - double(c)) - 1;
  r.statistic = d > 0 ? d * d / double(n) : 0.0;
  r.p = dist::chi2_1_sf(r.statistic);
  return r;
}

McNemarResult mcnemar(std::span<const int> pred_1, std::span<const int> pred_2,
                      std::span<const int> gold) {
  if (pred_1.size() != gold.size() || pred_2.size() != gold.size()) {
    throw DataError("McNemar inputs differ in length");
  }
  std::uint64_t b = 0;
  std::uint64_t c = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const bool ok_1 = pred_1[i] == gold[i];
    const bool ok_2 = pred_2[i] == gold[i];
    if (ok_1 && !ok_2) ++b;
    if (!ok_1 && ok_2) ++c;
  }
  return mcnemar(b, c);
}

}  // namespace genpower::stats
