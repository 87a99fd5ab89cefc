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

#include "genpower/learn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <list>
#include <random>
#include <unordered_map>

namespace genpower::learn {

namespace {

constexpr double kTau = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Rows of Q_ij = y_i y_j K(x_i, x_j), least recently used evicted first.
class KernelRows {
 public:
  KernelRows(const Matrix<double>& x, std::span<const int> y, KernelSpec kernel,
             std::size_t cache_bytes)
      : x_(x), y_(y), kernel_(kernel) {
    const std::size_t n = static_cast<std::size_t>(x.rows());
    capacity_ = std::max<std::size_t>(2, cache_bytes / (sizeof(double) * std::max<std::size_t>(n, 1)));
    diag_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto r = static_cast<Eigen::Index>(i);
      diag_[i] = kernel_.apply(x_.row(r).squaredNorm());
    }
  }

  double diag(std::size_t i) const { return diag_[i]; }

  // Valid until two further rows are requested.
  const std::vector<double>& row(std::size_t i) {
    if (auto it = index_.find(i); it != index_.end()) {
      lru_.splice(lru_.begin(), lru_, it->second);
      return it->second->second;
    }
    if (lru_.size() >= capacity_) {
      index_.erase(lru_.back().first);
      lru_.pop_back();
    }
    const auto n = x_.rows();
    std::vector<double> q(static_cast<std::size_t>(n));
    const Vector<double> dots = x_ * x_.row(static_cast<Eigen::Index>(i)).transpose();
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto uj = static_cast<std::size_t>(j);
      q[uj] = double(y_[i] * y_[uj]) * kernel_.apply(dots(j));
    }
    lru_.emplace_front(i, std::move(q));
    index_[i] = lru_.begin();
    return lru_.front().second;
  }

 private:
  const Matrix<double>& x_;
  std::span<const int> y_;
  KernelSpec kernel_;
  std::size_t capacity_;
  std::vector<double> diag_;
  std::list<std::pair<std::size_t, std::vector<double>>> lru_;
  std::unordered_map<std::size_t, decltype(lru_)::iterator> index_;
};

bool in_up(int y, double a, double c) { return (y > 0 && a < c) || (y < 0 && a > 0); }
bool in_low(int y, double a, double c) { return (y > 0 && a > 0) || (y < 0 && a < c); }

// Seeded Fisher-Yates permutation; fixes the scan order and thereby the
// tie-breaks of working-set selection.
std::vector<std::size_t> scan_order(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::mt19937_64 rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(order[i - 1], order[j]);
  }
  return order;
}

}  // namespace

double kkt_violation(const Vector<double>& alpha, const Vector<double>& gradient,
                     std::span<const int> y, double c) {
  double up = -kInf;
  double low = kInf;
  for (std::size_t t = 0; t < y.size(); ++t) {
    const auto r = static_cast<Eigen::Index>(t);
    const double v = -double(y[t]) * gradient(r);
    if (in_up(y[t], alpha(r), c)) up = std::max(up, v);
    if (in_low(y[t], alpha(r), c)) low = std::min(low, v);
  }
  if (up == -kInf || low == kInf) return 0.0;
  return std::max(0.0, up - low);
}

SvmFit<double> train_svm(const Matrix<double>& x, std::span<const int> y, const SvmOptions& opts) {
  const std::size_t n = y.size();
  if (n == 0) throw DataError("empty training set");
  if (static_cast<std::size_t>(x.rows()) != n) throw DataError("label count does not match rows");
  if (!(opts.c > 0)) throw DataError("C must be positive");
  if (!(opts.tolerance > 0)) throw DataError("tolerance must be positive");
  bool pos = false;
  bool neg = false;
  for (int v : y) {
    if (v == 1) {
      pos = true;
    } else if (v == -1) {
      neg = true;
    } else {
      throw DataError("labels must be +1 or -1");
    }
  }
  if (!pos || !neg) throw DataError("training set contains a single class");

  const double c = opts.c;
  const std::size_t max_iter =
      opts.max_iterations ? opts.max_iterations : std::max<std::size_t>(10'000'000, 100 * n);
  KernelRows q(x, y, opts.kernel, opts.cache_bytes);
  const auto order = scan_order(n, opts.seed);

  std::vector<double> alpha(n, 0.0);
  std::vector<double> grad(n, -1.0);

  SvmFit<double> fit;
  std::size_t iter = 0;
  for (; iter < max_iter; ++iter) {
    // i: maximal violating index in I_up.
    double gmax = -kInf;
    std::size_t i = n;
    for (std::size_t t : order) {
      if (in_up(y[t], alpha[t], c)) {
        const double v = -double(y[t]) * grad[t];
        if (v > gmax) {
          gmax = v;
          i = t;
        }
      }
    }
    double gmin = kInf;
    std::size_t j = n;
    double best = kInf;
    if (i != n) {
      const std::vector<double>& qi = q.row(i);
      for (std::size_t t : order) {
        if (!in_low(y[t], alpha[t], c)) continue;
        const double v = -double(y[t]) * grad[t];
        gmin = std::min(gmin, v);
        const double b = gmax - v;
        if (b > 0) {
          double a = q.diag(i) + q.diag(t) - 2.0 * double(y[i] * y[t]) * qi[t];
          if (a <= 0) a = kTau;
          const double obj = -(b * b) / a;
          if (obj < best) {
            best = obj;
            j = t;
          }
        }
      }
    }
    if (i == n || j == n || gmax - gmin < opts.tolerance) {
      fit.converged = true;
      break;
    }

    const std::vector<double> qi = q.row(i);
    const std::vector<double>& qj = q.row(j);
    const double old_ai = alpha[i];
    const double old_aj = alpha[j];
    if (y[i] != y[j]) {
      double quad = q.diag(i) + q.diag(j) + 2.0 * qi[j];
      if (quad <= 0) quad = kTau;
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0) {
        if (alpha[j] < 0) {
          alpha[j] = 0;
          alpha[i] = diff;
        }
      } else if (alpha[i] < 0) {
        alpha[i] = 0;
        alpha[j] = -diff;
      }
      if (diff > 0) {
        if (alpha[i] > c) {
          alpha[i] = c;
          alpha[j] = c - diff;
        }
      } else if (alpha[j] > c) {
        alpha[j] = c;
        alpha[i] = c + diff;
      }
    } else {
      double quad = q.diag(i) + q.diag(j) - 2.0 * qi[j];
      if (quad <= 0) quad = kTau;
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > c) {
        if (alpha[i] > c) {
          alpha[i] = c;
          alpha[j] = sum - c;
        }
      } else if (alpha[j] < 0) {
        alpha[j] = 0;
        alpha[i] = sum;
      }
      if (sum > c) {
        if (alpha[j] > c) {
          alpha[j] = c;
          alpha[i] = sum - c;
        }
      } else if (alpha[i] < 0) {
        alpha[i] = 0;
        alpha[j] = sum;
      }
    }
    const double di = alpha[i] - old_ai;
    const double dj = alpha[j] - old_aj;
    for (std::size_t t = 0; t < n; ++t) grad[t] += qi[t] * di + qj[t] * dj;
  }
  fit.iterations = iter;

  // Bias from free support vectors, else the midpoint of the feasible range.
  double ub = kInf;
  double lb = -kInf;
  double sum_free = 0;
  std::size_t n_free = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double yg = double(y[t]) * grad[t];
    if (alpha[t] >= c) {
      if (y[t] < 0) {
        ub = std::min(ub, yg);
      } else {
        lb = std::max(lb, yg);
      }
    } else if (alpha[t] <= 0) {
      if (y[t] > 0) {
        ub = std::min(ub, yg);
      } else {
        lb = std::max(lb, yg);
      }
    } else {
      ++n_free;
      sum_free += yg;
    }
  }
  const double rho = n_free > 0 ? sum_free / double(n_free) : 0.5 * (ub + lb);

  fit.alpha.resize(static_cast<Eigen::Index>(n));
  fit.gradient.resize(static_cast<Eigen::Index>(n));
  double objective = 0;
  std::vector<std::size_t> support;
  for (std::size_t t = 0; t < n; ++t) {
    const auto r = static_cast<Eigen::Index>(t);
    fit.alpha(r) = alpha[t];
    fit.gradient(r) = grad[t];
    objective += 0.5 * alpha[t] * (grad[t] - 1.0);
    if (alpha[t] > 0) support.push_back(t);
  }
  fit.objective = objective;

  auto& model = fit.model;
  model.kernel = opts.kernel;
  model.c = c;
  model.rho = rho;
  model.support.resize(static_cast<Eigen::Index>(support.size()), x.cols());
  model.coef.resize(static_cast<Eigen::Index>(support.size()));
  for (std::size_t s = 0; s < support.size(); ++s) {
    const auto r = static_cast<Eigen::Index>(s);
    model.support.row(r) = x.row(static_cast<Eigen::Index>(support[s]));
    model.coef(r) = alpha[support[s]] * double(y[support[s]]);
  }
  return fit;
}

}  // namespace genpower::learn
