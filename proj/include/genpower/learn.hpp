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

// Soft-margin kernel SVM trained by sequential minimal optimization with
// second-order working-set selection.

#ifndef GENPOWER_LEARN_HPP_
#define GENPOWER_LEARN_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "genpower/common.hpp"

namespace genpower::learn {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// K(x, z) = (x . z + offset)^degree.
struct KernelSpec {
  int degree = 2;
  double offset = 1.0;

  template <typename Scalar>
  Scalar apply(Scalar dot) const {
    const Scalar base = dot + Scalar(offset);
    Scalar out = 1;
    for (int i = 0; i < degree; ++i) out *= base;
    return out;
  }

  template <typename A, typename B>
  typename A::Scalar operator()(const Eigen::MatrixBase<A>& x,
                                const Eigen::MatrixBase<B>& z) const {
    return apply(x.dot(z));
  }
};

struct SvmOptions {
  double c = 1.0;
  double tolerance = 1e-3;  // KKT gap at which optimization stops
  KernelSpec kernel;
  std::uint64_t seed = 42;
  std::size_t max_iterations = 0;           // 0: max(10^7, 100 n)
  std::size_t cache_bytes = 256u << 20;     // kernel row cache
};

template <typename Scalar>
struct SvmModel {
  KernelSpec kernel;
  Scalar c = 1;
  Scalar rho = 0;
  Matrix<Scalar> support;  // one support vector per row
  Vector<Scalar> coef;     // alpha_i * y_i

  Eigen::Index dimension() const { return support.cols(); }

  template <typename Derived>
  Scalar decision_value(const Eigen::MatrixBase<Derived>& x) const {
    if (x.size() != support.cols()) {
      throw DataError("feature dimension " + std::to_string(x.size()) +
                      " does not match model dimension " + std::to_string(support.cols()));
    }
    Scalar sum = 0;
    for (Eigen::Index i = 0; i < support.rows(); ++i) {
      sum += coef(i) * kernel(support.row(i).transpose(), x);
    }
    return sum - rho;
  }
};

// +1 for a non-negative decision value.
inline int sign_label(double decision) { return decision >= 0 ? 1 : -1; }

template <typename Scalar>
struct SvmFit {
  SvmModel<Scalar> model;
  Vector<Scalar> alpha;     // dual variables of every training point
  Vector<Scalar> gradient;  // Q alpha - e at exit
  std::size_t iterations = 0;
  bool converged = false;
  Scalar objective = 0;     // 1/2 a'Qa - e'a
};

// `y` holds +1 / -1 labels, one per row of `x`. Throws DataError on a
// single-class or empty training set.
SvmFit<double> train_svm(const Matrix<double>& x, std::span<const int> y, const SvmOptions& opts);

// Largest KKT violation of `alpha` for the problem, used by the property
// tests and as a convergence report.
double kkt_violation(const Vector<double>& alpha, const Vector<double>& gradient,
                     std::span<const int> y, double c);

}  // namespace genpower::learn

#endif  // GENPOWER_LEARN_HPP_
