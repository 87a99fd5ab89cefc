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

#include <bit>
#include <cmath>
#include <random>

#include "genpower/common.hpp"
#include "genpower/featurize.hpp"
#include "genpower/learn.hpp"

using namespace genpower;
using namespace genpower::learn;

namespace {

struct Data {
  Matrix<double> x;
  std::vector<int> y;
};

Data separable(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0, 0.5);
  Data d;
  d.x.resize(static_cast<Eigen::Index>(n), 3);
  for (std::size_t i = 0; i < n; ++i) {
    const int label = i % 2 == 0 ? 1 : -1;
    const auto r = static_cast<Eigen::Index>(i);
    d.x(r, 0) = 3.0 * label + noise(rng);
    d.x(r, 1) = -2.0 * label + noise(rng);
    d.x(r, 2) = noise(rng);
    d.y.push_back(label);
  }
  return d;
}

// Label is the sign of x0 * x1, points kept off the axes.
Data xor_data(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1, 1);
  Data d;
  d.x.resize(static_cast<Eigen::Index>(n), 2);
  for (std::size_t i = 0; i < n; ++i) {
    double a = 0, b = 0;
    do {
      a = u(rng);
      b = u(rng);
    } while (std::abs(a) < 0.1 || std::abs(b) < 0.1);
    const auto r = static_cast<Eigen::Index>(i);
    d.x(r, 0) = a;
    d.x(r, 1) = b;
    d.y.push_back(a * b > 0 ? 1 : -1);
  }
  return d;
}

// Every point with its three sign reflections: a linear rule gains nothing
// from sampling imbalance between quadrants.
Data symmetric_xor(std::size_t n, std::uint64_t seed) {
  const Data base = xor_data(n, seed);
  Data d;
  d.x.resize(4 * base.x.rows(), 2);
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < base.x.rows(); ++i) {
    for (double sa : {1.0, -1.0}) {
      for (double sb : {1.0, -1.0}) {
        d.x(r, 0) = sa * base.x(i, 0);
        d.x(r, 1) = sb * base.x(i, 1);
        d.y.push_back(sa * sb * base.x(i, 0) * base.x(i, 1) > 0 ? 1 : -1);
        ++r;
      }
    }
  }
  return d;
}

double accuracy(const SvmModel<double>& m, const Data& d) {
  std::size_t ok = 0;
  for (Eigen::Index i = 0; i < d.x.rows(); ++i) {
    ok += sign_label(m.decision_value(d.x.row(i).transpose())) == d.y[std::size_t(i)] ? 1 : 0;
  }
  return double(ok) / double(d.x.rows());
}

SvmOptions quadratic(double c) {
  SvmOptions o;
  o.c = c;
  o.kernel = KernelSpec{2, 1.0};
  return o;
}

SvmOptions linear(double c) {
  SvmOptions o;
  o.c = c;
  o.kernel = KernelSpec{1, 0.0};
  return o;
}

}  // namespace

TEST_CASE("separable data") {
  const Data train = separable(200, 1);
  const Data test = separable(400, 2);
  for (const auto& opts : {linear(1.0), quadratic(1.0)}) {
    const auto fit = train_svm(train.x, train.y, opts);
    CHECK(fit.converged);
    CHECK(accuracy(fit.model, test) >= 0.99);
  }
}

TEST_CASE("XOR needs the quadratic kernel") {
  const Data train = symmetric_xor(75, 3);
  const Data test = xor_data(600, 4);
  const auto quad = train_svm(train.x, train.y, quadratic(10.0));
  const auto lin = train_svm(train.x, train.y, linear(10.0));
  CHECK(accuracy(quad.model, test) >= 0.95);
  CHECK(accuracy(lin.model, test) <= 0.60);
}

TEST_CASE("KKT and dual feasibility at 1e-6") {
  const Data d = xor_data(150, 5);
  for (double c : {0.1, 1.0, 10.0}) {
    SvmOptions opts = quadratic(c);
    opts.tolerance = 1e-6;
    const auto fit = train_svm(d.x, d.y, opts);
    REQUIRE(fit.converged);
    const auto n = d.x.rows();

    // Recompute the gradient Q alpha - e from scratch.
    Vector<double> grad(n);
    double sum_ay = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      double g = -1;
      for (Eigen::Index j = 0; j < n; ++j) {
        const double k = std::pow(d.x.row(i).dot(d.x.row(j)) + 1.0, 2);
        g += d.y[std::size_t(i)] * d.y[std::size_t(j)] * k * fit.alpha(j);
      }
      grad(i) = g;
      sum_ay += fit.alpha(i) * d.y[std::size_t(i)];
      CHECK(fit.alpha(i) >= 0);
      CHECK(fit.alpha(i) <= c);
    }
    CHECK(std::abs(sum_ay) <= 1e-6 * c);
    CHECK((grad - fit.gradient).cwiseAbs().maxCoeff() <= 1e-8);

    // Maximal violating pair gap.
    double m_up = -INFINITY, m_low = INFINITY;
    for (Eigen::Index i = 0; i < n; ++i) {
      const int y = d.y[std::size_t(i)];
      const double a = fit.alpha(i);
      const double v = -y * grad(i);
      const bool up = (y == 1 && a < c) || (y == -1 && a > 0);
      const bool low = (y == 1 && a > 0) || (y == -1 && a < c);
      if (up) m_up = std::max(m_up, v);
      if (low) m_low = std::min(m_low, v);
    }
    CHECK(m_up - m_low <= 1e-6);
    CHECK(kkt_violation(fit.alpha, fit.gradient, d.y, c) <= 1e-6);

    // Complementary slackness of the primal margin, with rho from the model.
    for (Eigen::Index i = 0; i < n; ++i) {
      const double margin =
          d.y[std::size_t(i)] * fit.model.decision_value(d.x.row(i).transpose());
      if (fit.alpha(i) <= 0) CHECK(margin >= 1 - 1e-5);
      if (fit.alpha(i) >= c) CHECK(margin <= 1 + 1e-5);
      if (fit.alpha(i) > 1e-9 && fit.alpha(i) < c - 1e-9) CHECK(std::abs(margin - 1) <= 1e-5);
    }
  }
}

TEST_CASE("training is deterministic for a seed") {
  const Data d = xor_data(120, 6);
  const auto a = train_svm(d.x, d.y, quadratic(1.0));
  const auto b = train_svm(d.x, d.y, quadratic(1.0));
  REQUIRE(a.alpha.size() == b.alpha.size());
  for (Eigen::Index i = 0; i < a.alpha.size(); ++i) {
    CHECK(std::bit_cast<std::uint64_t>(a.alpha(i)) == std::bit_cast<std::uint64_t>(b.alpha(i)));
  }
  CHECK(std::bit_cast<std::uint64_t>(a.model.rho) == std::bit_cast<std::uint64_t>(b.model.rho));
}

TEST_CASE("bad training input") {
  Matrix<double> x(2, 1);
  x << 1, 2;
  std::vector<int> same = {1, 1};
  std::vector<int> bad = {1, 0};
  CHECK_THROWS_AS(train_svm(x, same, quadratic(1)), DataError);
  CHECK_THROWS_AS(train_svm(x, bad, quadratic(1)), DataError);
  const auto fit = train_svm(x, std::vector<int>{1, -1}, quadratic(1));
  Vector<double> wrong(2);
  CHECK_THROWS_AS(fit.model.decision_value(wrong), DataError);
}

// --- instances, feature spaces and the serialized model --------------------------

namespace {

std::vector<Instance> synthetic_instances(std::size_t n, std::uint64_t seed, Split split) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0, 1);
  std::vector<Instance> xs;
  for (std::size_t i = 0; i < n; ++i) {
    Instance x;
    x.id = i;
    x.thread_id = "t" + std::to_string(i);
    x.p1 = "a";
    x.p2 = "b";
    x.split = split;
    x.label = i % 2 == 0 ? PowerLabel::kSuperior : PowerLabel::kSubordinate;
    const double s = x.label == PowerLabel::kSuperior ? 1 : -1;
    for (auto& variant : x.structural) {
      for (auto& v : variant) v = noise(rng);
    }
    x.structural[0][3] += 2 * s;  // p1_im msg_count
    x.structural[1][3] -= 2 * s;  // p2_im msg_count
    x.gender_p1 = i % 3 == 0 ? Gender::kFemale : Gender::kMale;
    x.gender_p2 = i % 4 == 0 ? Gender::kFemale : Gender::kMale;
    x.env_p1 = GenderEnv::kMixed;
    x.env_p2 = GenderEnv::kMale;
    xs.push_back(x);
  }
  return xs;
}

}  // namespace

TEST_CASE("retraining gives identical model bytes") {
  const auto train = synthetic_instances(60, 7, Split::kTrain);
  const Vocabulary vocab;
  const auto spec = parse_feature_spec("PST+VRB+THR+GEN+GNE");
  TrainOptions opts;
  const std::string a = serialize_model(train_model(train, vocab, spec, 1.0, opts));
  const std::string b = serialize_model(train_model(train, vocab, spec, 1.0, opts));
  CHECK(a == b);
}

TEST_CASE("serialized model reloads bit-exactly") {
  const auto train = synthetic_instances(40, 8, Split::kTrain);
  const auto test = synthetic_instances(20, 9, Split::kTest);
  const auto spec = parse_feature_spec("VRB+GEN");
  const Model m = train_model(train, Vocabulary{}, spec, 0.5, TrainOptions{});
  const std::string text = serialize_model(m);
  const Model back = parse_model(text);
  CHECK(serialize_model(back) == text);
  for (const auto& x : test) {
    CHECK(std::bit_cast<std::uint64_t>(decision_value(m, x)) ==
          std::bit_cast<std::uint64_t>(decision_value(back, x)));
  }
  CHECK_THROWS_AS(parse_model("{\"format\":\"other\"}"), DataError);
  CHECK_THROWS_AS(parse_model("not json"), DataError);
}

TEST_CASE("standardization is fitted on TRAIN only") {
  const auto train = synthetic_instances(30, 10, Split::kTrain);
  auto test = synthetic_instances(30, 11, Split::kTest);
  for (auto& x : test) x.structural[2][4] += 1000;  // p1_mt msg_ratio shifted
  const auto spec = parse_feature_spec("VRB");
  const FeatureSpace a = FeatureSpace::fit(spec, SpaceOptions{}, Vocabulary{}, train);
  std::vector<Instance> both = train;
  for (const auto& x : train) both.push_back(reversed(x));
  const FeatureSpace b = FeatureSpace::fit(spec, SpaceOptions{}, Vocabulary{}, both);
  // Oracle: the mean of p1_mt msg_ratio over TRAIN and its reversal.
  double sum = 0;
  for (const auto& x : both) sum += x.structural[2][4];
  const auto& names = b.dense_names();
  const auto col = std::find(names.begin(), names.end(), "p1_mt_msg_ratio") - names.begin();
  REQUIRE(std::size_t(col) < names.size());
  CHECK(b.means()[std::size_t(col)] == doctest::Approx(sum / double(both.size())));
  CHECK(a.dimension() == 4 * 5);
}

TEST_CASE("ngram vocabulary ignores DEV and TEST terms") {
  auto make = [](std::vector<std::string> terms) {
    PairFeatures f;
    for (const auto& t : terms) f.variants[2].ngrams[t] = 1;
    return f;
  };
  const PairFeatures tr1 = make({"L1:send", "L1:report"});
  const PairFeatures tr2 = make({"L1:send", "L1:friday"});
  const PairFeatures te = make({"L1:send", "L1:leak", "L1:leak2"});
  const Vocabulary v = build_vocabulary({&tr1, &tr2}, 1, 100);
  CHECK(v.terms() == std::vector<std::string>{"L1:friday", "L1:report", "L1:send"});
  CHECK_FALSE(v.find(Variant::kP1Mt, "L1:leak"));
  const Vocabulary v2 = build_vocabulary({&tr1, &tr2}, 2, 100);
  CHECK(v2.terms() == std::vector<std::string>{"L1:send"});
  CHECK(Vocabulary::swap_roles(*v.find(Variant::kP1Im, "L1:send")) ==
        *v.find(Variant::kP2Im, "L1:send"));
}

TEST_CASE("feature spec names") {
  CHECK(parse_feature_spec("gen+thr+lex").name() == "LEX+THR+GEN");
  CHECK(parse_feature_specs("LEX+THR,GEN").size() == 2);
  CHECK_THROWS_AS(parse_feature_spec("LEX+FOO"), DataError);
  CHECK_THROWS_AS(parse_feature_spec(""), DataError);
}

TEST_CASE("ablation with two specs gives two rows and one comparison") {
  const auto train = synthetic_instances(40, 12, Split::kTrain);
  const auto dev = synthetic_instances(20, 13, Split::kDev);
  const auto test = synthetic_instances(20, 14, Split::kTest);
  TrainOptions opts;
  opts.c_grid = {0.1, 1.0};
  const auto r = ablate(train, dev, test, Vocabulary{},
                        parse_feature_specs("VRB,VRB+GEN"), opts);
  CHECK(r.rows.size() == 2);
  CHECK(r.comparisons.size() == 1);
  CHECK(r.evaluated_on == "TEST");
  const std::string csv = ablation_to_csv(r);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
}
