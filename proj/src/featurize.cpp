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

#include "genpower/featurize.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>

#include <fmt/format.h>
#include <json.hpp>

#include "genpower/stats.hpp"

namespace genpower {

namespace {

using json = nlohmann::ordered_json;

constexpr std::array<FeatureFamily, 5> kStructuralFamilies = {
    FeatureFamily::kPositional, FeatureFamily::kVerbosity, FeatureFamily::kThreadStructure,
    FeatureFamily::kDialogAct, FeatureFamily::kOdp};
// Naming order: LEX first, as feature sets are usually written.
constexpr std::array<FeatureFamily, 8> kNameOrder = {
    FeatureFamily::kLexical,   FeatureFamily::kPositional, FeatureFamily::kVerbosity,
    FeatureFamily::kThreadStructure, FeatureFamily::kDialogAct, FeatureFamily::kOdp,
    FeatureFamily::kGender,    FeatureFamily::kGenderEnv};
constexpr std::array<GenderEnv, 3> kEnvs = {GenderEnv::kFemale, GenderEnv::kMixed,
                                           GenderEnv::kMale};

int label_sign(PowerLabel l) { return l == PowerLabel::kSuperior ? 1 : -1; }

std::size_t ngram_block(std::uint32_t id, const Vocabulary& vocab) {
  const char family = vocab.term_of(id).front();
  const std::size_t f = family == 'L' ? 0 : family == 'P' ? 1 : 2;
  return static_cast<std::size_t>(Vocabulary::variant_of(id)) * 3 + f;
}

std::string hexfloat(double v) { return fmt::format("{:a}", v); }

double parse_hexfloat(const json& j) {
  if (!j.is_string()) throw DataError("model file: expected a hexadecimal float string");
  const std::string s = j.get<std::string>();
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || s.empty()) {
    throw DataError(fmt::format("model file: bad float '{}'", s));
  }
  return v;
}

json hex_array(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(hexfloat(x));
  return a;
}

std::vector<double> parse_hex_array(const json& j) {
  if (!j.is_array()) throw DataError("model file: expected an array");
  std::vector<double> out;
  for (const auto& x : j) out.push_back(parse_hexfloat(x));
  return out;
}

const json& field(const json& j, const char* name) {
  if (!j.contains(name)) throw DataError(fmt::format("model file: missing field '{}'", name));
  return j.at(name);
}

double accuracy_of(const AblationRow& r) { return r.test_accuracy.value_or(r.dev_accuracy); }

}  // namespace

// --- vocabulary ---------------------------------------------------------------

Vocabulary::Vocabulary(std::vector<std::string> terms) : terms_(std::move(terms)) {
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (terms_[i].empty()) throw DataError("empty vocabulary term");
    if (i > 0 && !(terms_[i - 1] < terms_[i])) {
      throw DataError(fmt::format("vocabulary not sorted or duplicated at '{}'", terms_[i]));
    }
  }
}

std::optional<std::uint32_t> Vocabulary::find(Variant v, std::string_view term) const {
  const auto it = std::lower_bound(terms_.begin(), terms_.end(), term,
                                   [](const std::string& a, std::string_view b) { return a < b; });
  if (it == terms_.end() || *it != term) return std::nullopt;
  return static_cast<std::uint32_t>(4 * (it - terms_.begin()) + static_cast<int>(v));
}

std::string Vocabulary::feature(std::uint32_t id) const {
  return fmt::format("{}|{}", variant_prefix(variant_of(id)), term_of(id));
}

Vocabulary build_vocabulary(const std::vector<const PairFeatures*>& train, std::size_t min_df,
                            std::size_t max_terms) {
  std::map<std::string, std::size_t> df;
  for (const auto* f : train) {
    std::set<std::string_view> seen;
    for (const auto& v : f->variants) {
      for (const auto& [term, count] : v.ngrams) {
        if (count > 0) seen.insert(term);
      }
    }
    for (auto t : seen) ++df[std::string(t)];
  }
  std::vector<std::pair<std::size_t, std::string>> ranked;
  for (auto& [t, n] : df) {
    if (n >= std::max<std::size_t>(min_df, 1)) ranked.emplace_back(n, t);
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  if (ranked.size() > max_terms) ranked.resize(max_terms);
  std::vector<std::string> terms;
  for (auto& r : ranked) terms.push_back(std::move(r.second));
  std::sort(terms.begin(), terms.end());
  return Vocabulary(std::move(terms));
}

// --- instances ----------------------------------------------------------------

Instance make_instance(std::size_t id, const PairInstance& pair, const PairFeatures& f,
                       Split split, const Vocabulary& vocab) {
  if (!pair.ctx.hp) {
    throw DataError(fmt::format("pair ({}, {}) in thread '{}' has no power label", pair.key.p1,
                                pair.key.p2, pair.key.thread_id));
  }
  Instance x;
  x.id = id;
  x.thread_id = pair.key.thread_id;
  x.p1 = pair.key.p1;
  x.p2 = pair.key.p2;
  x.split = split;
  x.label = *pair.ctx.hp;
  for (Variant v : kVariants) x.structural[static_cast<std::size_t>(v)] = f[v].values;
  x.gender_p1 = f.gender_p1;
  x.gender_p2 = f.gender_p2;
  x.env_p1 = f.env_p1;
  x.env_p2 = f.env_p2;
  for (Variant v : kVariants) {
    for (const auto& [term, count] : f[v].ngrams) {
      if (auto fid = vocab.find(v, term)) x.ngrams.emplace_back(*fid, count);
    }
  }
  std::sort(x.ngrams.begin(), x.ngrams.end());
  return x;
}

Instance reversed(const Instance& x) {
  Instance r = x;
  std::swap(r.p1, r.p2);
  r.label = flip(x.label);
  std::swap(r.structural[0], r.structural[1]);
  std::swap(r.structural[2], r.structural[3]);
  std::swap(r.gender_p1, r.gender_p2);
  std::swap(r.env_p1, r.env_p2);
  for (auto& [id, count] : r.ngrams) id = Vocabulary::swap_roles(id);
  std::sort(r.ngrams.begin(), r.ngrams.end());
  r.is_reversed = !x.is_reversed;
  return r;
}

// --- feature specs --------------------------------------------------------------

std::string FeatureSpec::name() const {
  std::string out;
  for (FeatureFamily f : kNameOrder) {
    if (families.count(f) == 0) continue;
    if (!out.empty()) out += '+';
    out += to_string(f);
  }
  return out;
}

FeatureSpec parse_feature_spec(std::string_view s) {
  FeatureSpec spec;
  for (auto part : split(s, '+')) {
    std::string token(trim(part));
    std::transform(token.begin(), token.end(), token.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    auto f = parse_feature_family(token);
    if (!f) throw DataError(fmt::format("unknown feature family '{}' in '{}'", token, s));
    spec.families.insert(*f);
  }
  if (spec.families.empty()) throw DataError("empty feature set");
  return spec;
}

std::vector<FeatureSpec> parse_feature_specs(std::string_view s) {
  std::vector<FeatureSpec> out;
  for (auto part : split(s, ',')) {
    if (trim(part).empty()) continue;
    out.push_back(parse_feature_spec(part));
  }
  if (out.empty()) throw DataError("no feature sets given");
  return out;
}

// --- feature space --------------------------------------------------------------

FeatureSpace::FeatureSpace(FeatureSpec spec, SpaceOptions opts, const Vocabulary& vocab)
    : spec_(std::move(spec)), opts_(opts), vocab_size_(vocab.size()) {
  lexical_ = spec_.families.count(FeatureFamily::kLexical) > 0;
  if (lexical_) {
    blocks_.resize(vocab_size_);
    for (std::uint32_t id = 0; id < vocab_size_; ++id) {
      blocks_[id] = static_cast<std::uint8_t>(ngram_block(id, vocab));
    }
  }
  for (FeatureFamily fam : kStructuralFamilies) {
    if (spec_.families.count(fam) == 0) continue;
    for (Variant v : kVariants) {
      for (Feature f : all_features()) {
        if (feature_family(f) == fam) {
          dense_names_.push_back(fmt::format("{}_{}", variant_prefix(v), feature_column(f)));
        }
      }
    }
  }
  if (spec_.families.count(FeatureFamily::kGender)) {
    for (auto n : {"gen_p1_m", "gen_p1_f", "gen_p2_m", "gen_p2_f"}) dense_names_.emplace_back(n);
  }
  if (spec_.families.count(FeatureFamily::kGenderEnv)) {
    for (auto n : {"env_p1_female", "env_p1_mixed", "env_p1_male"}) dense_names_.emplace_back(n);
    if (opts_.env_both) {
      for (auto n : {"env_p2_female", "env_p2_mixed", "env_p2_male"}) {
        dense_names_.emplace_back(n);
      }
    }
  }
  means_.assign(dense_names_.size(), 0.0);
  scales_.assign(dense_names_.size(), 1.0);
}

std::vector<double> FeatureSpace::raw_dense(const Instance& x) const {
  std::vector<double> out;
  out.reserve(dense_names_.size());
  for (FeatureFamily fam : kStructuralFamilies) {
    if (spec_.families.count(fam) == 0) continue;
    for (Variant v : kVariants) {
      for (Feature f : all_features()) {
        if (feature_family(f) == fam) out.push_back(x[v][static_cast<std::size_t>(f)]);
      }
    }
  }
  auto one_hot = [&](Gender g, Gender want) { return g == want ? 1.0 : 0.0; };
  if (spec_.families.count(FeatureFamily::kGender)) {
    out.push_back(one_hot(x.gender_p1, Gender::kMale));
    out.push_back(one_hot(x.gender_p1, Gender::kFemale));
    out.push_back(one_hot(x.gender_p2, Gender::kMale));
    out.push_back(one_hot(x.gender_p2, Gender::kFemale));
  }
  if (spec_.families.count(FeatureFamily::kGenderEnv)) {
    for (GenderEnv e : kEnvs) out.push_back(x.env_p1 == e ? 1.0 : 0.0);
    if (opts_.env_both) {
      for (GenderEnv e : kEnvs) out.push_back(x.env_p2 == e ? 1.0 : 0.0);
    }
  }
  return out;
}

FeatureSpace FeatureSpace::fit(const FeatureSpec& spec, const SpaceOptions& opts,
                               const Vocabulary& vocab, const std::vector<Instance>& train) {
  FeatureSpace space(spec, opts, vocab);
  const std::size_t d = space.dense_names_.size();
  if (train.empty() || d == 0) return space;
  learn::Matrix<double> raw(static_cast<Eigen::Index>(train.size()), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < train.size(); ++i) {
    const auto row = space.raw_dense(train[i]);
    for (std::size_t j = 0; j < d; ++j) {
      raw(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row[j];
    }
  }
  for (std::size_t j = 0; j < d; ++j) {
    const auto col = raw.col(static_cast<Eigen::Index>(j));
    const double mean = col.mean();
    const double var = (col.array() - mean).square().mean();
    space.means_[j] = mean;
    space.scales_[j] = var > 0 ? std::sqrt(var) : 0.0;
  }
  return space;
}

void FeatureSpace::set_standardization(std::vector<double> means, std::vector<double> scales) {
  if (means.size() != dense_names_.size() || scales.size() != dense_names_.size()) {
    throw DataError("standardization size does not match the feature layout");
  }
  means_ = std::move(means);
  scales_ = std::move(scales);
}

learn::Vector<double> FeatureSpace::transform(const Instance& x) const {
  learn::Vector<double> out = learn::Vector<double>::Zero(static_cast<Eigen::Index>(dimension()));
  const auto raw = raw_dense(x);
  for (std::size_t j = 0; j < raw.size(); ++j) {
    const auto r = static_cast<Eigen::Index>(j);
    out(r) = scales_[j] > 0 ? (raw[j] - means_[j]) / scales_[j] : 0.0;
  }
  if (!lexical_) return out;
  // Each (variant, ngram family) block is scaled to unit L2 norm.
  std::array<double, 12> norm2{};
  for (const auto& [id, count] : x.ngrams) {
    if (id >= vocab_size_) throw DataError("ngram id outside the model vocabulary");
    norm2[blocks_[id]] += count * count;
  }
  const auto offset = static_cast<Eigen::Index>(dense_names_.size());
  for (const auto& [id, count] : x.ngrams) {
    out(offset + static_cast<Eigen::Index>(id)) = count / std::sqrt(norm2[blocks_[id]]);
  }
  return out;
}

learn::Matrix<double> FeatureSpace::transform(const std::vector<Instance>& xs) const {
  learn::Matrix<double> m(static_cast<Eigen::Index>(xs.size()),
                          static_cast<Eigen::Index>(dimension()));
  for (std::size_t i = 0; i < xs.size(); ++i) {
    m.row(static_cast<Eigen::Index>(i)) = transform(xs[i]).transpose();
  }
  return m;
}

// --- model ----------------------------------------------------------------------

Model train_model(const std::vector<Instance>& train, const Vocabulary& vocab,
                  const FeatureSpec& spec, double c, const TrainOptions& opts) {
  if (train.empty()) throw DataError("TRAIN split has no instances");
  std::vector<Instance> both;
  both.reserve(2 * train.size());
  for (const auto& x : train) {
    both.push_back(x);
    both.push_back(reversed(x));
  }
  Model m;
  m.vocabulary = vocab;
  m.seed = opts.seed;
  m.space = FeatureSpace::fit(spec, opts.space, vocab, both);
  const learn::Matrix<double> x = m.space.transform(both);
  std::vector<int> y;
  y.reserve(both.size());
  for (const auto& inst : both) y.push_back(label_sign(inst.label));
  learn::SvmOptions svm;
  svm.c = c;
  svm.tolerance = opts.tolerance;
  svm.kernel.degree = opts.degree;
  svm.seed = opts.seed;
  auto fit = learn::train_svm(x, y, svm);
  m.svm = std::move(fit.model);
  m.converged = fit.converged;
  return m;
}

std::string serialize_model(const Model& m) {
  json j;
  j["format"] = kModelFormat;
  j["version"] = kModelVersion;
  j["feature_set"] = m.space.spec().name();
  j["env_both"] = m.space.options().env_both;
  j["seed"] = m.seed;
  j["converged"] = m.converged;
  j["kernel"] = {{"type", "polynomial"},
                 {"degree", m.svm.kernel.degree},
                 {"offset", hexfloat(m.svm.kernel.offset)}};
  j["c"] = hexfloat(m.svm.c);
  j["rho"] = hexfloat(m.svm.rho);
  j["dimension"] = m.space.dimension();
  j["dense_columns"] = m.space.dense_names();
  j["means"] = hex_array(m.space.means());
  j["scales"] = hex_array(m.space.scales());
  j["vocabulary"] = m.vocabulary.terms();
  json sv = json::array();
  for (Eigen::Index i = 0; i < m.svm.support.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.svm.support.cols(); ++k) {
      const double v = m.svm.support(i, k);
      if (v != 0) row.push_back({k, hexfloat(v)});
    }
    sv.push_back({{"coef", hexfloat(m.svm.coef(i))}, {"x", std::move(row)}});
  }
  j["support_vectors"] = std::move(sv);
  return j.dump(1) + "\n";
}

Model parse_model(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(fmt::format("model file is not valid JSON: {}", e.what()));
  }
  try {
    if (field(j, "format").get<std::string>() != kModelFormat) {
      throw DataError("not a genpower model file");
    }
    const int version = field(j, "version").get<int>();
    if (version != kModelVersion) {
      throw DataError(fmt::format("unsupported model version {}", version));
    }
    Model m;
    m.seed = field(j, "seed").get<std::uint64_t>();
    m.converged = field(j, "converged").get<bool>();
    m.vocabulary = Vocabulary(field(j, "vocabulary").get<std::vector<std::string>>());
    SpaceOptions so;
    so.env_both = field(j, "env_both").get<bool>();
    m.space = FeatureSpace(parse_feature_spec(field(j, "feature_set").get<std::string>()), so,
                           m.vocabulary);
    if (field(j, "dense_columns").get<std::vector<std::string>>() != m.space.dense_names()) {
      throw DataError("model file: dense column layout does not match its feature set");
    }
    m.space.set_standardization(parse_hex_array(field(j, "means")),
                                parse_hex_array(field(j, "scales")));
    const std::size_t dim = field(j, "dimension").get<std::size_t>();
    if (dim != m.space.dimension()) throw DataError("model file: dimension mismatch");
    const auto& kernel = field(j, "kernel");
    m.svm.kernel.degree = field(kernel, "degree").get<int>();
    m.svm.kernel.offset = parse_hexfloat(field(kernel, "offset"));
    m.svm.c = parse_hexfloat(field(j, "c"));
    m.svm.rho = parse_hexfloat(field(j, "rho"));
    const auto& sv = field(j, "support_vectors");
    const auto n = static_cast<Eigen::Index>(sv.size());
    m.svm.support = learn::Matrix<double>::Zero(n, static_cast<Eigen::Index>(dim));
    m.svm.coef.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& entry = sv.at(static_cast<std::size_t>(i));
      m.svm.coef(i) = parse_hexfloat(field(entry, "coef"));
      for (const auto& kv : field(entry, "x")) {
        const auto k = kv.at(0).get<Eigen::Index>();
        if (k < 0 || k >= static_cast<Eigen::Index>(dim)) {
          throw DataError("model file: support vector index out of range");
        }
        m.svm.support(i, k) = parse_hexfloat(kv.at(1));
      }
    }
    return m;
  } catch (const json::exception& e) {
    throw DataError(fmt::format("malformed model file: {}", e.what()));
  }
}

double decision_value(const Model& m, const Instance& x) {
  return m.svm.decision_value(m.space.transform(x));
}

PowerLabel predict(const Model& m, const Instance& x) {
  return learn::sign_label(decision_value(m, x)) > 0 ? PowerLabel::kSuperior
                                                     : PowerLabel::kSubordinate;
}

Evaluation evaluate(const Model& m, const std::vector<Instance>& xs) {
  if (xs.empty()) throw DataError("cannot evaluate on an empty instance set");
  Evaluation e;
  for (const auto& x : xs) {
    Prediction p;
    p.instance_id = x.id;
    p.gold = x.label;
    p.decision = decision_value(m, x);
    p.pred = learn::sign_label(p.decision) > 0 ? PowerLabel::kSuperior : PowerLabel::kSubordinate;
    if (p.pred == p.gold) ++e.correct;
    e.predictions.push_back(p);
  }
  e.accuracy = double(e.correct) / double(xs.size());
  return e;
}

std::string predictions_to_csv(const std::vector<Prediction>& p) {
  std::string out = "instance_id,gold,pred,decision_value\n";
  for (const auto& x : p) {
    out += fmt::format("{},{},{},{}\n", x.instance_id, to_string(x.gold), to_string(x.pred),
                       format_double(x.decision));
  }
  return out;
}

MajorityBaseline majority_baseline(const std::vector<Instance>& train,
                                   const std::vector<Instance>& xs) {
  if (xs.empty()) throw DataError("cannot evaluate on an empty instance set");
  std::size_t sup = 0;
  for (const auto& x : train) sup += x.label == PowerLabel::kSuperior ? 1 : 0;
  MajorityBaseline b;
  b.label = 2 * sup >= train.size() ? PowerLabel::kSuperior : PowerLabel::kSubordinate;
  std::size_t correct = 0;
  for (const auto& x : xs) correct += x.label == b.label ? 1 : 0;
  b.accuracy = double(correct) / double(xs.size());
  return b;
}

ModelSelection select_model(const std::vector<Instance>& train, const std::vector<Instance>& dev,
                            const Vocabulary& vocab, const FeatureSpec& spec,
                            const TrainOptions& opts) {
  if (dev.empty()) throw DataError("DEV split has no instances; adjust --split");
  if (opts.c_grid.empty()) throw DataError("empty C grid");
  std::vector<double> grid = opts.c_grid;
  std::sort(grid.begin(), grid.end());
  ModelSelection best;
  bool have = false;
  for (double c : grid) {
    Model m = train_model(train, vocab, spec, c, opts);
    const double acc = evaluate(m, dev).accuracy;
    best.grid.emplace_back(c, acc);
    if (!have || acc > best.dev_accuracy) {
      best.model = std::move(m);
      best.c = c;
      best.dev_accuracy = acc;
      have = true;
    }
  }
  return best;
}

AblationReport ablate(const std::vector<Instance>& train, const std::vector<Instance>& dev,
                      const std::vector<Instance>& test, const Vocabulary& vocab,
                      const std::vector<FeatureSpec>& specs, const TrainOptions& opts) {
  if (specs.empty()) throw DataError("no feature sets to ablate");
  AblationReport r;
  const bool on_test = !test.empty();
  const auto& eval_set = on_test ? test : dev;
  r.evaluated_on = on_test ? "TEST" : "DEV";
  r.majority = majority_baseline(train, eval_set);
  for (const auto& spec : specs) {
    auto sel = select_model(train, dev, vocab, spec, opts);
    AblationRow row;
    row.spec = spec;
    row.c = sel.c;
    row.dev_accuracy = sel.dev_accuracy;
    row.dimension = sel.model.space.dimension();
    auto e = evaluate(sel.model, eval_set);
    if (on_test) row.test_accuracy = e.accuracy;
    row.predictions = std::move(e.predictions);
    r.rows.push_back(std::move(row));
  }
  std::stable_sort(r.rows.begin(), r.rows.end(), [](const AblationRow& a, const AblationRow& b) {
    return a.dev_accuracy > b.dev_accuracy;
  });

  auto find_row = [&](const std::string& name) -> const AblationRow* {
    for (const auto& row : r.rows) {
      if (row.spec.name() == name) return &row;
    }
    return nullptr;
  };
  auto compare = [](const AblationRow& a, const AblationRow& b) {
    std::vector<int> gold;
    std::vector<int> pa;
    std::vector<int> pb;
    for (std::size_t i = 0; i < a.predictions.size(); ++i) {
      gold.push_back(static_cast<int>(a.predictions[i].gold));
      pa.push_back(static_cast<int>(a.predictions[i].pred));
      pb.push_back(static_cast<int>(b.predictions[i].pred));
    }
    const auto mc = stats::mcnemar(pa, pb, gold);
    return AblationComparison{a.spec.name(), b.spec.name(), mc.b, mc.c, mc.exact, mc.p};
  };
  std::set<std::pair<std::string, std::string>> done;
  auto add_comparison = [&](const AblationRow& a, const AblationRow& b) {
    std::string n1 = a.spec.name();
    std::string n2 = b.spec.name();
    if (n2 < n1) std::swap(n1, n2);
    if (!done.insert({std::move(n1), std::move(n2)}).second) return;
    r.comparisons.push_back(compare(a, b));
  };

  const AblationRow& best = r.rows.front();
  for (std::size_t i = 1; i < r.rows.size(); ++i) {
    auto cmp = compare(best, r.rows[i]);
    r.rows[i].mcnemar_p_vs_best = cmp.p;
    add_comparison(best, r.rows[i]);
  }
  for (auto& row : r.rows) {
    FeatureSpec base = row.spec;
    base.families.erase(FeatureFamily::kGender);
    base.families.erase(FeatureFamily::kGenderEnv);
    if (base.families.empty() || base == row.spec) continue;
    const AblationRow* b = find_row(base.name());
    if (b == nullptr) continue;
    row.base_spec = base.name();
    row.delta = accuracy_of(row) - accuracy_of(*b);
    if (accuracy_of(*b) < 1) row.error_reduction = *row.delta / (1 - accuracy_of(*b));
    add_comparison(row, *b);
  }
  return r;
}

std::string ablation_to_csv(const AblationReport& r) {
  auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
  std::string out =
      "rank,feature_set,c,dev_accuracy,test_accuracy,dimension,base_feature_set,delta,"
      "error_reduction,mcnemar_p_vs_best\n";
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    const auto& row = r.rows[i];
    out += fmt::format("{},{},{},{},{},{},{},{},{},{}\n", i + 1, row.spec.name(),
                       format_double(row.c), format_double(row.dev_accuracy),
                       opt(row.test_accuracy), row.dimension, row.base_spec.value_or(""),
                       opt(row.delta), opt(row.error_reduction), opt(row.mcnemar_p_vs_best));
  }
  return out;
}

}  // namespace genpower
