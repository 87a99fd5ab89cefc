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

#include "genpower/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <map>

#include <fmt/format.h>
#include <json.hpp>

#include "genpower/ingest.hpp"
#include "genpower/pairs.hpp"

namespace genpower {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr const char* kNameStats = "name_stats.csv";
constexpr const char* kSsaSummary = "ssa_summary.json";
constexpr const char* kParticipants = "participants.csv";
constexpr const char* kGenderReport = "gender_report.json";
constexpr const char* kPairs = "pairs.csv";
constexpr const char* kPairsSummary = "pairs_summary.json";
constexpr const char* kFeatures = "features.csv";
constexpr const char* kNgrams = "ngrams.csv";
constexpr const char* kVocab = "vocab.csv";
constexpr const char* kFeaturesSummary = "features_summary.json";
constexpr const char* kModel = "model.json";

std::string threads_artifact(SubsetMode m) { return fmt::format("threads_{}.jsonl", to_string(m)); }

fs::path artifact(const PipelineConfig& cfg, std::string_view name) { return cfg.work_dir / name; }

void ensure_work_dir(const PipelineConfig& cfg) {
  std::error_code ec;
  fs::create_directories(cfg.work_dir, ec);
  if (ec) {
    throw DataError(fmt::format("cannot create work directory '{}': {}", cfg.work_dir.string(),
                                ec.message()));
  }
}

// Path of an upstream artifact; a missing one names the command making it.
fs::path require_artifact(const PipelineConfig& cfg, std::string_view name,
                          std::string_view producer) {
  fs::path p = artifact(cfg, name);
  if (!fs::exists(p)) {
    throw DataError(fmt::format("missing '{}'; run `genpower {}` first", p.string(), producer));
  }
  return p;
}

const fs::path& require_option(const std::optional<fs::path>& p, std::string_view flag) {
  if (!p) throw UsageError(fmt::format("this command needs {}", flag));
  return *p;
}

void write_json(const fs::path& path, const json& j) { write_file_atomic(path, j.dump(2) + "\n"); }

std::string pct(double v) { return fmt::format("{:.2f}%", v); }

double parse_number(std::string_view s, std::string_view what) {
  s = trim(s);
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw DataError(fmt::format("bad number '{}' in {}", s, what));
  }
  return v;
}

std::size_t parse_index(std::string_view s, std::string_view what) {
  s = trim(s);
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw DataError(fmt::format("bad integer '{}' in {}", s, what));
  }
  return v;
}

std::vector<std::string> data_lines(const fs::path& path, std::string_view header) {
  auto lines = read_lines(path);
  if (lines.empty() || lines.front() != header) {
    throw DataError(fmt::format("'{}' does not start with the header '{}'", path.string(), header));
  }
  lines.erase(lines.begin());
  std::erase_if(lines, [](const std::string& l) { return trim(l).empty(); });
  return lines;
}

// --- name statistics -----------------------------------------------------------

std::string name_stats_to_csv(const NameStats& s) {
  std::string out = "name,male,female,ambiguity_score\n";
  for (const auto& [name, c] : s.entries()) {
    out += fmt::format("{},{},{},{}\n", name, c.male, c.female,
                       format_double(ambiguity_score<double>(c)));
  }
  return out;
}

NameStats load_name_stats(const PipelineConfig& cfg) {
  if (cfg.ssa_dir) return load_ssa(*cfg.ssa_dir, cfg.gender.year_from, cfg.gender.year_to);
  const fs::path p = artifact(cfg, kNameStats);
  if (!fs::exists(p)) {
    throw DataError(fmt::format("no name statistics: pass --ssa-dir or run `genpower ssa-build` "
                                "first (missing '{}')",
                                p.string()));
  }
  NameStats s;
  std::size_t line_no = 1;
  for (const auto& line : data_lines(p, "name,male,female,ambiguity_score")) {
    ++line_no;
    const auto f = split(line, ',');
    if (f.size() != 4) throw DataError(fmt::format("{}:{}: expected 4 fields", p.string(), line_no));
    const auto what = fmt::format("{}:{}", p.string(), line_no);
    const auto male = static_cast<std::uint64_t>(parse_index(f[1], what));
    const auto female = static_cast<std::uint64_t>(parse_index(f[2], what));
    if (male > 0) s.add(f[0], Gender::kMale, male);
    if (female > 0) s.add(f[0], Gender::kFemale, female);
  }
  return s;
}

GenderAssignments load_participants(const PipelineConfig& cfg) {
  return assignments_from_csv(read_lines(require_artifact(cfg, kParticipants, "gender-assign")));
}

Corpus load_subset_threads(const PipelineConfig& cfg) {
  const std::string name = threads_artifact(cfg.subset);
  return load_threads(
      require_artifact(cfg, name, fmt::format("subset --subset {}", to_string(cfg.subset))));
}

// --- pairs -----------------------------------------------------------------------

struct PairRow {
  PairKey key;
  std::optional<PowerLabel> hp;
  Gender gender_p1 = Gender::kIndeterminate;
  Gender gender_p2 = Gender::kIndeterminate;
  std::optional<GenderEnv> env_p1;
  std::optional<GenderEnv> env_p2;
};

std::vector<PairRow> load_pairs(const PipelineConfig& cfg) {
  const fs::path p = require_artifact(cfg, kPairs, "pairs");
  std::vector<PairRow> rows;
  std::size_t line_no = 1;
  for (const auto& line : data_lines(
           p, "thread_id,p1,p2,hp_label,gender_p1,gender_p2,env_p1,env_p2,n_im_messages")) {
    ++line_no;
    const auto f = parse_csv_line(line);
    if (f.size() != 9) throw DataError(fmt::format("{}:{}: expected 9 fields", p.string(), line_no));
    PairRow r;
    r.key = PairKey{f[0], f[1], f[2]};
    auto bad = [&](std::string_view what) {
      return DataError(fmt::format("{}:{}: bad {}", p.string(), line_no, what));
    };
    if (!f[3].empty()) {
      r.hp = parse_power_label(f[3]);
      if (!r.hp) throw bad("hp_label");
    }
    auto g1 = parse_gender(f[4]);
    auto g2 = parse_gender(f[5]);
    if (!g1 || !g2) throw bad("gender");
    r.gender_p1 = *g1;
    r.gender_p2 = *g2;
    if (!f[6].empty()) {
      r.env_p1 = parse_gender_env(f[6]);
      if (!r.env_p1) throw bad("env_p1");
    }
    if (!f[7].empty()) {
      r.env_p2 = parse_gender_env(f[7]);
      if (!r.env_p2) throw bad("env_p2");
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

// --- feature table ---------------------------------------------------------------

const std::vector<std::string>& structural_columns() {
  static const std::vector<std::string> cols = [] {
    std::vector<std::string> c;
    for (Variant v : kVariants) {
      for (Feature f : all_features()) {
        c.push_back(fmt::format("{}_{}", variant_prefix(v), feature_column(f)));
      }
    }
    return c;
  }();
  return cols;
}

std::string features_header() {
  std::string h = "instance_id,thread_id,p1,p2,split,hp_label,gender_p1,gender_p2,env_p1,env_p2";
  for (const auto& c : structural_columns()) h += "," + c;
  return h;
}

std::string env_str(const std::optional<GenderEnv>& e) {
  return e ? std::string(to_string(*e)) : std::string();
}

std::string feature_table_csv(const std::vector<Instance>& xs) {
  std::string out = features_header() + "\n";
  for (const auto& x : xs) {
    out += fmt::format("{},{},{},{},{},{},{},{},{},{}", x.id, csv_field(x.thread_id),
                       csv_field(x.p1), csv_field(x.p2), to_string(x.split), to_string(x.label),
                       to_string(x.gender_p1), to_string(x.gender_p2), env_str(x.env_p1),
                       env_str(x.env_p2));
    for (const auto& variant : x.structural) {
      for (double v : variant) out += "," + format_double(v);
    }
    out += "\n";
  }
  return out;
}

// --- JSON helpers ----------------------------------------------------------------

json to_json(const stats::GroupSummary& g) {
  json j;
  j["level_1"] = g.a;
  if (!g.b.empty()) j["level_2"] = g.b;
  j["n"] = g.n;
  j["mean"] = g.mean;
  j["stderr"] = g.stderr_mean;
  return j;
}

json to_json(const stats::AnovaTerm& t) {
  return json{{"term", t.name}, {"ss", t.ss}, {"df", t.df}, {"ms", t.ms}, {"f", t.f}, {"p", t.p}};
}

json to_json(const stats::TukeyResult& r) {
  json j;
  j["alpha"] = r.alpha;
  j["groups"] = r.k;
  j["mse"] = r.mse;
  j["df_residual"] = r.df_residual;
  j["q_critical"] = r.q_critical;
  json comps = json::array();
  for (const auto& c : r.comparisons) {
    comps.push_back({{"group_1", c.group_1},
                     {"group_2", c.group_2},
                     {"diff", c.diff},
                     {"q", c.q},
                     {"p_adj", c.p_adj},
                     {"significant", c.significant}});
  }
  j["comparisons"] = std::move(comps);
  return j;
}

}  // namespace

// --- feature table loading -------------------------------------------------------

FeatureTable load_feature_table(const fs::path& work_dir) {
  PipelineConfig cfg;
  cfg.work_dir = work_dir;
  FeatureTable table;

  const fs::path vp = require_artifact(cfg, kVocab, "features");
  std::vector<std::string> terms;
  std::size_t line_no = 1;
  std::size_t expected = 0;
  std::vector<std::string> features;
  for (const auto& line : data_lines(vp, "feature_id,feature")) {
    ++line_no;
    const auto f = parse_csv_line(line);
    const auto where = fmt::format("{}:{}", vp.string(), line_no);
    if (f.size() != 2) throw DataError(where + ": expected 2 fields");
    if (parse_index(f[0], where) != expected) throw DataError(where + ": feature ids must be consecutive");
    const auto bar = f[1].find('|');
    if (bar == std::string::npos) throw DataError(where + ": feature must look like variant|term");
    if (expected % 4 == 0) terms.push_back(f[1].substr(bar + 1));
    features.push_back(f[1]);
    ++expected;
  }
  if (expected % 4 != 0) throw DataError(vp.string() + ": feature count is not a multiple of 4");
  table.vocabulary = Vocabulary(std::move(terms));
  for (std::uint32_t id = 0; id < expected; ++id) {
    if (table.vocabulary.feature(id) != features[id]) {
      throw DataError(fmt::format("{}: feature {} should be '{}'", vp.string(), id,
                                  table.vocabulary.feature(id)));
    }
  }

  const fs::path fp = require_artifact(cfg, kFeatures, "features");
  const std::size_t n_struct = structural_columns().size();
  line_no = 1;
  for (const auto& line : data_lines(fp, features_header())) {
    ++line_no;
    const auto f = parse_csv_line(line);
    const auto where = fmt::format("{}:{}", fp.string(), line_no);
    if (f.size() != 10 + n_struct) throw DataError(where + ": wrong number of fields");
    Instance x;
    x.id = parse_index(f[0], where);
    if (x.id != table.instances.size()) throw DataError(where + ": instance ids must be consecutive");
    x.thread_id = f[1];
    x.p1 = f[2];
    x.p2 = f[3];
    auto sp = parse_split(f[4]);
    auto hp = parse_power_label(f[5]);
    auto g1 = parse_gender(f[6]);
    auto g2 = parse_gender(f[7]);
    if (!sp || !hp || !g1 || !g2) throw DataError(where + ": bad split/label/gender");
    x.split = *sp;
    x.label = *hp;
    x.gender_p1 = *g1;
    x.gender_p2 = *g2;
    if (!f[8].empty()) x.env_p1 = parse_gender_env(f[8]);
    if (!f[9].empty()) x.env_p2 = parse_gender_env(f[9]);
    for (std::size_t k = 0; k < n_struct; ++k) {
      x.structural[k / kNumStructuralFeatures][k % kNumStructuralFeatures] =
          parse_number(f[10 + k], where);
    }
    table.instances.push_back(std::move(x));
  }

  const fs::path np = require_artifact(cfg, kNgrams, "features");
  line_no = 1;
  for (const auto& line : data_lines(np, "instance_id,feature_id,count")) {
    ++line_no;
    const auto f = split(line, ',');
    const auto where = fmt::format("{}:{}", np.string(), line_no);
    if (f.size() != 3) throw DataError(where + ": expected 3 fields");
    const std::size_t id = parse_index(f[0], where);
    const std::size_t fid = parse_index(f[1], where);
    if (id >= table.instances.size()) throw DataError(where + ": unknown instance");
    if (fid >= table.vocabulary.size()) throw DataError(where + ": unknown feature id");
    table.instances[id].ngrams.emplace_back(static_cast<std::uint32_t>(fid),
                                            parse_number(f[2], where));
  }
  for (auto& x : table.instances) std::sort(x.ngrams.begin(), x.ngrams.end());
  return table;
}

std::vector<AnalysisObservation> analysis_observations(const std::vector<Instance>& xs) {
  std::vector<AnalysisObservation> out;
  out.reserve(2 * xs.size());
  for (const auto& x : xs) {
    for (const Instance& side : {x, reversed(x)}) {
      AnalysisObservation o;
      o.values = side[Variant::kP1Mt];
      o.power = side.label;
      o.gender = side.gender_p1;
      o.env = side.env_p1;
      out.push_back(o);
    }
  }
  return out;
}

// --- commands --------------------------------------------------------------------

void cmd_ssa_build(const PipelineConfig& cfg, std::ostream& log) {
  const auto& dir = require_option(cfg.ssa_dir, "--ssa-dir");
  cfg.gender.validate();
  const NameStats stats = load_ssa(dir, cfg.gender.year_from, cfg.gender.year_to);
  ensure_work_dir(cfg);
  std::size_t zero = 0;
  std::size_t under = 0;
  std::uint64_t male = 0;
  std::uint64_t female = 0;
  for (const auto& [name, c] : stats.entries()) {
    const double as = ambiguity_score<double>(c);
    zero += as == 0 ? 1 : 0;
    under += as <= cfg.gender.ambiguity_threshold ? 1 : 0;
    male += c.male;
    female += c.female;
  }
  const double n = double(std::max<std::size_t>(stats.size(), 1));
  write_file_atomic(artifact(cfg, kNameStats), name_stats_to_csv(stats));
  json j;
  j["year_from"] = cfg.gender.year_from;
  j["year_to"] = cfg.gender.year_to;
  j["names"] = stats.size();
  j["male_births"] = male;
  j["female_births"] = female;
  j["ambiguity_threshold"] = cfg.gender.ambiguity_threshold;
  j["as_zero_pct"] = 100.0 * double(zero) / n;
  j["as_within_threshold_pct"] = 100.0 * double(under) / n;
  write_json(artifact(cfg, kSsaSummary), j);
  log << fmt::format("ssa-build: {} names ({}-{}); AS=0 {}, AS<={} {}\n", stats.size(),
                     cfg.gender.year_from, cfg.gender.year_to, pct(100.0 * double(zero) / n),
                     format_double(cfg.gender.ambiguity_threshold),
                     pct(100.0 * double(under) / n));
}

void cmd_gender_assign(const PipelineConfig& cfg, std::ostream& log) {
  const auto& threads = require_option(cfg.threads, "--threads");
  cfg.gender.validate();
  const Corpus corpus = load_threads(threads);
  const NameStats stats = load_name_stats(cfg);
  const GenderOverrides overrides = cfg.overrides ? load_overrides(*cfg.overrides) : GenderOverrides{};
  const GenderAssignments a = assign_corpus(corpus, stats, overrides, cfg.gender);
  AssignmentReport report = coverage_report(corpus, a);
  if (!overrides.empty()) {
    report.gold = gold_accuracy(assign_corpus(corpus, stats, {}, cfg.gender), overrides);
  }
  ensure_work_dir(cfg);
  write_file_atomic(artifact(cfg, kParticipants), assignments_to_csv(a));

  json j;
  j["ambiguity_threshold"] = cfg.gender.ambiguity_threshold;
  j["ssa_years"] = fmt::format("{}:{}", cfg.gender.year_from, cfg.gender.year_to);
  j["participants"] = {{"total", report.total_participants},
                       {"assigned", report.assigned_participants},
                       {"coverage_pct", report.participant_coverage_pct},
                       {"male", report.male},
                       {"female", report.female},
                       {"manual", report.manual},
                       {"conflicting_names", report.conflicting}};
  j["messages"] = {{"total", report.total_messages},
                   {"gendered_sender", report.gendered_sender_messages},
                   {"coverage_pct", report.message_coverage_pct}};
  j["threads"] = {{"total", report.total_threads},
                  {"asgi", report.asgi_threads},
                  {"asgi_pct", report.asgi_pct},
                  {"apgi", report.apgi_threads},
                  {"apgi_pct", report.apgi_pct}};
  if (report.gold) {
    j["gold"] = {{"participants", report.gold->gold_total},
                 {"assigned", report.gold->assigned},
                 {"correct", report.gold->correct},
                 {"coverage_pct", report.gold->coverage_pct},
                 {"accuracy_pct", report.gold->accuracy_pct}};
  }
  write_json(artifact(cfg, kGenderReport), j);
  log << fmt::format(
      "gender-assign: {} participants, coverage {} participants / {} messages / {} ASGI / {} "
      "APGI\n",
      report.total_participants, pct(report.participant_coverage_pct),
      pct(report.message_coverage_pct), pct(report.asgi_pct), pct(report.apgi_pct));
}

void cmd_subset(const PipelineConfig& cfg, std::ostream& log) {
  const auto& threads = require_option(cfg.threads, "--threads");
  const Corpus corpus = load_threads(threads);
  const GenderAssignments a = load_participants(cfg);
  const Corpus kept = subset_corpus(corpus, a, cfg.subset);
  ensure_work_dir(cfg);
  write_file_atomic(artifact(cfg, threads_artifact(cfg.subset)), serialize_threads(kept));
  json j;
  j["subset"] = to_string(cfg.subset);
  j["input_threads"] = corpus.size();
  j["kept_threads"] = kept.size();
  write_json(artifact(cfg, fmt::format("subset_{}.json", to_string(cfg.subset))), j);
  log << fmt::format("subset: kept {} of {} threads ({})\n", kept.size(), corpus.size(),
                     to_string(cfg.subset));
}

void cmd_pairs(const PipelineConfig& cfg, std::ostream& log) {
  const auto& hierarchy = require_option(cfg.hierarchy, "--hierarchy");
  const Corpus corpus = load_subset_threads(cfg);
  const GenderAssignments a = load_participants(cfg);
  const DominanceSet d = load_hierarchy(hierarchy);
  std::vector<PairInstance> all;
  PairCounts counts;
  json per_thread = json::array();
  for (const auto& t : corpus) {
    auto pairs = extract_pairs(t, d, a, /*related_only=*/false);
    const auto ripp = static_cast<std::size_t>(
        std::count_if(pairs.begin(), pairs.end(), [](const PairInstance& p) { return p.ctx.hp; }));
    ++counts.threads;
    counts.ipp += pairs.size();
    counts.ripp += ripp;
    per_thread.push_back({{"thread_id", t.id()}, {"ipp", pairs.size()}, {"ripp", ripp}});
    for (auto& p : pairs) all.push_back(std::move(p));
  }
  ensure_work_dir(cfg);
  write_file_atomic(artifact(cfg, kPairs), pairs_to_csv(all));
  json j;
  j["subset"] = to_string(cfg.subset);
  j["threads"] = counts.threads;
  j["ipp"] = counts.ipp;
  j["ripp"] = counts.ripp;
  j["per_thread"] = std::move(per_thread);
  write_json(artifact(cfg, kPairsSummary), j);
  log << fmt::format("pairs: {} threads, {} interacting pairs, {} related pairs\n", counts.threads,
                     counts.ipp, counts.ripp);
}

void cmd_features(const PipelineConfig& cfg, std::ostream& log) {
  Corpus corpus = load_subset_threads(cfg);
  const auto rows = load_pairs(cfg);
  if (cfg.annotations) corpus = apply_annotations(corpus, load_annotations(*cfg.annotations));
  if (cfg.baseline_taggers) {
    corpus = tag_corpus(corpus, BaselineDialogActTagger{}, BaselineOdpTagger{});
  }
  std::map<std::string, const Thread*, std::less<>> by_id;
  for (const auto& t : corpus) by_id[t.id()] = &t;
  const std::optional<CorpusSplit> split_file =
      cfg.split_file ? std::optional<CorpusSplit>(load_split_file(*cfg.split_file)) : std::nullopt;

  FeatureOptions opts;
  opts.ngram_families = cfg.ngram_families;
  std::vector<PairInstance> pairs;
  std::vector<PairFeatures> feats;
  std::vector<Split> splits;
  for (const auto& r : rows) {
    if (!r.hp) continue;
    auto it = by_id.find(r.key.thread_id);
    if (it == by_id.end()) {
      throw DataError(fmt::format("pairs.csv names thread '{}' that is not in the {} subset; "
                                  "rerun `genpower pairs`",
                                  r.key.thread_id, to_string(cfg.subset)));
    }
    const Thread& t = *it->second;
    PairInstance p;
    p.key = r.key;
    p.ctx.im_messages = interaction_messages(t, r.key.p1, r.key.p2);
    p.ctx.hp = r.hp;
    p.ctx.gender_p1 = r.gender_p1;
    p.ctx.gender_p2 = r.gender_p2;
    p.ctx.env_p1 = r.env_p1;
    p.ctx.env_p2 = r.env_p2;
    feats.push_back(pair_features(t, r.key.p1, r.key.p2, p.ctx, opts));
    splits.push_back(split_file ? split_file->at(t.id())
                                : hash_split(t.id(), cfg.split, cfg.seed));
    pairs.push_back(std::move(p));
  }

  std::vector<const PairFeatures*> train;
  for (std::size_t i = 0; i < feats.size(); ++i) {
    if (splits[i] == Split::kTrain) train.push_back(&feats[i]);
  }
  const Vocabulary vocab = build_vocabulary(train, cfg.min_df, cfg.max_terms);
  std::vector<Instance> xs;
  std::array<std::size_t, 3> per_split{};
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    xs.push_back(make_instance(i, pairs[i], feats[i], splits[i], vocab));
    ++per_split[static_cast<std::size_t>(splits[i])];
  }

  ensure_work_dir(cfg);
  write_file_atomic(artifact(cfg, kFeatures), feature_table_csv(xs));
  std::string ngrams = "instance_id,feature_id,count\n";
  for (const auto& x : xs) {
    for (const auto& [fid, count] : x.ngrams) {
      ngrams += fmt::format("{},{},{}\n", x.id, fid, format_double(count));
    }
  }
  write_file_atomic(artifact(cfg, kNgrams), ngrams);
  std::string vocab_csv = "feature_id,feature\n";
  for (std::uint32_t id = 0; id < vocab.size(); ++id) {
    vocab_csv += fmt::format("{},{}\n", id, csv_field(vocab.feature(id)));
  }
  write_file_atomic(artifact(cfg, kVocab), vocab_csv);

  json fam = json::array();
  for (auto f : cfg.ngram_families) fam.push_back(to_string(f));
  json j;
  j["subset"] = to_string(cfg.subset);
  j["instances"] = xs.size();
  j["train"] = per_split[0];
  j["dev"] = per_split[1];
  j["test"] = per_split[2];
  j["split_source"] = cfg.split_file ? "file" : "hash";
  j["seed"] = cfg.seed;
  j["vocabulary_terms"] = vocab.terms().size();
  j["feature_ids"] = vocab.size();
  j["feature_id_rule"] = "4 * term_id + variant (p1_im, p2_im, p1_mt, p2_mt)";
  j["ngram_families"] = std::move(fam);
  j["min_df"] = cfg.min_df;
  j["max_terms"] = cfg.max_terms;
  j["baseline_taggers"] = cfg.baseline_taggers;
  write_json(artifact(cfg, kFeaturesSummary), j);
  log << fmt::format("features: {} instances (TRAIN {}, DEV {}, TEST {}), {} ngram terms\n",
                     xs.size(), per_split[0], per_split[1], per_split[2], vocab.terms().size());
}

// Primary tests collected across features for the Bonferroni summary.
struct PrimaryTest {
  json* target;
  double p;
};

void cmd_analyze(const PipelineConfig& cfg, std::ostream& log) {
  const FeatureTable table = load_feature_table(cfg.work_dir);
  if (table.instances.empty()) throw DataError("feature table has no instances");
  const auto obs = analysis_observations(table.instances);

  json features = json::array();
  std::vector<std::string> warnings;
  std::string groups_csv = "feature,design,level_1,level_2,n,mean,stderr\n";

  for (Feature f : all_features()) {
    const auto k = static_cast<std::size_t>(f);
    json fj;
    fj["feature"] = feature_name(f);
    fj["column"] = fmt::format("p1_mt_{}", feature_column(f));
    fj["family"] = to_string(feature_family(f));
    json warn = json::array();
    auto warn_skip = [&](std::string_view design, const std::string& why) {
      const auto msg = fmt::format("{} [{}]: {}; skipped", feature_name(f), design, why);
      warn.push_back(msg);
      warnings.push_back(msg);
    };

    stats::FactorDesign power("power");
    stats::FactorDesign gender("gender");
    stats::FactorDesign pg("power", "gender");
    stats::FactorDesign pe("power", "gender_env");
    std::vector<double> sup;
    std::vector<double> sub;
    std::vector<double> male;
    std::vector<double> female;
    for (const auto& o : obs) {
      const double v = o.values[k];
      const std::string p(to_string(o.power));
      power.add(v, p);
      (o.power == PowerLabel::kSuperior ? sup : sub).push_back(v);
      if (is_identified(o.gender)) {
        const std::string g(to_string(o.gender));
        gender.add(v, g);
        pg.add(v, p, g);
        (o.gender == Gender::kMale ? male : female).push_back(v);
      }
      if (o.env) pe.add(v, p, std::string(to_string(*o.env)));
    }
    const std::vector<std::string> power_levels = {"SUPERIOR", "SUBORDINATE"};
    const std::vector<std::string> gender_levels = {"M", "F"};
    const std::vector<std::string> env_levels = {"FEMALE_ENV", "MIXED_ENV", "MALE_ENV"};
    power.set_levels_a(power_levels);
    gender.set_levels_a(gender_levels);
    pg.set_levels_a(power_levels);
    pg.set_levels_b(gender_levels);
    pe.set_levels_a(power_levels);
    pe.set_levels_b(env_levels);

    json groups;
    auto summarize = [&](std::string_view name, const stats::FactorDesign& d) {
      json arr = json::array();
      for (const auto& g : stats::group_summary(d)) {
        arr.push_back(to_json(g));
        groups_csv += fmt::format("{},{},{},{},{},{},{}\n", feature_name(f), name, g.a, g.b, g.n,
                                  format_double(g.mean), format_double(g.stderr_mean));
      }
      groups[std::string(name)] = std::move(arr);
    };
    summarize("power", power);
    summarize("gender", gender);
    summarize("power_gender", pg);
    summarize("power_env", pe);
    fj["groups"] = std::move(groups);

    json tt = json::object();
    auto run_t = [&](std::string_view name, const std::vector<double>& a,
                     const std::vector<double>& b, std::string_view la, std::string_view lb) {
      try {
        const auto r = stats::t_test(a, b);
        tt[std::string(name)] = {{"t", r.t},
                                 {"df", r.df},
                                 {"p", r.p},
                                 {fmt::format("mean_{}", la), r.mean_1},
                                 {fmt::format("mean_{}", lb), r.mean_2}};
      } catch (const DataError& e) {
        warn_skip(fmt::format("t-test {}", name), e.what());
      }
    };
    run_t("power", sup, sub, "SUPERIOR", "SUBORDINATE");
    run_t("gender", male, female, "M", "F");
    fj["t_tests"] = std::move(tt);

    json an = json::object();
    json tk = json::object();
    auto run_design = [&](std::string_view name, const stats::FactorDesign& d) {
      try {
        const auto r = stats::anova(d, cfg.ss_type);
        json aj;
        aj["ss_type"] = static_cast<int>(cfg.ss_type);
        json terms = json::array();
        for (const auto& t : r.terms) terms.push_back(to_json(t));
        aj["terms"] = std::move(terms);
        aj["model"] = to_json(r.model);
        aj["residual"] = {{"ss", r.ss_residual}, {"df", r.df_residual}, {"ms", r.ms_residual}};
        aj["n"] = r.n;
        an[std::string(name)] = std::move(aj);
        tk[std::string(name)] = to_json(stats::tukey_hsd(d, stats::TukeyGrouping::kCells, cfg.alpha));
      } catch (const DataError& e) {
        warn_skip(fmt::format("ANOVA {}", name), e.what());
      }
    };
    run_design("power_gender", pg);
    run_design("power_env", pe);
    fj["anova"] = std::move(an);
    fj["tukey"] = std::move(tk);
    fj["warnings"] = std::move(warn);
    features.push_back(std::move(fj));
  }

  // Bonferroni over every t-test and ANOVA effect actually run.
  std::vector<PrimaryTest> tests;
  for (auto& fj : features) {
    for (auto& [name, t] : fj["t_tests"].items()) tests.push_back({&t, t["p"].get<double>()});
    for (auto& [name, a] : fj["anova"].items()) {
      for (auto& term : a["terms"]) tests.push_back({&term, term["p"].get<double>()});
    }
  }
  std::vector<double> ps;
  for (const auto& t : tests) ps.push_back(t.p);
  const auto bonf = stats::bonferroni(ps, cfg.alpha);
  for (std::size_t i = 0; i < tests.size(); ++i) {
    (*tests[i].target)["p_bonferroni"] = bonf.p_adjusted[i];
    (*tests[i].target)["significant_bonferroni"] = bool(bonf.significant[i]);
  }

  std::string csv = "feature,design,test,term,statistic,df,p,p_bonferroni,significant\n";
  for (const auto& fj : features) {
    const std::string name = fj["feature"].get<std::string>();
    auto num = [](const json& v) {
      return v.is_number() ? format_double(v.get<double>()) : std::string("inf");
    };
    for (const auto& [design, t] : fj["t_tests"].items()) {
      csv += fmt::format("{},{},t-test,{},{},{},{},{},{}\n", name, design, design, num(t["t"]),
                         num(t["df"]), num(t["p"]), num(t["p_bonferroni"]),
                         t["significant_bonferroni"].get<bool>() ? 1 : 0);
    }
    for (const auto& [design, a] : fj["anova"].items()) {
      for (const auto& term : a["terms"]) {
        csv += fmt::format("{},{},anova,{},{},{},{},{},{}\n", name, design,
                           term["term"].get<std::string>(), num(term["f"]), num(term["df"]),
                           num(term["p"]), num(term["p_bonferroni"]),
                           term["significant_bonferroni"].get<bool>() ? 1 : 0);
      }
      csv += fmt::format("{},{},anova,model,{},{},{},,\n", name, design, num(a["model"]["f"]),
                         num(a["model"]["df"]), num(a["model"]["p"]));
    }
    for (const auto& [design, t] : fj["tukey"].items()) {
      for (const auto& c : t["comparisons"]) {
        csv += fmt::format("{},{},tukey,{} vs {},{},{},{},,{}\n", name, design,
                           c["group_1"].get<std::string>(), c["group_2"].get<std::string>(),
                           num(c["q"]), num(t["df_residual"]), num(c["p_adj"]),
                           c["significant"].get<bool>() ? 1 : 0);
      }
    }
  }

  json report;
  report["variant"] = "p1_mt";
  report["observations"] = obs.size();
  report["instances"] = table.instances.size();
  report["ss_type"] = static_cast<int>(cfg.ss_type);
  report["alpha"] = cfg.alpha;
  report["bonferroni"] = {{"tests", bonf.m}, {"threshold", bonf.threshold}};
  report["features"] = std::move(features);
  report["warnings"] = warnings;
  write_json(artifact(cfg, "analysis.json"), report);
  write_file_atomic(artifact(cfg, "analysis.csv"), csv);
  write_file_atomic(artifact(cfg, "analysis_groups.csv"), groups_csv);
  for (const auto& w : warnings) log << "warning: " << w << "\n";
  log << fmt::format("analyze: {} observations, {} primary tests, Bonferroni threshold {}\n",
                     obs.size(), bonf.m, format_double(bonf.threshold));
}

namespace {

struct Splits {
  std::vector<Instance> train;
  std::vector<Instance> dev;
  std::vector<Instance> test;
};

Splits split_instances(const FeatureTable& table) {
  Splits s;
  for (const auto& x : table.instances) {
    switch (x.split) {
      case Split::kTrain: s.train.push_back(x); break;
      case Split::kDev: s.dev.push_back(x); break;
      case Split::kTest: s.test.push_back(x); break;
    }
  }
  return s;
}

TrainOptions train_options(const PipelineConfig& cfg) {
  TrainOptions o;
  o.c_grid = cfg.c_grid;
  o.tolerance = cfg.tolerance;
  o.degree = cfg.degree;
  o.seed = cfg.seed;
  o.space.env_both = cfg.env_both;
  return o;
}

fs::path model_path(const PipelineConfig& cfg) { return cfg.model.value_or(artifact(cfg, kModel)); }

}  // namespace

void cmd_train(const PipelineConfig& cfg, std::ostream& log) {
  const auto specs = parse_feature_specs(cfg.feature_sets.value_or(std::string(kDefaultTrainSpec)));
  if (specs.size() != 1) throw UsageError("train takes exactly one feature set");
  const FeatureTable table = load_feature_table(cfg.work_dir);
  const Splits s = split_instances(table);
  const TrainOptions opts = train_options(cfg);

  json j;
  j["feature_set"] = specs[0].name();
  j["train_instances"] = s.train.size();
  j["train_rows"] = 2 * s.train.size();
  j["degree"] = cfg.degree;
  j["tolerance"] = cfg.tolerance;
  j["seed"] = cfg.seed;
  Model model;
  if (cfg.c) {
    model = train_model(s.train, table.vocabulary, specs[0], *cfg.c, opts);
    j["c"] = *cfg.c;
    j["c_source"] = "fixed";
  } else {
    auto sel = select_model(s.train, s.dev, table.vocabulary, specs[0], opts);
    model = std::move(sel.model);
    j["c"] = sel.c;
    j["c_source"] = "dev";
    j["dev_accuracy"] = sel.dev_accuracy;
    json grid = json::array();
    for (auto [c, acc] : sel.grid) grid.push_back({{"c", c}, {"dev_accuracy", acc}});
    j["grid"] = std::move(grid);
  }
  j["support_vectors"] = model.svm.support.rows();
  j["dimension"] = model.space.dimension();
  j["converged"] = model.converged;
  ensure_work_dir(cfg);
  write_file_atomic(model_path(cfg), serialize_model(model));
  write_json(artifact(cfg, "train_report.json"), j);
  if (!model.converged) log << "warning: SVM optimization hit the iteration limit\n";
  log << fmt::format("train: {} on {} instances, C={}, {} support vectors\n", specs[0].name(),
                     s.train.size(), format_double(model.svm.c), model.svm.support.rows());
}

void cmd_eval(const PipelineConfig& cfg, std::ostream& log) {
  const fs::path mp = model_path(cfg);
  if (!fs::exists(mp)) {
    throw DataError(fmt::format("missing model '{}'; run `genpower train` first", mp.string()));
  }
  const Model model = parse_model(read_file(mp));
  const FeatureTable table = load_feature_table(cfg.work_dir);
  if (table.vocabulary.terms() != model.vocabulary.terms()) {
    throw DataError("model vocabulary differs from the feature table; rerun `genpower train`");
  }
  const Splits s = split_instances(table);
  const auto& xs = cfg.eval_split == Split::kTrain ? s.train
                   : cfg.eval_split == Split::kDev ? s.dev
                                                   : s.test;
  const std::string split_name = to_lower(to_string(cfg.eval_split));
  if (xs.empty()) {
    throw DataError(fmt::format("{} split has no instances", to_string(cfg.eval_split)));
  }
  const Evaluation e = evaluate(model, xs);
  const MajorityBaseline base = majority_baseline(s.train, xs);
  write_file_atomic(artifact(cfg, fmt::format("predictions_{}.csv", split_name)),
                    predictions_to_csv(e.predictions));
  json j;
  j["split"] = to_string(cfg.eval_split);
  j["feature_set"] = model.space.spec().name();
  j["instances"] = xs.size();
  j["correct"] = e.correct;
  j["accuracy"] = e.accuracy;
  j["majority_label"] = to_string(base.label);
  j["majority_accuracy"] = base.accuracy;
  j["ordering"] = "one canonical ordering per related pair (p1 < p2)";
  write_json(artifact(cfg, fmt::format("eval_{}.json", split_name)), j);
  log << fmt::format("eval: {} accuracy {} ({} of {}), majority {}\n", to_string(cfg.eval_split),
                     pct(100 * e.accuracy), e.correct, xs.size(), pct(100 * base.accuracy));
}

void cmd_ablate(const PipelineConfig& cfg, std::ostream& log) {
  const auto specs =
      parse_feature_specs(cfg.feature_sets.value_or(std::string(kDefaultAblationSpecs)));
  const FeatureTable table = load_feature_table(cfg.work_dir);
  const Splits s = split_instances(table);
  const AblationReport r = ablate(s.train, s.dev, s.test, table.vocabulary, specs,
                                  train_options(cfg));
  ensure_work_dir(cfg);
  write_file_atomic(artifact(cfg, "ablation.csv"), ablation_to_csv(r));

  json rows = json::array();
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    const auto& row = r.rows[i];
    json rj;
    rj["rank"] = i + 1;
    rj["feature_set"] = row.spec.name();
    rj["c"] = row.c;
    rj["dev_accuracy"] = row.dev_accuracy;
    if (row.test_accuracy) rj["test_accuracy"] = *row.test_accuracy;
    rj["dimension"] = row.dimension;
    if (row.base_spec) {
      rj["base_feature_set"] = *row.base_spec;
      rj["delta"] = *row.delta;
      if (row.error_reduction) rj["error_reduction"] = *row.error_reduction;
    }
    if (row.mcnemar_p_vs_best) rj["mcnemar_p_vs_best"] = *row.mcnemar_p_vs_best;
    rows.push_back(std::move(rj));
  }
  json comps = json::array();
  for (const auto& c : r.comparisons) {
    comps.push_back({{"feature_set_1", c.spec_1},
                     {"feature_set_2", c.spec_2},
                     {"only_1_correct", c.b},
                     {"only_2_correct", c.c},
                     {"exact", c.exact},
                     {"p", c.p}});
  }
  json j;
  j["evaluated_on"] = r.evaluated_on;
  j["ordering"] = "one canonical ordering per related pair (p1 < p2)";
  j["train_instances"] = s.train.size();
  j["dev_instances"] = s.dev.size();
  j["test_instances"] = s.test.size();
  j["majority"] = {{"label", to_string(r.majority.label)}, {"accuracy", r.majority.accuracy}};
  j["rows"] = std::move(rows);
  j["mcnemar"] = std::move(comps);
  write_json(artifact(cfg, "ablation.json"), j);
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    const auto& row = r.rows[i];
    log << fmt::format("ablate: {:>2}. {:<32} DEV {}{}\n", i + 1, row.spec.name(),
                       pct(100 * row.dev_accuracy),
                       row.test_accuracy ? fmt::format("  TEST {}", pct(100 * *row.test_accuracy))
                                         : std::string());
  }
  log << fmt::format("ablate: majority baseline {} on {}\n", pct(100 * r.majority.accuracy),
                     r.evaluated_on);
}

}  // namespace genpower
