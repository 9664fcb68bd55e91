// Copyright 2026 The accbound Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "error.hpp"
#include "rng.hpp"
#include "text.hpp"

namespace accbound {

std::vector<Label> gold_labels(const std::vector<PredictionRecord>& records) {
  std::vector<Label> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.is_correct() ? Label::kCorrect : Label::kIncorrect);
  return out;
}

namespace {

bool all_have_gold(const std::vector<PredictionRecord>& records) {
  return !records.empty() &&
         std::all_of(records.begin(), records.end(), [](const auto& r) { return r.gold.has_value(); });
}

void check_alignment(const VerdictMatrix& matrix, const std::vector<PredictionRecord>& records) {
  if (matrix.instances() != records.size()) {
    fail(ErrorKind::kValidation, "verdict matrix and records differ in instance count");
  }
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (matrix.instance_ids()[i] != records[i].id) {
      fail(ErrorKind::kValidation, "verdict matrix column " + std::to_string(i) +
                                       " does not match record '" + records[i].id + "'");
    }
  }
}

}  // namespace

SplitReport evaluate_split(std::string name, const VerdictMatrix& matrix,
                           const std::vector<PredictionRecord>& records,
                           const EvaluationOptions& options) {
  check_alignment(matrix, records);
  SplitReport report;
  report.name = std::move(name);
  report.bounds = bounds(matrix);
  if (options.bootstrap_samples > 0) {
    attach_bootstrap(report.bounds, matrix, options.bootstrap_samples, options.alpha,
                     options.seed);
  }
  if (all_have_gold(records)) {
    const std::vector<Label> gold = gold_labels(records);
    report.gold = predicted_accuracy(gold);
    RecallSummary recall;
    for (std::size_t m = 0; m < matrix.members(); ++m) {
      recall.members.push_back(confusion(member_labels(matrix, m), gold));
    }
    recall.upper = confusion(ensemble_correct_labels(matrix), gold);
    recall.lower = confusion(ensemble_incorrect_labels(matrix), gold);
    report.recall = std::move(recall);
    std::vector<std::size_t> sizes;
    for (std::size_t k : options.subset_sizes) {
      if (k <= records.size()) sizes.push_back(k);
    }
    if (!sizes.empty()) {
      report.subsets =
          subset_robustness(matrix, gold, sizes, options.resamples, mix_seed(options.seed, 0x7375));
    }
  }
  return report;
}

BaselineEstimates estimate_baselines(const std::vector<PredictionRecord>& test,
                                     const std::vector<PredictionRecord>* dev,
                                     const std::vector<PredictionRecord>* calib,
                                     const std::optional<RecallSummary>& recall, double gamma) {
  const ConfidenceSet test_conf = ConfidenceSet::from_records(test);
  BaselineEstimates b;
  b.gamma = gamma;
  b.maxprob = maxprob_estimate(test_conf, gamma);
  b.avg_confidence = avg_confidence(test_conf);
  if (dev && !dev->empty()) {
    const ConfidenceSet dev_conf = ConfidenceSet::from_records(*dev);
    if (dev_conf.gold_correct) {
      b.doc = doc_estimate(dev_conf.gold_accuracy(), avg_confidence(dev_conf), b.avg_confidence);
    }
  }
  if (calib && !calib->empty()) {
    const ConfidenceSet calib_conf = ConfidenceSet::from_records(*calib);
    if (calib_conf.gold_correct) {
      b.atc_gamma = atc_fit(calib_conf);
      b.atc = atc_estimate(test_conf, *b.atc_gamma);
    }
  }
  if (recall && test_conf.gold_correct) {
    const auto cr = correct_recall(recall->upper);
    const auto ir = incorrect_recall(recall->lower);
    if (cr && ir) b.oracle = maxprob_oracle_bounds(test_conf, *cr, *ir);
  }
  return b;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

nlohmann::ordered_json optional_number(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

nlohmann::ordered_json interval_json(const Interval& i) { return {i.lo, i.hi}; }

nlohmann::ordered_json confusion_json(const Confusion& c) {
  nlohmann::ordered_json j;
  j["tc"] = c.tc;
  j["fc"] = c.fc;
  j["ti"] = c.ti;
  j["fi"] = c.fi;
  j["correct_recall"] = optional_number(correct_recall(c));
  j["incorrect_recall"] = optional_number(incorrect_recall(c));
  j["correct_precision"] = optional_number(correct_precision(c));
  j["incorrect_precision"] = optional_number(incorrect_precision(c));
  return j;
}

}  // namespace

nlohmann::ordered_json to_json(const SplitReport& r) {
  nlohmann::ordered_json j;
  j["split"] = r.name;
  j["n_instances"] = r.bounds.n_instances;
  j["upper"] = r.bounds.upper;
  j["lower"] = r.bounds.lower;
  j["mean_discrim"] = r.bounds.mean_discrim;
  j["mean_bounds"] = r.bounds.mean_bounds;
  j["per_member_acc"] = r.bounds.per_member_acc;
  nlohmann::ordered_json ci = nlohmann::ordered_json::array();
  for (const auto& c : r.bounds.ci) ci.push_back(c ? interval_json(*c) : nlohmann::ordered_json(nullptr));
  j["ci"] = std::move(ci);
  if (r.gold) {
    j["gold"] = *r.gold;
    nlohmann::ordered_json ae;
    ae["mean_discrim"] = absolute_error(*r.gold, r.bounds.mean_discrim);
    ae["mean_bounds"] = absolute_error(*r.gold, r.bounds.mean_bounds);
    j["ae"] = std::move(ae);
    j["gold_within_bounds"] = r.bounds.lower <= *r.gold && *r.gold <= r.bounds.upper;
  }
  if (r.recall) {
    nlohmann::ordered_json rec;
    nlohmann::ordered_json members = nlohmann::ordered_json::array();
    for (const auto& c : r.recall->members) members.push_back(confusion_json(c));
    rec["members"] = std::move(members);
    rec["upper"] = confusion_json(r.recall->upper);
    rec["lower"] = confusion_json(r.recall->lower);
    j["recall"] = std::move(rec);
  }
  if (r.baselines) {
    const auto& b = *r.baselines;
    nlohmann::ordered_json bj;
    bj["gamma"] = b.gamma;
    bj["maxprob"] = b.maxprob;
    bj["avg_confidence"] = b.avg_confidence;
    bj["doc"] = optional_number(b.doc);
    bj["atc"] = optional_number(b.atc);
    bj["atc_gamma"] = optional_number(b.atc_gamma);
    if (b.oracle) {
      nlohmann::ordered_json o;
      o["upper"] = b.oracle->upper;
      o["lower"] = b.oracle->lower;
      o["mean"] = (b.oracle->upper + b.oracle->lower) / 2.0;
      o["gamma_upper"] = b.oracle->gamma_upper;
      o["gamma_lower"] = b.oracle->gamma_lower;
      bj["maxprob_oracle"] = std::move(o);
    } else {
      bj["maxprob_oracle"] = nullptr;
    }
    j["baselines"] = std::move(bj);
  }
  if (!r.subsets.empty()) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& s : r.subsets) {
      nlohmann::ordered_json row;
      row["size"] = s.size;
      row["gold"] = interval_json(s.gold);
      row["lower"] = interval_json(s.lower);
      row["upper"] = interval_json(s.upper);
      rows.push_back(std::move(row));
    }
    j["subsets"] = std::move(rows);
  }
  return j;
}

nlohmann::ordered_json to_json(const std::vector<SplitReport>& reports) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json splits = nlohmann::ordered_json::array();
  for (const auto& r : reports) splits.push_back(to_json(r));
  j["splits"] = std::move(splits);
  return j;
}

// ---------------------------------------------------------------------------
// Text tables

namespace {

std::string pct(double fraction) { return format_fixed(100.0 * fraction, 1); }

class TextTable {
 public:
  explicit TextTable(std::vector<std::string> header) { rows_.push_back(std::move(header)); }
  void add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }
  void rule() { rows_.emplace_back(); }

  std::string str() const {
    std::vector<std::size_t> width;
    for (const auto& row : rows_) {
      if (width.size() < row.size()) width.resize(row.size(), 0);
      for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
    }
    std::size_t total = 0;
    for (std::size_t w : width) total += w + 2;
    std::ostringstream out;
    for (const auto& row : rows_) {
      if (row.empty()) {
        out << std::string(total, '-') << '\n';
        continue;
      }
      std::string line;
      for (std::size_t c = 0; c < row.size(); ++c) {
        const std::string& cell = row[c];
        if (c == 0) {
          line += cell + std::string(width[c] - cell.size(), ' ');
        } else {
          line += "  " + std::string(width[c] - cell.size(), ' ') + cell;
        }
      }
      out << line << '\n';
    }
    return out.str();
  }

 private:
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace

std::string render_table(const std::vector<SplitReport>& reports) {
  std::vector<std::string> header{"Method"};
  for (const auto& r : reports) {
    header.push_back(r.name + " Acc");
    if (r.gold) header.push_back(r.name + " AE");
  }
  TextTable t(header);

  // cell(r) yields the accuracy for one split; `point` says whether an AE
  // column applies.
  auto row = [&](const std::string& label, auto&& value, bool point) {
    std::vector<std::string> cells{label};
    for (const auto& r : reports) {
      const std::optional<double> v = value(r);
      cells.push_back(v ? pct(*v) : "-");
      if (r.gold) cells.push_back(v && point ? pct(absolute_error(*r.gold, *v)) : "-");
    }
    t.add(std::move(cells));
  };

  const bool any_baselines =
      std::any_of(reports.begin(), reports.end(), [](const auto& r) { return r.baselines.has_value(); });
  if (any_baselines) {
    auto b = [](const SplitReport& r) { return r.baselines; };
    row("Maxprob", [&](const SplitReport& r) -> std::optional<double> {
      return b(r) ? std::optional(b(r)->maxprob) : std::nullopt; }, true);
    row("AC", [&](const SplitReport& r) -> std::optional<double> {
      return b(r) ? std::optional(b(r)->avg_confidence) : std::nullopt; }, true);
    row("DOC", [&](const SplitReport& r) -> std::optional<double> {
      return b(r) ? b(r)->doc : std::nullopt; }, true);
    row("ATC", [&](const SplitReport& r) -> std::optional<double> {
      return b(r) ? b(r)->atc : std::nullopt; }, true);
    const bool any_oracle = std::any_of(reports.begin(), reports.end(), [](const auto& r) {
      return r.baselines && r.baselines->oracle.has_value();
    });
    if (any_oracle) {
      t.rule();
      auto oracle = [](const SplitReport& r) -> std::optional<OracleBounds> {
        return r.baselines ? r.baselines->oracle : std::nullopt;
      };
      row("Maxprob (Oracle) Upper", [&](const SplitReport& r) -> std::optional<double> {
        return oracle(r) ? std::optional(oracle(r)->upper) : std::nullopt; }, false);
      row("Maxprob (Oracle) Lower", [&](const SplitReport& r) -> std::optional<double> {
        return oracle(r) ? std::optional(oracle(r)->lower) : std::nullopt; }, false);
      row("Maxprob (Oracle) Mean", [&](const SplitReport& r) -> std::optional<double> {
        if (!oracle(r)) return std::nullopt;
        return (oracle(r)->upper + oracle(r)->lower) / 2.0; }, true);
    }
    t.rule();
  }
  row("Mean_discrim", [](const SplitReport& r) -> std::optional<double> {
    return r.bounds.mean_discrim; }, true);
  row("Upper", [](const SplitReport& r) -> std::optional<double> { return r.bounds.upper; }, false);
  row("Lower", [](const SplitReport& r) -> std::optional<double> { return r.bounds.lower; }, false);
  row("Mean_bounds", [](const SplitReport& r) -> std::optional<double> {
    return r.bounds.mean_bounds; }, true);
  if (std::any_of(reports.begin(), reports.end(), [](const auto& r) { return r.gold.has_value(); })) {
    t.rule();
    row("Gold", [](const SplitReport& r) { return r.gold; }, true);
  }
  return t.str();
}

std::string render_recall_table(const std::vector<SplitReport>& reports) {
  std::vector<std::string> header{"Verdict source"};
  for (const auto& r : reports) {
    if (!r.recall) continue;
    header.push_back(r.name + " CR");
    header.push_back(r.name + " IR");
  }
  TextTable t(header);
  auto fmt = [](const std::optional<double>& v) { return v ? pct(*v) : std::string("n/a"); };
  std::size_t members = 0;
  for (const auto& r : reports) {
    if (r.recall) members = std::max(members, r.recall->members.size());
  }
  auto add = [&](const std::string& label, auto&& pick) {
    std::vector<std::string> cells{label};
    for (const auto& r : reports) {
      if (!r.recall) continue;
      const Confusion* c = pick(*r.recall);
      cells.push_back(c ? fmt(correct_recall(*c)) : "-");
      cells.push_back(c ? fmt(incorrect_recall(*c)) : "-");
    }
    t.add(std::move(cells));
  };
  for (std::size_t m = 0; m < members; ++m) {
    add("member " + std::to_string(m), [m](const RecallSummary& s) -> const Confusion* {
      return m < s.members.size() ? &s.members[m] : nullptr;
    });
  }
  add("Upper (ensemble_correct)", [](const RecallSummary& s) { return &s.upper; });
  add("Lower (ensemble_incorrect)", [](const RecallSummary& s) { return &s.lower; });
  return t.str();
}

std::string render_subset_table(const SplitReport& report) {
  TextTable t({"Size", "Gold 95%", "Lower 95%", "Upper 95%"});
  auto iv = [](const Interval& i) { return pct(i.lo) + " - " + pct(i.hi); };
  for (const auto& s : report.subsets) {
    t.add({std::to_string(s.size), iv(s.gold), iv(s.lower), iv(s.upper)});
  }
  return t.str();
}

std::string render_report(const std::vector<SplitReport>& reports) {
  std::ostringstream out;
  out << render_table(reports);
  if (std::any_of(reports.begin(), reports.end(), [](const auto& r) { return r.recall.has_value(); })) {
    out << '\n' << render_recall_table(reports);
  }
  for (const auto& r : reports) {
    if (!r.subsets.empty()) out << '\n' << r.name << " subsets\n" << render_subset_table(r);
  }
  return out.str();
}

void write_report(const std::vector<SplitReport>& reports, const std::filesystem::path& out_dir,
                  const nlohmann::ordered_json& extra) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) fail(ErrorKind::kIo, "cannot create '" + out_dir.string() + "': " + ec.message());
  nlohmann::ordered_json report = to_json(reports);
  for (const auto& [key, value] : extra.items()) report[key] = value;
  std::ofstream json(out_dir / "report.json");
  json << report.dump(2) << '\n';
  std::ofstream txt(out_dir / "report.txt");
  txt << render_report(reports);
  if (!json || !txt) fail(ErrorKind::kIo, "cannot write report under '" + out_dir.string() + "'");
}

// ---------------------------------------------------------------------------
// Synthetic task and end-to-end run

SynthOutput synthesize(const SynthConfig& config) {
  if (config.beam < 1) fail(ErrorKind::kInvalidArgument, "beam must be at least 1");
  SynthOutput out;
  synth::TaskConfig task_config = config.task;
  task_config.seed = config.seed;
  out.task = synth::generate_task(task_config);

  const auto checkpoints =
      synth::checkpoint_sequence(mix_seed(config.seed, 11), config.checkpoint_rates, out.task.lexicon);
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    out.checkpoint_dumps.push_back(
        synth::run_parser(checkpoints[i], out.task.train, config.beam, "ckpt" + std::to_string(i)));
  }

  // The final parser is one model; compositionally novel inputs raise its
  // per-step error rate.
  synth::ParserModel final_id;
  final_id.error_rate = config.parser_error_id;
  final_id.seed = mix_seed(config.seed, 12);
  final_id.lexicon = out.task.lexicon;
  synth::ParserModel final_ood = final_id;
  final_ood.error_rate = config.parser_error_ood;

  out.train = synth::run_parser(final_id, out.task.train, config.beam, "train");
  out.dev = synth::run_parser(final_id, out.task.dev, config.beam, "dev");
  out.test_id = synth::run_parser(final_id, out.task.test_id, config.beam, "id");
  out.test_ood = synth::run_parser(final_ood, out.task.test_ood, config.beam, "ood");
  return out;
}

void write_synth(const SynthOutput& out, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) fail(ErrorKind::kIo, "cannot create '" + out_dir.string() + "': " + ec.message());
  write_records(out.train, out_dir / "train.jsonl");
  write_records(out.dev, out_dir / "dev.jsonl");
  write_records(out.test_id, out_dir / "test_id.jsonl");
  write_records(out.test_ood, out_dir / "test_ood.jsonl");
  for (std::size_t i = 0; i < out.checkpoint_dumps.size(); ++i) {
    write_records(out.checkpoint_dumps[i], out_dir / ("ckpt_" + std::to_string(i) + ".jsonl"));
  }
}

TrainingSet build_training_set(const std::vector<GoldPair>& gold_pairs,
                               const std::vector<std::vector<PredictionRecord>>& dumps,
                               const HarvestConfig& config) {
  config.validate();
  std::vector<TrainingPair> negatives;
  if (config.method != HarvestMethod::kRandom) {
    negatives = harvest_model_negatives(dumps, make_gold_map(gold_pairs), config);
  }
  if (config.method != HarvestMethod::kModel) {
    auto noise = harvest_random_negatives(gold_pairs, config);
    negatives.insert(negatives.end(), std::make_move_iterator(noise.begin()),
                     std::make_move_iterator(noise.end()));
  }
  return assemble_training_set(gold_pairs, negatives, config);
}

void E2EConfig::apply_seed(std::uint64_t s) {
  seed = s;
  synth.seed = s;
  harvest.seed = mix_seed(s, 13);
  discriminator.seed = mix_seed(s, 14);
  evaluation.seed = mix_seed(s, 15);
}

E2EResult run_e2e(const E2EConfig& config, const std::filesystem::path& out_dir) {
  const SynthOutput data = synthesize(config.synth);

  std::vector<GoldPair> gold_pairs;
  for (const auto& ex : data.task.train) gold_pairs.emplace_back(ex.sentence, ex.gold);

  E2EResult result;
  result.training = build_training_set(gold_pairs, data.checkpoint_dumps, config.harvest);
  const Ensemble ensemble =
      train_ensemble(result.training.pairs, config.discriminator, config.members);

  auto evaluate = [&](const std::string& name, const std::vector<PredictionRecord>& split) {
    SplitReport r = evaluate_split(name, predict_matrix(ensemble, split), split, config.evaluation);
    r.baselines = estimate_baselines(split, &data.dev, &data.dev, r.recall, config.evaluation.gamma);
    return r;
  };
  result.splits.push_back(evaluate("ID", data.test_id));
  result.splits.push_back(evaluate("OOD", data.test_ood));

  result.table = render_report(result.splits);

  if (!out_dir.empty()) {
    write_synth(data, out_dir);
    write_pairs(result.training.pairs, out_dir / "pairs.jsonl");
    save_ensemble(ensemble, out_dir / "model.txt");
    nlohmann::ordered_json extra;
    extra["training"] = {{"pairs", result.training.pairs.size()},
                         {"scarcity", result.training.scarcity},
                         {"dropped_empty", result.training.dropped_empty},
                         {"dropped_duplicate", result.training.dropped_duplicate}};
    write_report(result.splits, out_dir, extra);
  }
  return result;
}

}  // namespace accbound
