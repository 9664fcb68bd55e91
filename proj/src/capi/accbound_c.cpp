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

#include "accbound/accbound.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <limits>
#include <memory>
#include <new>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "error.hpp"
#include "pipeline.hpp"

struct accb_records {
  std::vector<accbound::PredictionRecord> records;
};

struct accb_ensemble {
  accbound::Ensemble ensemble;
};

struct accb_verdicts {
  accbound::VerdictMatrix matrix;
};

struct accb_report {
  std::vector<accbound::SplitReport> splits;
  nlohmann::ordered_json extra = nlohmann::ordered_json::object();
};

namespace {

using accbound::ErrorKind;

thread_local std::string g_last_error;

accb_status to_status(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return ACCB_ERR_INVALID_ARGUMENT;
    case ErrorKind::kParse: return ACCB_ERR_PARSE;
    case ErrorKind::kValidation: return ACCB_ERR_VALIDATION;
    case ErrorKind::kIo: return ACCB_ERR_IO;
    case ErrorKind::kGeneration: return ACCB_ERR_GENERATION;
    case ErrorKind::kStructure: return ACCB_ERR_STRUCTURE;
    case ErrorKind::kTraining: return ACCB_ERR_TRAINING;
    case ErrorKind::kUndefined: return ACCB_ERR_UNDEFINED;
  }
  return ACCB_ERR_INTERNAL;
}

template <typename F>
accb_status guarded(F&& body) {
  try {
    body();
    g_last_error.clear();
    return ACCB_OK;
  } catch (const accbound::Error& e) {
    g_last_error = e.what();
    return to_status(e.kind());
  } catch (const nlohmann::json::exception& e) {
    g_last_error = e.what();
    return ACCB_ERR_PARSE;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return ACCB_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return ACCB_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return ACCB_ERR_INTERNAL;
  }
}

void require(const void* p, const char* what) {
  if (p == nullptr) {
    accbound::fail(ErrorKind::kInvalidArgument, std::string(what) + " must not be NULL");
  }
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

accbound::HarvestMethod to_method(accb_harvest_method m) {
  switch (m) {
    case ACCB_HARVEST_MODEL: return accbound::HarvestMethod::kModel;
    case ACCB_HARVEST_RANDOM: return accbound::HarvestMethod::kRandom;
    case ACCB_HARVEST_COMB: return accbound::HarvestMethod::kComb;
  }
  accbound::fail(ErrorKind::kInvalidArgument, "unknown harvest method");
}

accbound::SynthConfig to_config(const accb_synth_options& o) {
  accbound::SynthConfig c;
  c.task.n_train = o.n_train;
  c.task.n_test = o.n_test;
  c.task.n_dev = o.n_dev;
  c.task.grammar_depth = o.grammar_depth;
  c.task.vocab_size = o.vocab_size;
  c.beam = o.beam;
  c.parser_error_id = o.parser_error_id;
  c.parser_error_ood = o.parser_error_ood;
  c.seed = o.seed;
  return c;
}

accbound::HarvestConfig to_config(const accb_harvest_options& o) {
  accbound::HarvestConfig c;
  c.ratio_neg_pos = o.ratio;
  c.method = to_method(o.method);
  c.insert_p = o.insert_p;
  c.delete_p = o.delete_p;
  c.per_instance_neg_cap = o.per_instance_neg_cap;
  c.seed = o.seed;
  return c;
}

accbound::DiscriminatorSpec to_spec(const accb_train_options& o) {
  accbound::DiscriminatorSpec s;
  s.n_features = o.n_features;
  s.epochs = o.epochs;
  s.learning_rate = o.learning_rate;
  s.bias_learning_rate = o.bias_learning_rate;
  s.l2 = o.l2;
  s.overlap = o.overlap != 0;
  s.seed = o.seed;
  return s;
}

accbound::EvaluationOptions to_options(const accb_estimate_options& o, double gamma) {
  accbound::EvaluationOptions e;
  e.seed = o.seed;
  e.bootstrap_samples = o.bootstrap_samples;
  e.alpha = o.alpha;
  e.gamma = gamma;
  if (o.n_subset_sizes > 0) {
    require(o.subset_sizes, "subset_sizes");
    e.subset_sizes.assign(o.subset_sizes, o.subset_sizes + o.n_subset_sizes);
  }
  e.resamples = o.resamples;
  return e;
}

const accbound::SplitReport& split_at(const accb_report* report, std::size_t split) {
  require(report, "report");
  if (split >= report->splits.size()) {
    accbound::fail(ErrorKind::kInvalidArgument, "split index out of range");
  }
  return report->splits[split];
}

}  // namespace

extern "C" {

const char* accb_version(void) { return "0.1.0"; }

const char* accb_status_name(accb_status status) {
  switch (status) {
    case ACCB_OK: return "ok";
    case ACCB_ERR_INVALID_ARGUMENT: return "invalid argument";
    case ACCB_ERR_PARSE: return "parse error";
    case ACCB_ERR_VALIDATION: return "validation error";
    case ACCB_ERR_IO: return "i/o error";
    case ACCB_ERR_GENERATION: return "generation error";
    case ACCB_ERR_STRUCTURE: return "structure error";
    case ACCB_ERR_TRAINING: return "training error";
    case ACCB_ERR_UNDEFINED: return "undefined quantity";
    case ACCB_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* accb_last_error(void) { return g_last_error.c_str(); }

void accb_string_free(char* s) { std::free(s); }

// ---- records

accb_status accb_records_read(const char* path, accb_records** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    auto r = std::make_unique<accb_records>();
    r->records = accbound::read_records(path);
    *out = r.release();
  });
}

accb_status accb_records_write(const accb_records* records, const char* path) {
  return guarded([&] {
    require(records, "records");
    require(path, "path");
    accbound::write_records(records->records, path);
  });
}

size_t accb_records_size(const accb_records* records) {
  return records ? records->records.size() : 0;
}

int accb_records_have_gold(const accb_records* records) {
  if (records == nullptr || records->records.empty()) return 0;
  for (const auto& r : records->records) {
    if (!r.gold) return 0;
  }
  return 1;
}

accb_status accb_records_attach_gold(accb_records* records, const accb_records* gold) {
  return guarded([&] {
    require(records, "records");
    require(gold, "gold");
    std::unordered_map<std::string, const std::string*> by_id;
    for (const auto& g : gold->records) {
      if (g.gold) by_id[g.id] = &*g.gold;
    }
    std::vector<accbound::PredictionRecord> updated = records->records;
    for (auto& r : updated) {
      const auto it = by_id.find(r.id);
      if (it == by_id.end()) {
        accbound::fail(ErrorKind::kValidation, "no gold sequence for record '" + r.id + "'");
      }
      r.gold = *it->second;
      accbound::validate(r);
    }
    records->records = std::move(updated);
  });
}

void accb_records_free(accb_records* records) { delete records; }

// ---- synth

void accb_synth_options_default(accb_synth_options* options) {
  if (options == nullptr) return;
  const accbound::SynthConfig c;
  options->seed = c.seed;
  options->n_train = c.task.n_train;
  options->n_test = c.task.n_test;
  options->n_dev = c.task.n_dev;
  options->grammar_depth = c.task.grammar_depth;
  options->vocab_size = c.task.vocab_size;
  options->beam = c.beam;
  options->parser_error_id = c.parser_error_id;
  options->parser_error_ood = c.parser_error_ood;
}

accb_status accb_synth_run(const accb_synth_options* options, const char* out_dir) {
  return guarded([&] {
    require(options, "options");
    require(out_dir, "out_dir");
    accbound::write_synth(accbound::synthesize(to_config(*options)), out_dir);
  });
}

// ---- harvest

void accb_harvest_options_default(accb_harvest_options* options) {
  if (options == nullptr) return;
  const accbound::HarvestConfig c;
  options->seed = c.seed;
  options->ratio = c.ratio_neg_pos;
  options->method = ACCB_HARVEST_COMB;
  options->insert_p = c.insert_p;
  options->delete_p = c.delete_p;
  options->per_instance_neg_cap = c.per_instance_neg_cap;
}

accb_status accb_harvest_method_parse(const char* text, accb_harvest_method* out) {
  return guarded([&] {
    require(text, "text");
    require(out, "out");
    switch (accbound::parse_method(text)) {
      case accbound::HarvestMethod::kModel: *out = ACCB_HARVEST_MODEL; break;
      case accbound::HarvestMethod::kRandom: *out = ACCB_HARVEST_RANDOM; break;
      case accbound::HarvestMethod::kComb: *out = ACCB_HARVEST_COMB; break;
    }
  });
}

accb_status accb_harvest_run(const accb_harvest_options* options, const char* gold_path,
                             const char* const* dump_paths, size_t n_dumps, const char* out_path,
                             accb_harvest_stats* stats) {
  return guarded([&] {
    require(options, "options");
    require(gold_path, "gold_path");
    require(out_path, "out_path");
    if (n_dumps > 0) require(dump_paths, "dump_paths");
    const accbound::HarvestConfig config = to_config(*options);
    if (config.method != accbound::HarvestMethod::kRandom && n_dumps == 0) {
      accbound::fail(ErrorKind::kInvalidArgument,
                     std::string("method '") + accbound::to_string(config.method) +
                         "' needs at least one checkpoint dump");
    }
    std::vector<accbound::GoldPair> gold_pairs;
    for (const auto& r : accbound::read_records(gold_path)) {
      if (!r.gold) {
        accbound::fail(ErrorKind::kValidation, "record '" + r.id + "' in gold file has no gold");
      }
      gold_pairs.emplace_back(r.input, *r.gold);
    }
    std::vector<std::vector<accbound::PredictionRecord>> dumps;
    if (config.method != accbound::HarvestMethod::kRandom) {
      for (std::size_t i = 0; i < n_dumps; ++i) {
        require(dump_paths[i], "dump path");
        dumps.push_back(accbound::read_records(dump_paths[i]));
      }
    }
    const accbound::TrainingSet set = accbound::build_training_set(gold_pairs, dumps, config);
    accbound::write_pairs(set.pairs, out_path);
    if (stats != nullptr) {
      stats->pairs = set.pairs.size();
      stats->positives = 0;
      for (const auto& p : set.pairs) stats->positives += p.label == accbound::Label::kCorrect;
      stats->negatives = stats->pairs - stats->positives;
      stats->scarcity = set.scarcity;
      stats->dropped_empty = set.dropped_empty;
      stats->dropped_duplicate = set.dropped_duplicate;
    }
  });
}

// ---- ensemble

void accb_train_options_default(accb_train_options* options) {
  if (options == nullptr) return;
  const accbound::DiscriminatorSpec s;
  options->seed = s.seed;
  options->members = 5;
  options->n_features = s.n_features;
  options->epochs = s.epochs;
  options->learning_rate = s.learning_rate;
  options->bias_learning_rate = s.bias_learning_rate;
  options->l2 = s.l2;
  options->overlap = s.overlap ? 1 : 0;
}

accb_status accb_ensemble_train(const char* pairs_path, const accb_train_options* options,
                                accb_ensemble** out) {
  return guarded([&] {
    require(pairs_path, "pairs_path");
    require(options, "options");
    require(out, "out");
    auto e = std::make_unique<accb_ensemble>();
    e->ensemble =
        accbound::train_ensemble(accbound::read_pairs(pairs_path), to_spec(*options), options->members);
    *out = e.release();
  });
}

accb_status accb_ensemble_save(const accb_ensemble* ensemble, const char* path) {
  return guarded([&] {
    require(ensemble, "ensemble");
    require(path, "path");
    accbound::save_ensemble(ensemble->ensemble, path);
  });
}

accb_status accb_ensemble_load(const char* path, accb_ensemble** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    auto e = std::make_unique<accb_ensemble>();
    e->ensemble = accbound::load_ensemble(path);
    *out = e.release();
  });
}

size_t accb_ensemble_members(const accb_ensemble* ensemble) {
  return ensemble ? ensemble->ensemble.members.size() : 0;
}

accb_status accb_ensemble_score(const accb_ensemble* ensemble, size_t member, const char* input,
                                const char* output, double* probability) {
  return guarded([&] {
    require(ensemble, "ensemble");
    require(input, "input");
    require(output, "output");
    require(probability, "probability");
    if (member >= ensemble->ensemble.members.size()) {
      accbound::fail(ErrorKind::kInvalidArgument, "member index out of range");
    }
    *probability = ensemble->ensemble.members[member].predict(input, output).probability();
  });
}

void accb_ensemble_free(accb_ensemble* ensemble) { delete ensemble; }

// ---- verdicts

accb_status accb_verdicts_predict(const accb_ensemble* ensemble, const accb_records* records,
                                  accb_verdicts** out) {
  return guarded([&] {
    require(ensemble, "ensemble");
    require(records, "records");
    require(out, "out");
    *out = new accb_verdicts{accbound::predict_matrix(ensemble->ensemble, records->records)};
  });
}

accb_status accb_verdicts_read(const char* path, const accb_records* records, accb_verdicts** out) {
  return guarded([&] {
    require(path, "path");
    require(records, "records");
    require(out, "out");
    *out = new accb_verdicts{
        accbound::matrix_from_external(accbound::read_external_verdicts(path), records->records)};
  });
}

accb_status accb_verdicts_write(const accb_verdicts* verdicts, const char* path) {
  return guarded([&] {
    require(verdicts, "verdicts");
    require(path, "path");
    accbound::write_external_verdicts(accbound::to_external(verdicts->matrix), path);
  });
}

accb_status accb_verdicts_create(const char* const* ids, size_t n_instances, size_t n_members,
                                 const double* probabilities, accb_verdicts** out) {
  return guarded([&] {
    require(out, "out");
    if (n_instances > 0) {
      require(ids, "ids");
      require(probabilities, "probabilities");
    }
    std::vector<std::string> id_list;
    for (std::size_t i = 0; i < n_instances; ++i) {
      require(ids[i], "id");
      id_list.emplace_back(ids[i]);
    }
    std::vector<std::vector<accbound::Verdict>> rows(n_members);
    for (std::size_t m = 0; m < n_members; ++m) {
      for (std::size_t i = 0; i < n_instances; ++i) {
        rows[m].emplace_back(probabilities[m * n_instances + i]);
      }
    }
    *out = new accb_verdicts{accbound::VerdictMatrix(std::move(id_list), std::move(rows))};
  });
}

size_t accb_verdicts_members(const accb_verdicts* verdicts) {
  return verdicts ? verdicts->matrix.members() : 0;
}

size_t accb_verdicts_instances(const accb_verdicts* verdicts) {
  return verdicts ? verdicts->matrix.instances() : 0;
}

accb_status accb_verdicts_bounds(const accb_verdicts* verdicts, double* lower, double* upper) {
  return guarded([&] {
    require(verdicts, "verdicts");
    require(lower, "lower");
    require(upper, "upper");
    const auto b = accbound::bounds(verdicts->matrix);
    *lower = b.lower;
    *upper = b.upper;
  });
}

void accb_verdicts_free(accb_verdicts* verdicts) { delete verdicts; }

// ---- reports

void accb_estimate_options_default(accb_estimate_options* options) {
  if (options == nullptr) return;
  const accbound::EvaluationOptions e;
  options->seed = e.seed;
  options->bootstrap_samples = e.bootstrap_samples;
  options->alpha = e.alpha;
  options->subset_sizes = nullptr;
  options->n_subset_sizes = 0;
  options->resamples = e.resamples;
}

accb_status accb_report_create(accb_report** out) {
  return guarded([&] {
    require(out, "out");
    *out = new accb_report();
  });
}

accb_status accb_report_add_split(accb_report* report, const char* name,
                                  const accb_verdicts* verdicts, const accb_records* records,
                                  const accb_estimate_options* options) {
  return guarded([&] {
    require(report, "report");
    require(name, "name");
    require(verdicts, "verdicts");
    require(records, "records");
    accb_estimate_options defaults;
    accb_estimate_options_default(&defaults);
    const auto eval = to_options(options ? *options : defaults, 0.5);
    report->splits.push_back(
        accbound::evaluate_split(name, verdicts->matrix, records->records, eval));
  });
}

accb_status accb_report_add_baselines(accb_report* report, const accb_records* test,
                                      const accb_records* dev, const accb_records* calib,
                                      double gamma) {
  return guarded([&] {
    require(report, "report");
    require(test, "test");
    if (report->splits.empty()) {
      accbound::fail(ErrorKind::kInvalidArgument, "report has no split to attach baselines to");
    }
    auto& split = report->splits.back();
    if (split.bounds.n_instances != test->records.size()) {
      accbound::fail(ErrorKind::kValidation, "baseline records do not match the last split");
    }
    split.baselines = accbound::estimate_baselines(test->records, dev ? &dev->records : nullptr,
                                                   calib ? &calib->records : nullptr, split.recall,
                                                   gamma);
  });
}

size_t accb_report_splits(const accb_report* report) {
  return report ? report->splits.size() : 0;
}

accb_status accb_report_summary(const accb_report* report, size_t split, accb_split_summary* out) {
  return guarded([&] {
    require(out, "out");
    const auto& s = split_at(report, split);
    out->n_instances = s.bounds.n_instances;
    out->lower = s.bounds.lower;
    out->upper = s.bounds.upper;
    out->mean_discrim = s.bounds.mean_discrim;
    out->mean_bounds = s.bounds.mean_bounds;
    out->has_gold = s.gold ? 1 : 0;
    out->gold = s.gold.value_or(std::numeric_limits<double>::quiet_NaN());
  });
}

accb_status accb_report_recall(const accb_report* report, size_t split, int source,
                               double* correct_recall, double* incorrect_recall) {
  return guarded([&] {
    require(correct_recall, "correct_recall");
    require(incorrect_recall, "incorrect_recall");
    const auto& s = split_at(report, split);
    if (!s.recall) accbound::fail(ErrorKind::kUndefined, "split has no gold labels");
    const accbound::Confusion* c = nullptr;
    if (source == -1) {
      c = &s.recall->upper;
    } else if (source == -2) {
      c = &s.recall->lower;
    } else if (source >= 0 && static_cast<std::size_t>(source) < s.recall->members.size()) {
      c = &s.recall->members[static_cast<std::size_t>(source)];
    } else {
      accbound::fail(ErrorKind::kInvalidArgument, "verdict source out of range");
    }
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    *correct_recall = accbound::correct_recall(*c).value_or(nan);
    *incorrect_recall = accbound::incorrect_recall(*c).value_or(nan);
  });
}

accb_status accb_report_json(const accb_report* report, char** out) {
  return guarded([&] {
    require(report, "report");
    require(out, "out");
    nlohmann::ordered_json j = accbound::to_json(report->splits);
    for (const auto& [key, value] : report->extra.items()) j[key] = value;
    *out = copy_string(j.dump(2));
  });
}

accb_status accb_report_table(const accb_report* report, char** out) {
  return guarded([&] {
    require(report, "report");
    require(out, "out");
    if (report->splits.empty()) accbound::fail(ErrorKind::kInvalidArgument, "report is empty");
    *out = copy_string(accbound::render_report(report->splits));
  });
}

accb_status accb_report_save(const accb_report* report, const char* out_dir) {
  return guarded([&] {
    require(report, "report");
    require(out_dir, "out_dir");
    if (report->splits.empty()) accbound::fail(ErrorKind::kInvalidArgument, "report is empty");
    accbound::write_report(report->splits, out_dir, report->extra);
  });
}

void accb_report_free(accb_report* report) { delete report; }

// ---- baselines

accb_status accb_baselines_json(const accb_records* test, const accb_records* dev,
                                const accb_records* calib, double gamma, char** out) {
  return guarded([&] {
    require(test, "test");
    require(out, "out");
    accbound::SplitReport holder;
    holder.name = "baselines";
    holder.baselines = accbound::estimate_baselines(
        test->records, dev ? &dev->records : nullptr, calib ? &calib->records : nullptr,
        std::nullopt, gamma);
    nlohmann::ordered_json j = accbound::to_json(holder).at("baselines");
    j["n_instances"] = test->records.size();
    *out = copy_string(j.dump(2));
  });
}

// ---- e2e

void accb_e2e_options_default(accb_e2e_options* options) {
  if (options == nullptr) return;
  const accbound::E2EConfig c;
  options->seed = c.seed;
  accb_synth_options_default(&options->synth);
  accb_harvest_options_default(&options->harvest);
  accb_train_options_default(&options->train);
  options->train.members = c.members;
  accb_estimate_options_default(&options->estimate);
  options->gamma = c.evaluation.gamma;
}

accb_status accb_e2e_run(const accb_e2e_options* options, const char* out_dir, accb_report** out) {
  return guarded([&] {
    require(options, "options");
    accbound::E2EConfig c;
    c.synth = to_config(options->synth);
    c.harvest = to_config(options->harvest);
    c.discriminator = to_spec(options->train);
    c.members = options->train.members;
    c.evaluation = to_options(options->estimate, options->gamma);
    c.apply_seed(options->seed);
    const auto result = accbound::run_e2e(c, out_dir ? std::filesystem::path(out_dir)
                                                     : std::filesystem::path());
    if (out != nullptr) {
      auto r = std::make_unique<accb_report>();
      r->splits = result.splits;
      r->extra["training"] = {{"pairs", result.training.pairs.size()},
                              {"scarcity", result.training.scarcity},
                              {"dropped_empty", result.training.dropped_empty},
                              {"dropped_duplicate", result.training.dropped_duplicate}};
      *out = r.release();
    }
  });
}

}  // extern "C"
