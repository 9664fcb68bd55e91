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

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "accbound/accbound.h"

namespace {

constexpr int kExitError = 1;
constexpr int kExitUsage = 2;

struct Failure {
  int code;
};

void check(accb_status status, const std::string& what) {
  if (status == ACCB_OK) return;
  std::cerr << "accbound: " << what << ": " << accb_last_error() << " ("
            << accb_status_name(status) << ")\n";
  throw Failure{kExitError};
}

template <typename T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using Records = std::unique_ptr<accb_records, Deleter<accb_records, accb_records_free>>;
using EnsemblePtr = std::unique_ptr<accb_ensemble, Deleter<accb_ensemble, accb_ensemble_free>>;
using Verdicts = std::unique_ptr<accb_verdicts, Deleter<accb_verdicts, accb_verdicts_free>>;
using Report = std::unique_ptr<accb_report, Deleter<accb_report, accb_report_free>>;

struct OwnedString {
  char* s = nullptr;
  ~OwnedString() { accb_string_free(s); }
};

Records read_records(const std::string& path) {
  accb_records* r = nullptr;
  check(accb_records_read(path.c_str(), &r), "reading " + path);
  return Records(r);
}

Records maybe_read(const std::string& path) { return path.empty() ? Records() : read_records(path); }

std::filesystem::path ensure_dir(const std::string& out) {
  std::error_code ec;
  std::filesystem::create_directories(out, ec);
  if (ec) {
    std::cerr << "accbound: cannot create " << out << ": " << ec.message() << "\n";
    throw Failure{kExitError};
  }
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path);
  f << text;
  if (!f) {
    std::cerr << "accbound: cannot write " << path.string() << "\n";
    throw Failure{kExitError};
  }
}

std::string table_of(const accb_report* report) {
  OwnedString t;
  check(accb_report_table(report, &t.s), "rendering report");
  return t.s;
}

std::string json_of(const accb_report* report) {
  OwnedString t;
  check(accb_report_json(report, &t.s), "serializing report");
  return t.s;
}

struct Options {
  std::uint64_t seed = 7;
  std::string out = "accbound-out";
  bool verbose = false;

  // synth
  std::size_t beam = 4;
  std::size_t n_train = 1000;
  std::size_t n_test = 500;
  std::size_t vocab = 40;
  std::size_t depth = 3;

  // harvest
  std::string gold;
  std::vector<std::string> dumps;
  double ratio = 3.0;
  std::string method = "comb";
  double noise_p = 0.2;

  // train
  std::string pairs;
  std::size_t members = 5;
  std::size_t epochs = 0;  // 0: library default

  // estimate / report / baselines
  std::string records;
  std::string model;
  std::string verdicts;
  std::string dev;
  std::string calib;
  double gamma = 0.5;
  std::vector<std::size_t> subset_sizes;
  std::size_t resamples = 50;
  std::size_t bootstrap = 1000;
};

accb_estimate_options estimate_options(const Options& o) {
  accb_estimate_options e;
  accb_estimate_options_default(&e);
  e.seed = o.seed;
  e.bootstrap_samples = o.bootstrap;
  e.subset_sizes = o.subset_sizes.empty() ? nullptr : o.subset_sizes.data();
  e.n_subset_sizes = o.subset_sizes.size();
  e.resamples = o.resamples;
  return e;
}

accb_harvest_options harvest_options(const Options& o, bool noise_given) {
  accb_harvest_options h;
  accb_harvest_options_default(&h);
  h.seed = o.seed;
  h.ratio = o.ratio;
  check(accb_harvest_method_parse(o.method.c_str(), &h.method), "--method");
  if (noise_given) h.insert_p = h.delete_p = o.noise_p;
  return h;
}

Verdicts verdicts_for(const Options& o, const accb_records* records) {
  accb_verdicts* v = nullptr;
  if (!o.verdicts.empty()) {
    check(accb_verdicts_read(o.verdicts.c_str(), records, &v), "reading " + o.verdicts);
  } else {
    accb_ensemble* e = nullptr;
    check(accb_ensemble_load(o.model.c_str(), &e), "loading " + o.model);
    EnsemblePtr ensemble(e);
    check(accb_verdicts_predict(ensemble.get(), records, &v), "predicting verdicts");
  }
  return Verdicts(v);
}

int run_synth(const Options& o) {
  accb_synth_options s;
  accb_synth_options_default(&s);
  s.seed = o.seed;
  s.beam = o.beam;
  s.n_train = o.n_train;
  s.n_test = o.n_test;
  s.vocab_size = o.vocab;
  s.grammar_depth = o.depth;
  check(accb_synth_run(&s, o.out.c_str()), "synth");
  std::cout << "wrote synthetic task to " << o.out << "\n";
  return 0;
}

int run_harvest(const Options& o, bool noise_given) {
  const accb_harvest_options h = harvest_options(o, noise_given);
  std::vector<const char*> dumps;
  for (const auto& d : o.dumps) dumps.push_back(d.c_str());
  const auto path = ensure_dir(o.out) / "pairs.jsonl";
  accb_harvest_stats stats{};
  check(accb_harvest_run(&h, o.gold.c_str(), dumps.data(), dumps.size(), path.string().c_str(),
                         &stats),
        "harvest");
  std::cout << "pairs " << stats.pairs << " (positives " << stats.positives << ", negatives "
            << stats.negatives << ", scarcity " << stats.scarcity << ")\n";
  if (o.verbose) {
    std::cerr << "dropped empty " << stats.dropped_empty << ", dropped duplicate "
              << stats.dropped_duplicate << "\n";
  }
  return 0;
}

int run_train(const Options& o) {
  accb_train_options t;
  accb_train_options_default(&t);
  t.seed = o.seed;
  t.members = o.members;
  if (o.epochs > 0) t.epochs = o.epochs;
  accb_ensemble* e = nullptr;
  check(accb_ensemble_train(o.pairs.c_str(), &t, &e), "train");
  EnsemblePtr ensemble(e);
  const auto path = ensure_dir(o.out) / "model.txt";
  check(accb_ensemble_save(ensemble.get(), path.string().c_str()), "saving model");
  std::cout << "trained " << accb_ensemble_members(ensemble.get()) << " members, model at "
            << path.string() << "\n";
  return 0;
}

Report build_report(const Options& o, accb_records* records, const accb_verdicts* verdicts,
                    bool with_baselines) {
  accb_report* r = nullptr;
  check(accb_report_create(&r), "creating report");
  Report report(r);
  const accb_estimate_options e = estimate_options(o);
  check(accb_report_add_split(report.get(), "test", verdicts, records, &e), "estimate");
  if (with_baselines) {
    const Records dev = maybe_read(o.dev);
    const Records calib = maybe_read(o.calib);
    check(accb_report_add_baselines(report.get(), records, dev.get(), calib.get(), o.gamma),
          "baselines");
  }
  return report;
}

int run_estimate(const Options& o) {
  Records records = read_records(o.records);
  const Verdicts verdicts = verdicts_for(o, records.get());
  const Report report = build_report(o, records.get(), verdicts.get(), false);
  const auto dir = ensure_dir(o.out);
  check(accb_report_save(report.get(), dir.string().c_str()), "writing report");
  check(accb_verdicts_write(verdicts.get(), (dir / "verdicts.jsonl").string().c_str()),
        "writing verdicts");
  std::cout << table_of(report.get());
  return 0;
}

int run_baselines(const Options& o) {
  const Records test = read_records(o.records);
  const Records dev = maybe_read(o.dev);
  const Records calib = maybe_read(o.calib);
  OwnedString json;
  check(accb_baselines_json(test.get(), dev.get(), calib.get(), o.gamma, &json.s), "baselines");
  write_text(ensure_dir(o.out) / "baselines.json", std::string(json.s) + "\n");
  std::cout << json.s << "\n";
  return 0;
}

int run_report(const Options& o) {
  Records records = read_records(o.records);
  if (!o.gold.empty()) {
    const Records gold = read_records(o.gold);
    check(accb_records_attach_gold(records.get(), gold.get()), "attaching gold");
  }
  const Verdicts verdicts = verdicts_for(o, records.get());
  const Report report = build_report(o, records.get(), verdicts.get(), true);
  if (o.verbose) std::cerr << json_of(report.get()) << "\n";
  std::cout << table_of(report.get());
  return 0;
}

int run_e2e(const Options& o, bool noise_given) {
  accb_e2e_options e;
  accb_e2e_options_default(&e);
  e.seed = o.seed;
  e.synth.beam = o.beam;
  e.synth.n_train = o.n_train;
  e.synth.n_test = o.n_test;
  e.synth.vocab_size = o.vocab;
  e.synth.grammar_depth = o.depth;
  e.harvest = harvest_options(o, noise_given);
  e.train.members = o.members;
  if (o.epochs > 0) e.train.epochs = o.epochs;
  e.estimate = estimate_options(o);
  e.gamma = o.gamma;
  const auto dir = ensure_dir(o.out);
  accb_report* r = nullptr;
  check(accb_e2e_run(&e, dir.string().c_str(), &r), "e2e");
  const Report report(r);
  std::cout << table_of(report.get());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Accuracy bounds for sequence predictors from discriminator ensembles", "accbound"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--seed", o.seed, "Seed for every random choice")->capture_default_str();
  app.add_option("--out", o.out, "Output directory")->capture_default_str();
  app.add_flag("-v,--verbose", o.verbose, "Extra diagnostics on stderr");
  app.set_version_flag("--version", std::string(accb_version()));

  auto* synth = app.add_subcommand("synth", "Generate the synthetic task and parser outputs");
  auto* harvest = app.add_subcommand("harvest", "Build discriminator training pairs");
  auto* train = app.add_subcommand("train", "Train a discriminator ensemble");
  auto* estimate = app.add_subcommand("estimate", "Accuracy bounds from ensemble verdicts");
  auto* baselines = app.add_subcommand("baselines", "Confidence-based accuracy estimates");
  auto* report = app.add_subcommand("report", "Table of bounds and baselines");
  auto* e2e = app.add_subcommand("e2e", "Full pipeline on the synthetic task");

  for (auto* sub : {synth, e2e}) {
    sub->add_option("--beam", o.beam, "Beam size")->capture_default_str();
    sub->add_option("--n-train", o.n_train, "Training sentences")->capture_default_str();
    sub->add_option("--n-test", o.n_test, "Sentences per test split")->capture_default_str();
    sub->add_option("--vocab", o.vocab, "Lexicon size")->capture_default_str();
    sub->add_option("--depth", o.depth, "Maximum clause nesting")->capture_default_str();
  }
  std::vector<CLI::Option*> noise_flags;
  for (auto* sub : {harvest, e2e}) {
    sub->add_option("--ratio", o.ratio, "Negatives per positive")->capture_default_str();
    sub->add_option("--method", o.method, "Negative source")
        ->check(CLI::IsMember({"model", "random", "comb"}))
        ->capture_default_str();
    noise_flags.push_back(sub->add_option("--noise-p", o.noise_p,
                                          "Per-conjunct insert and delete probability"));
  }
  harvest->add_option("--gold", o.gold, "Records with gold sequences")->required();
  harvest->add_option("--dumps", o.dumps, "Checkpoint prediction dumps");
  train->add_option("--pairs", o.pairs, "Training pairs")->required();
  for (auto* sub : {train, e2e}) {
    sub->add_option("--members", o.members, "Ensemble size")->capture_default_str();
    sub->add_option("--epochs", o.epochs, "Training epochs");
  }
  for (auto* sub : {estimate, report, baselines}) {
    sub->add_option("--records", o.records, "Prediction records")->required();
  }
  for (auto* sub : {estimate, report}) {
    sub->add_option("--model", o.model, "Model file");
    sub->add_option("--verdicts", o.verdicts, "External verdicts file");
  }
  for (auto* sub : {estimate, report, e2e}) {
    sub->add_option("--subset-sizes", o.subset_sizes, "Subset sizes for robustness tables")
        ->delimiter(',');
    sub->add_option("--resamples", o.resamples, "Resamples per subset size")
        ->capture_default_str();
    sub->add_option("--bootstrap", o.bootstrap, "Bootstrap resamples per member")
        ->capture_default_str();
  }
  for (auto* sub : {report, baselines, e2e}) {
    sub->add_option("--gamma", o.gamma, "Maxprob threshold")->capture_default_str();
  }
  for (auto* sub : {report, baselines}) {
    sub->add_option("--dev", o.dev, "Labeled dev records for DOC");
    sub->add_option("--calib", o.calib, "Labeled calibration records for ATC");
  }
  report->add_option("--gold", o.gold, "Records whose gold sequences are attached by id");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "accbound: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  bool noise_given = false;
  for (const auto* f : noise_flags) noise_given |= f->count() > 0;

  try {
    if (*synth) return run_synth(o);
    if (*harvest) return run_harvest(o, noise_given);
    if (*train) return run_train(o);
    if (*estimate || *report) {
      if (o.model.empty() == o.verdicts.empty()) {
        std::cerr << "accbound: exactly one of --model or --verdicts is required\n\n"
                  << (*estimate ? estimate : report)->help();
        return kExitUsage;
      }
      return *estimate ? run_estimate(o) : run_report(o);
    }
    if (*baselines) return run_baselines(o);
    if (*e2e) return run_e2e(o, noise_given);
  } catch (const Failure& f) {
    return f.code;
  }
  return kExitUsage;
}
