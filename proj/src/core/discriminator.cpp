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

#include "discriminator.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <thread>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "error.hpp"
#include "rng.hpp"
#include "text.hpp"

namespace accbound {

namespace {

constexpr std::string_view kModelHeader = "accbound-ensemble 1";
constexpr std::string_view kSeparatorToken = "<sep>";
constexpr char kBoundary = '\x1e';

bool word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

// Runs of [A-Za-z0-9_] and single punctuation characters.
std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (word_char(c)) {
      std::size_t j = i;
      while (j < text.size() && word_char(text[j])) ++j;
      out.emplace_back(text.substr(i, j - i));
      i = j;
    } else {
      out.emplace_back(1, c);
      ++i;
    }
  }
  return out;
}

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double log_loss(double p, double y) {
  constexpr double eps = 1e-12;
  p = std::clamp(p, eps, 1.0 - eps);
  return -(y * std::log(p) + (1.0 - y) * std::log(1.0 - p));
}

}  // namespace

void DiscriminatorSpec::validate() const {
  if (n_features < (std::size_t{1} << 10) || (n_features & (n_features - 1)) != 0) {
    fail(ErrorKind::kInvalidArgument, "n_features must be a power of two >= 1024");
  }
  if (n_features > (std::size_t{1} << 30)) {
    fail(ErrorKind::kInvalidArgument, "n_features must not exceed 2^30");
  }
  if (epochs < 1) fail(ErrorKind::kInvalidArgument, "epochs must be at least 1");
  if (!(learning_rate > 0.0)) fail(ErrorKind::kInvalidArgument, "learning_rate must be positive");
  if (!(bias_learning_rate >= 0.0)) {
    fail(ErrorKind::kInvalidArgument, "bias_learning_rate must be non-negative");
  }
  if (!(l2 >= 0.0)) fail(ErrorKind::kInvalidArgument, "l2 must be non-negative");
  if (word_orders.empty() && char_orders.empty()) {
    fail(ErrorKind::kInvalidArgument, "at least one n-gram order is required");
  }
  for (int n : word_orders) {
    if (n < 1) fail(ErrorKind::kInvalidArgument, "n-gram orders must be positive");
  }
  for (int n : char_orders) {
    if (n < 1) fail(ErrorKind::kInvalidArgument, "n-gram orders must be positive");
  }
}

double SparseVector::norm() const {
  double s = 0.0;
  for (double v : value) s += v * v;
  return std::sqrt(s);
}

SparseVector featurize(std::string_view input, std::string_view output,
                       const DiscriminatorSpec& spec) {
  const std::string in = normalize_ws(input);
  const std::string out = normalize_ws(output);
  if (in.empty()) fail(ErrorKind::kValidation, "featurize: input is empty");
  if (out.empty()) fail(ErrorKind::kValidation, "featurize: output is empty");

  const std::uint64_t mask = spec.n_features - 1;
  std::map<std::uint32_t, double> counts;
  auto add = [&](std::string_view family, std::string_view gram) {
    const std::uint64_t h = fnv1a(gram, fnv1a(family));
    counts[static_cast<std::uint32_t>(h & mask)] += 1.0;
  };

  std::vector<std::string> words = tokenize(in);
  const std::size_t n_in = words.size();
  words.emplace_back(kSeparatorToken);
  for (auto& t : tokenize(out)) words.push_back(std::move(t));
  if (spec.overlap) {
    std::set<std::string_view> in_set;
    std::set<std::string_view> out_set;
    for (std::size_t i = 0; i < words.size(); ++i) {
      if (i == n_in || !word_char(words[i].front())) continue;
      (i < n_in ? in_set : out_set).insert(words[i]);
    }
    for (std::string_view t : out_set) add(in_set.contains(t) ? "oh" : "om", t);
    for (std::string_view t : in_set) add(out_set.contains(t) ? "ih" : "im", t);
  }
  for (int n : spec.word_orders) {
    const auto order = static_cast<std::size_t>(n);
    const std::string family = "w" + std::to_string(n);
    for (std::size_t i = 0; i + order <= words.size(); ++i) {
      std::string gram;
      for (std::size_t k = 0; k < order; ++k) {
        if (k > 0) gram.push_back('\x1f');
        gram += words[i + k];
      }
      add(family, gram);
    }
  }

  const std::string joined = in + ' ' + kBoundary + ' ' + out;
  for (int n : spec.char_orders) {
    const auto order = static_cast<std::size_t>(n);
    const std::string family = "c" + std::to_string(n);
    for (std::size_t i = 0; i + order <= joined.size(); ++i) {
      add(family, std::string_view(joined).substr(i, order));
    }
  }

  SparseVector x;
  double sq = 0.0;
  for (const auto& [idx, v] : counts) {
    x.index.push_back(idx);
    x.value.push_back(v);
    sq += v * v;
  }
  const double inv = 1.0 / std::sqrt(sq);
  for (double& v : x.value) v *= inv;
  return x;
}

LinearDiscriminator::LinearDiscriminator(DiscriminatorSpec spec, std::vector<double> weights,
                                         double bias, std::vector<double> epoch_losses)
    : spec_(std::move(spec)),
      weights_(std::move(weights)),
      bias_(bias),
      epoch_losses_(std::move(epoch_losses)) {
  spec_.validate();
  if (weights_.size() != spec_.n_features) {
    fail(ErrorKind::kValidation, "weight vector size does not match n_features");
  }
}

LinearDiscriminator LinearDiscriminator::zero(const DiscriminatorSpec& spec) {
  return LinearDiscriminator(spec, std::vector<double>(spec.n_features, 0.0), 0.0);
}

double LinearDiscriminator::score(const SparseVector& x) const {
  double z = bias_;
  for (std::size_t k = 0; k < x.index.size(); ++k) z += weights_[x.index[k]] * x.value[k];
  return z;
}

Verdict LinearDiscriminator::predict(std::string_view input, std::string_view output) const {
  return Verdict(sigmoid(score(featurize(input, output, spec_))));
}

namespace {

LinearDiscriminator train_on_features(const std::vector<SparseVector>& xs,
                                      const std::vector<double>& ys,
                                      const DiscriminatorSpec& spec) {
  std::vector<double> v(spec.n_features, 0.0);
  double scale = 1.0;  // weights = scale * v, so L2 decay is O(1) per step
  double bias = 0.0;
  std::vector<double> losses;
  std::vector<std::size_t> order(xs.size());

  auto margin = [&](const SparseVector& x) {
    double z = 0.0;
    for (std::size_t k = 0; k < x.index.size(); ++k) z += v[x.index[k]] * x.value[k];
    return scale * z + bias;
  };

  for (std::size_t epoch = 0; epoch < spec.epochs; ++epoch) {
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng rng(mix_seed(spec.seed, epoch));
    rng.shuffle(order);
    const double decay = std::sqrt(1.0 + static_cast<double>(epoch));
    const double lr = spec.learning_rate / decay;
    const double bias_lr = spec.bias_learning_rate / decay;
    for (std::size_t i : order) {
      const SparseVector& x = xs[i];
      const double g = sigmoid(margin(x)) - ys[i];
      scale *= 1.0 - lr * spec.l2;
      if (scale < 1e-9) {
        for (double& w : v) w *= scale;
        scale = 1.0;
      }
      const double step = lr * g / scale;
      for (std::size_t k = 0; k < x.index.size(); ++k) v[x.index[k]] -= step * x.value[k];
      bias -= bias_lr * g;
    }
    double loss = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) loss += log_loss(sigmoid(margin(xs[i])), ys[i]);
    losses.push_back(loss / static_cast<double>(xs.size()));
  }
  for (double& w : v) w *= scale;
  return LinearDiscriminator(spec, std::move(v), bias, std::move(losses));
}

struct Featurized {
  std::vector<SparseVector> xs;
  std::vector<double> ys;
};

Featurized prepare(const std::vector<TrainingPair>& pairs, const DiscriminatorSpec& spec) {
  spec.validate();
  bool has_correct = false;
  bool has_incorrect = false;
  Featurized f;
  f.xs.reserve(pairs.size());
  for (const auto& p : pairs) {
    const bool correct = p.label == Label::kCorrect;
    has_correct |= correct;
    has_incorrect |= !correct;
    f.xs.push_back(featurize(p.input, p.output, spec));
    f.ys.push_back(correct ? 1.0 : 0.0);
  }
  if (!has_correct || !has_incorrect) {
    fail(ErrorKind::kTraining, "training pairs must contain both correct and incorrect labels");
  }
  return f;
}

}  // namespace

LinearDiscriminator train(const std::vector<TrainingPair>& pairs, const DiscriminatorSpec& spec) {
  const Featurized f = prepare(pairs, spec);
  return train_on_features(f.xs, f.ys, spec);
}

Ensemble train_ensemble(const std::vector<TrainingPair>& pairs, const DiscriminatorSpec& spec,
                        std::size_t n_members, bool parallel) {
  if (n_members < 1) fail(ErrorKind::kInvalidArgument, "ensemble needs at least one member");
  const Featurized f = prepare(pairs, spec);  // the feature map does not depend on the seed

  std::vector<DiscriminatorSpec> specs(n_members, spec);
  Ensemble ens;
  for (std::size_t i = 0; i < n_members; ++i) {
    specs[i].seed = spec.seed + i;
    ens.member_seeds.push_back(specs[i].seed);
  }
  std::vector<std::optional<LinearDiscriminator>> slots(n_members);
  if (parallel && n_members > 1) {
    std::vector<std::jthread> workers;
    std::vector<std::exception_ptr> errors(n_members);
    for (std::size_t i = 0; i < n_members; ++i) {
      workers.emplace_back([&, i] {
        try {
          slots[i].emplace(train_on_features(f.xs, f.ys, specs[i]));
        } catch (...) {
          errors[i] = std::current_exception();
        }
      });
    }
    workers.clear();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  } else {
    for (std::size_t i = 0; i < n_members; ++i) {
      slots[i].emplace(train_on_features(f.xs, f.ys, specs[i]));
    }
  }
  for (auto& s : slots) ens.members.push_back(std::move(*s));
  return ens;
}

// ---------------------------------------------------------------------------
// Persistence

namespace {

nlohmann::ordered_json spec_to_json(const DiscriminatorSpec& s) {
  nlohmann::ordered_json j;
  j["n_features"] = s.n_features;
  j["word_orders"] = s.word_orders;
  j["char_orders"] = s.char_orders;
  j["overlap"] = s.overlap;
  j["epochs"] = s.epochs;
  j["learning_rate"] = s.learning_rate;
  j["bias_learning_rate"] = s.bias_learning_rate;
  j["l2"] = s.l2;
  j["seed"] = s.seed;
  return j;
}

DiscriminatorSpec spec_from_json(const nlohmann::json& j) {
  DiscriminatorSpec s;
  s.n_features = j.at("n_features").get<std::size_t>();
  s.word_orders = j.at("word_orders").get<std::vector<int>>();
  s.char_orders = j.at("char_orders").get<std::vector<int>>();
  s.overlap = j.at("overlap").get<bool>();
  s.epochs = j.at("epochs").get<std::size_t>();
  s.learning_rate = j.at("learning_rate").get<double>();
  s.bias_learning_rate = j.at("bias_learning_rate").get<double>();
  s.l2 = j.at("l2").get<double>();
  s.seed = j.at("seed").get<std::uint64_t>();
  s.validate();
  return s;
}

}  // namespace

void save_ensemble(const Ensemble& ensemble, const std::filesystem::path& path) {
  if (ensemble.members.empty()) fail(ErrorKind::kInvalidArgument, "cannot save an empty ensemble");
  std::ofstream out(path);
  if (!out) fail(ErrorKind::kIo, "cannot open '" + path.string() + "' for writing");
  DiscriminatorSpec base = ensemble.members.front().spec();
  base.seed = ensemble.member_seeds.front();
  out << kModelHeader << '\n';
  nlohmann::ordered_json header = spec_to_json(base);
  header["members"] = ensemble.members.size();
  out << header.dump() << '\n';
  for (std::size_t m = 0; m < ensemble.members.size(); ++m) {
    const auto& member = ensemble.members[m];
    nlohmann::ordered_json j;
    j["seed"] = ensemble.member_seeds[m];
    j["bias"] = member.bias();
    j["epoch_losses"] = member.epoch_losses();
    nlohmann::ordered_json weights = nlohmann::ordered_json::array();
    const auto& w = member.weights();
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (w[i] != 0.0) weights.push_back({i, w[i]});
    }
    j["weights"] = std::move(weights);
    out << j.dump() << '\n';
  }
  out.close();
  if (!out) fail(ErrorKind::kIo, "write failure on '" + path.string() + "'");
}

Ensemble load_ensemble(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kIo, "cannot open '" + path.string() + "' for reading");
  std::string line;
  if (!std::getline(in, line) || line != kModelHeader) {
    fail(ErrorKind::kParse, path.string() + ": not an accbound ensemble file (bad header)");
  }
  Ensemble ens;
  try {
    if (!std::getline(in, line)) fail(ErrorKind::kParse, "missing settings line");
    const auto header = nlohmann::json::parse(line);
    const DiscriminatorSpec base = spec_from_json(header);
    const auto n_members = header.at("members").get<std::size_t>();
    for (std::size_t m = 0; m < n_members; ++m) {
      if (!std::getline(in, line)) fail(ErrorKind::kParse, "missing member " + std::to_string(m));
      const auto j = nlohmann::json::parse(line);
      DiscriminatorSpec spec = base;
      spec.seed = j.at("seed").get<std::uint64_t>();
      std::vector<double> w(spec.n_features, 0.0);
      for (const auto& entry : j.at("weights")) {
        const auto idx = entry.at(0).get<std::size_t>();
        if (idx >= w.size()) fail(ErrorKind::kParse, "weight index out of range");
        w[idx] = entry.at(1).get<double>();
      }
      ens.member_seeds.push_back(spec.seed);
      ens.members.emplace_back(spec, std::move(w), j.at("bias").get<double>(),
                               j.at("epoch_losses").get<std::vector<double>>());
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kParse, path.string() + ": " + e.what());
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
  return ens;
}

VerdictMatrix predict_matrix(const Ensemble& ensemble, const std::vector<PredictionRecord>& records) {
  if (ensemble.members.empty()) fail(ErrorKind::kInvalidArgument, "ensemble has no members");
  std::vector<std::string> ids;
  ids.reserve(records.size());
  for (const auto& r : records) ids.push_back(r.id);
  std::vector<std::vector<Verdict>> rows(ensemble.members.size());
  // Members share one feature map; featurize once per record.
  const DiscriminatorSpec& spec = ensemble.members.front().spec();
  for (const auto& r : records) {
    const SparseVector x = featurize(r.input, r.prediction, spec);
    for (std::size_t m = 0; m < ensemble.members.size(); ++m) {
      rows[m].emplace_back(sigmoid(ensemble.members[m].score(x)));
    }
  }
  return VerdictMatrix(std::move(ids), std::move(rows));
}

VerdictMatrix matrix_from_external(const std::vector<ExternalVerdict>& verdicts,
                                   const std::vector<PredictionRecord>& records) {
  if (verdicts.empty()) fail(ErrorKind::kValidation, "external verdicts file is empty");
  std::unordered_map<std::string, std::size_t> column;
  std::vector<std::string> ids;
  for (const auto& r : records) {
    column.emplace(r.id, ids.size());
    ids.push_back(r.id);
  }
  std::size_t n_members = 0;
  for (const auto& v : verdicts) n_members = std::max(n_members, v.member_index + 1);
  std::vector<std::vector<std::optional<Verdict>>> grid(
      n_members, std::vector<std::optional<Verdict>>(ids.size()));
  for (const auto& v : verdicts) {
    const auto it = column.find(v.id);
    if (it == column.end()) fail(ErrorKind::kValidation, "verdict for unknown id '" + v.id + "'");
    auto& cell = grid[v.member_index][it->second];
    if (cell) {
      fail(ErrorKind::kValidation, "duplicate verdict for id '" + v.id + "', member " +
                                       std::to_string(v.member_index));
    }
    cell = Verdict(v.probability);
  }
  std::vector<std::vector<Verdict>> rows(n_members);
  for (std::size_t m = 0; m < n_members; ++m) {
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (!grid[m][i]) {
        fail(ErrorKind::kValidation, "missing verdict for id '" + ids[i] + "', member " +
                                         std::to_string(m));
      }
      rows[m].push_back(*grid[m][i]);
    }
  }
  return VerdictMatrix(std::move(ids), std::move(rows));
}

std::vector<ExternalVerdict> to_external(const VerdictMatrix& matrix) {
  std::vector<ExternalVerdict> out;
  for (std::size_t m = 0; m < matrix.members(); ++m) {
    const auto row = matrix.row(m);
    for (std::size_t i = 0; i < matrix.instances(); ++i) {
      out.push_back({matrix.instance_ids()[i], m, row[i].probability()});
    }
  }
  return out;
}

}  // namespace accbound
