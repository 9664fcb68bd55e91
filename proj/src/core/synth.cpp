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

#include "synth.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_set>

#include "error.hpp"
#include "rng.hpp"
#include "text.hpp"

namespace accbound::synth {

namespace {

constexpr std::string_view kConsonants = "bdfgklmnprstvz";
constexpr std::string_view kVowels = "aeiou";
constexpr std::string_view kAnd = " AND ";

std::string pseudo_word(std::size_t index) {
  const std::size_t n_syl = kConsonants.size() * kVowels.size();
  const std::size_t j = (index * 2531 + 1234) % (n_syl * n_syl);
  auto syllable = [&](std::size_t s) {
    return std::string{kConsonants[s / kVowels.size()], kVowels[s % kVowels.size()]};
  };
  return syllable(j / n_syl) + syllable(j % n_syl);
}

std::string var(std::size_t pos) { return "x_" + std::to_string(pos); }

}  // namespace

// ---------------------------------------------------------------------------
// Lexicon

Lexicon Lexicon::build(std::size_t vocab_size) {
  if (vocab_size < 10) fail(ErrorKind::kInvalidArgument, "vocab_size must be at least 10");
  if (vocab_size > 4900) fail(ErrorKind::kInvalidArgument, "vocab_size must be at most 4900");
  const std::size_t n_adj = std::max<std::size_t>(1, vocab_size * 15 / 100);
  const std::size_t n_comp = std::max<std::size_t>(1, vocab_size / 10);
  const std::size_t n_intr = std::max<std::size_t>(1, vocab_size * 15 / 100);
  const std::size_t n_trans = std::max<std::size_t>(1, vocab_size / 5);
  const std::size_t n_noun = vocab_size - n_adj - n_comp - n_intr - n_trans;

  Lexicon lex;
  std::size_t next = 0;
  auto take = [&](std::vector<std::string>& dst, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dst.push_back(pseudo_word(next++));
  };
  take(lex.nouns_, n_noun);
  take(lex.adjectives_, n_adj);
  take(lex.transitive_, n_trans);
  take(lex.intransitive_, n_intr);
  take(lex.complement_, n_comp);
  return lex;
}

const std::vector<std::string>& Lexicon::words(Category cat) const {
  switch (cat) {
    case Category::kNoun: return nouns_;
    case Category::kAdjective: return adjectives_;
    case Category::kTransitiveVerb: return transitive_;
    case Category::kIntransitiveVerb: return intransitive_;
    case Category::kComplementVerb: return complement_;
  }
  return nouns_;
}

std::optional<Category> Lexicon::category_of(std::string_view word) const {
  for (Category cat : {Category::kNoun, Category::kAdjective, Category::kTransitiveVerb,
                       Category::kIntransitiveVerb, Category::kComplementVerb}) {
    const auto& ws = words(cat);
    if (std::find(ws.begin(), ws.end(), word) != ws.end()) return cat;
  }
  return std::nullopt;
}

std::size_t Lexicon::size() const {
  return nouns_.size() + adjectives_.size() + transitive_.size() + intransitive_.size() +
         complement_.size();
}

void TaskConfig::validate() const {
  if (n_train < 1) fail(ErrorKind::kInvalidArgument, "n_train must be at least 1");
  if (n_test < 1) fail(ErrorKind::kInvalidArgument, "n_test must be at least 1");
  if (grammar_depth < 1 || grammar_depth > 6) {
    fail(ErrorKind::kInvalidArgument, "grammar_depth must lie in [1, 6]");
  }
  if (vocab_size < 10) fail(ErrorKind::kInvalidArgument, "vocab_size must be at least 10");
}

// ---------------------------------------------------------------------------
// Derivation trees and rendering

namespace {

struct NounPhrase {
  bool definite = true;
  std::optional<std::size_t> adjective;
  std::size_t noun = 0;
};

enum class VerbKind : std::uint8_t { kIntransitive, kTransitive, kComplement };

struct Clause {
  NounPhrase subject;
  VerbKind kind = VerbKind::kIntransitive;
  std::size_t verb = 0;
  NounPhrase object;
};

// Clause i embeds clause i+1 when its kind is kComplement; the last clause
// never embeds.
using Tree = std::vector<Clause>;

Category verb_category(VerbKind kind) {
  switch (kind) {
    case VerbKind::kIntransitive: return Category::kIntransitiveVerb;
    case VerbKind::kTransitive: return Category::kTransitiveVerb;
    case VerbKind::kComplement: return Category::kComplementVerb;
  }
  return Category::kIntransitiveVerb;
}

std::size_t np_length(const NounPhrase& np) { return np.adjective ? 3 : 2; }

class Renderer {
 public:
  explicit Renderer(const Lexicon& lex) : lex_(lex) {}

  Example render(const Tree& tree) {
    for (std::size_t i = 0; i < tree.size(); ++i) clause(tree, i);
    Example ex;
    ex.sentence = join(tokens_, " ");
    ex.gold = join(conjuncts_, kAnd);
    std::sort(prods_.begin(), prods_.end());
    ex.productions = std::move(prods_);
    return ex;
  }

 private:
  void clause(const Tree& tree, std::size_t i) {
    const Clause& c = tree[i];
    const std::size_t subj = noun_phrase(c.subject, "subj");
    const std::size_t verb_pos = tokens_.size();
    const std::string& verb = lex_.words(verb_category(c.kind))[c.verb];
    tokens_.push_back(verb);
    conjuncts_.push_back(verb + ".agent(" + var(verb_pos) + "," + var(subj) + ")");
    switch (c.kind) {
      case VerbKind::kIntransitive:
        prods_.push_back("VP->Vi");
        prods_.push_back("Vi->" + verb);
        break;
      case VerbKind::kTransitive: {
        prods_.push_back("VP->Vt NP");
        prods_.push_back("Vt->" + verb);
        const std::size_t obj_pos = tokens_.size() + np_length(c.object) - 1;
        conjuncts_.push_back(verb + ".theme(" + var(verb_pos) + "," + var(obj_pos) + ")");
        noun_phrase(c.object, "obj");
        break;
      }
      case VerbKind::kComplement: {
        prods_.push_back("VP->Vc that S");
        prods_.push_back("Vc->" + verb);
        tokens_.push_back("that");
        const std::size_t inner_verb = tokens_.size() + np_length(tree.at(i + 1).subject);
        conjuncts_.push_back(verb + ".ccomp(" + var(verb_pos) + "," + var(inner_verb) + ")");
        break;
      }
    }
  }

  std::size_t noun_phrase(const NounPhrase& np, const std::string& slot) {
    tokens_.push_back(np.definite ? "the" : "a");
    prods_.push_back(np.definite ? "Det->the" : "Det->a");
    std::string adjective;
    if (np.adjective) {
      adjective = lex_.words(Category::kAdjective)[*np.adjective];
      tokens_.push_back(adjective);
      prods_.push_back("NP@" + slot + "->Det A N");
      prods_.push_back("A@" + slot + "->" + adjective);
    } else {
      prods_.push_back("NP@" + slot + "->Det N");
    }
    const std::size_t pos = tokens_.size();
    const std::string& noun = lex_.words(Category::kNoun)[np.noun];
    tokens_.push_back(noun);
    prods_.push_back("N@" + slot + "->" + noun);
    conjuncts_.push_back(noun + "(" + var(pos) + ")");
    if (np.adjective) conjuncts_.push_back(adjective + "(" + var(pos) + ")");
    return pos;
  }

  const Lexicon& lex_;
  std::vector<std::string> tokens_;
  std::vector<std::string> conjuncts_;
  std::vector<std::string> prods_;
};

NounPhrase sample_np(Rng& rng, const Lexicon& lex) {
  NounPhrase np;
  np.definite = rng.bernoulli(0.5);
  if (rng.bernoulli(0.3)) np.adjective = rng.below(lex.words(Category::kAdjective).size());
  np.noun = rng.below(lex.words(Category::kNoun).size());
  return np;
}

Tree sample_tree(Rng& rng, const Lexicon& lex, std::size_t depth) {
  Tree tree;
  while (true) {
    Clause c;
    c.subject = sample_np(rng, lex);
    const double u = rng.uniform();
    if (tree.size() + 1 < depth) {
      c.kind = u < 0.25 ? VerbKind::kComplement
                        : (u < 0.7 ? VerbKind::kTransitive : VerbKind::kIntransitive);
    } else {
      c.kind = u < 0.6 ? VerbKind::kTransitive : VerbKind::kIntransitive;
    }
    c.verb = rng.below(lex.words(verb_category(c.kind)).size());
    if (c.kind == VerbKind::kTransitive) c.object = sample_np(rng, lex);
    tree.push_back(c);
    if (c.kind != VerbKind::kComplement) break;
  }
  return tree;
}

// A held-out combination: a transitive verb together with a specific object
// noun (or object adjective). Forcing one into a tree rewrites one clause.
struct HeldOut {
  std::size_t verb = 0;
  bool adjective = false;
  std::size_t word = 0;
  ProductionPair productions;
};

std::vector<HeldOut> choose_held_out(Rng& rng, const Lexicon& lex) {
  const auto& vt = lex.words(Category::kTransitiveVerb);
  const auto& nouns = lex.words(Category::kNoun);
  const auto& adjs = lex.words(Category::kAdjective);
  std::vector<HeldOut> out;
  std::set<ProductionPair> seen;
  auto add = [&](bool adjective) {
    for (int attempt = 0; attempt < 64; ++attempt) {
      HeldOut h;
      h.verb = rng.below(vt.size());
      h.adjective = adjective;
      h.word = rng.below(adjective ? adjs.size() : nouns.size());
      h.productions = {"Vt->" + vt[h.verb],
                       adjective ? "A@obj->" + adjs[h.word] : "N@obj->" + nouns[h.word]};
      if (seen.insert(h.productions).second) {
        out.push_back(h);
        return;
      }
    }
  };
  add(false);
  add(false);
  add(true);
  return out;
}

void force(Rng& rng, const Lexicon& lex, Tree& tree, const HeldOut& h) {
  const std::size_t at = rng.below(tree.size());
  tree.resize(at + 1);
  Clause& c = tree[at];
  c.kind = VerbKind::kTransitive;
  c.verb = h.verb;
  c.object = sample_np(rng, lex);
  if (h.adjective) {
    c.object.adjective = h.word;
  } else {
    c.object.noun = h.word;
  }
}

}  // namespace

bool contains_pair(const std::vector<std::string>& productions, const ProductionPair& pair) {
  auto has = [&](const std::string& p) {
    return std::find(productions.begin(), productions.end(), p) != productions.end();
  };
  return has(pair.first) && has(pair.second);
}

Task generate_task(const TaskConfig& config) {
  config.validate();
  Task task;
  task.lexicon = std::make_shared<const Lexicon>(Lexicon::build(config.vocab_size));
  const Lexicon& lex = *task.lexicon;

  Rng held_rng(mix_seed(config.seed, 1));
  const std::vector<HeldOut> held = choose_held_out(held_rng, lex);
  for (const auto& h : held) task.held_out.push_back(h.productions);

  auto has_held_out = [&](const Example& ex) {
    return std::any_of(task.held_out.begin(), task.held_out.end(),
                       [&](const ProductionPair& p) { return contains_pair(ex.productions, p); });
  };

  const std::size_t n_dev = config.n_dev == 0 ? config.n_test : config.n_dev;
  std::unordered_set<std::string> in_distribution;  // shared across train/dev/test_id

  auto fill = [&](std::vector<Example>& split, std::size_t count, std::uint64_t stream,
                  bool ood, std::unordered_set<std::string>& seen, const char* name) {
    Rng rng(mix_seed(config.seed, stream));
    const std::size_t max_attempts = 200 * count + 1000;
    std::size_t attempts = 0;
    while (split.size() < count) {
      if (++attempts > max_attempts) {
        fail(ErrorKind::kGeneration,
             std::string("cannot generate ") + std::to_string(count) + " unique " + name +
                 " sentences; vocabulary or depth too small");
      }
      Tree tree = sample_tree(rng, lex, config.grammar_depth);
      if (ood) force(rng, lex, tree, held[rng.below(held.size())]);
      Example ex = Renderer(lex).render(tree);
      if (has_held_out(ex) != ood) continue;
      if (!seen.insert(ex.sentence).second) continue;
      split.push_back(std::move(ex));
    }
  };

  std::unordered_set<std::string> ood_seen;
  fill(task.train, config.n_train, 2, false, in_distribution, "train");
  fill(task.dev, n_dev, 3, false, in_distribution, "dev");
  fill(task.test_id, config.n_test, 4, false, in_distribution, "test_id");
  fill(task.test_ood, config.n_test, 5, true, ood_seen, "test_ood");
  return task;
}

// ---------------------------------------------------------------------------
// Recursive-descent re-derivation

namespace {

class Deriver {
 public:
  Deriver(const Lexicon& lex, std::vector<std::string> tokens)
      : lex_(lex), tokens_(std::move(tokens)) {}

  Example run() {
    clause();
    if (pos_ != tokens_.size()) error("trailing tokens");
    Example ex;
    ex.gold = join(conjuncts_, kAnd);
    ex.sentence = join(tokens_, " ");
    std::sort(prods_.begin(), prods_.end());
    ex.productions = std::move(prods_);
    return ex;
  }

 private:
  [[noreturn]] void error(const std::string& what) const {
    fail(ErrorKind::kParse, "sentence not in grammar at token " + std::to_string(pos_) + ": " + what);
  }

  const std::string& peek() const {
    if (pos_ >= tokens_.size()) error("unexpected end of sentence");
    return tokens_[pos_];
  }

  bool is(Category cat, const std::string& w) const { return lex_.category_of(w) == cat; }

  // Returns the noun position; emits the NP's conjuncts.
  std::size_t noun_phrase(const std::string& slot) {
    const std::string& det = peek();
    if (det != "the" && det != "a") error("expected determiner");
    prods_.push_back("Det->" + det);
    ++pos_;
    std::optional<std::string> adjective;
    if (is(Category::kAdjective, peek())) {
      adjective = peek();
      prods_.push_back("NP@" + slot + "->Det A N");
      prods_.push_back("A@" + slot + "->" + *adjective);
      ++pos_;
    } else {
      prods_.push_back("NP@" + slot + "->Det N");
    }
    if (!is(Category::kNoun, peek())) error("expected noun");
    const std::size_t noun_pos = pos_++;
    prods_.push_back("N@" + slot + "->" + tokens_[noun_pos]);
    conjuncts_.push_back(tokens_[noun_pos] + "(" + var(noun_pos) + ")");
    if (adjective) conjuncts_.push_back(*adjective + "(" + var(noun_pos) + ")");
    return noun_pos;
  }

  // Returns the verb position.
  std::size_t clause() {
    const std::size_t subj = noun_phrase("subj");
    const std::size_t verb_pos = pos_;
    const std::string verb = peek();
    ++pos_;
    const auto cat = lex_.category_of(verb);
    if (!cat) error("unknown verb '" + verb + "'");
    conjuncts_.push_back(verb + ".agent(" + var(verb_pos) + "," + var(subj) + ")");
    switch (*cat) {
      case Category::kIntransitiveVerb:
        prods_.push_back("VP->Vi");
        prods_.push_back("Vi->" + verb);
        break;
      case Category::kTransitiveVerb: {
        prods_.push_back("VP->Vt NP");
        prods_.push_back("Vt->" + verb);
        const std::size_t theme_slot = conjuncts_.size();
        conjuncts_.emplace_back();
        const std::size_t obj = noun_phrase("obj");
        conjuncts_[theme_slot] = verb + ".theme(" + var(verb_pos) + "," + var(obj) + ")";
        break;
      }
      case Category::kComplementVerb: {
        prods_.push_back("VP->Vc that S");
        prods_.push_back("Vc->" + verb);
        if (peek() != "that") error("expected 'that'");
        ++pos_;
        const std::size_t ccomp_slot = conjuncts_.size();
        conjuncts_.emplace_back();
        const std::size_t inner = clause();
        conjuncts_[ccomp_slot] = verb + ".ccomp(" + var(verb_pos) + "," + var(inner) + ")";
        break;
      }
      default:
        error("expected verb, got '" + verb + "'");
    }
    return verb_pos;
  }

  const Lexicon& lex_;
  std::vector<std::string> tokens_;
  std::size_t pos_ = 0;
  std::vector<std::string> conjuncts_;
  std::vector<std::string> prods_;
};

}  // namespace

Example derive(const Lexicon& lexicon, std::string_view sentence) {
  return Deriver(lexicon, split_ws(sentence)).run();
}

bool well_formed(std::string_view logical_form) {
  const auto conjuncts = split_on(logical_form, kAnd);
  if (conjuncts.empty()) return false;
  for (const auto& c : conjuncts) {
    const auto open = c.find('(');
    if (open == 0 || open == std::string::npos || c.back() != ')') return false;
    if (std::count(c.begin(), c.end(), '(') != 1 || std::count(c.begin(), c.end(), ')') != 1) {
      return false;
    }
    if (c.find(' ') != std::string::npos) return false;
  }
  return true;
}

std::size_t nesting_depth(std::string_view logical_form) {
  std::size_t n = 0;
  for (const auto& c : split_on(logical_form, kAnd)) {
    if (c.find(".ccomp(") != std::string::npos) ++n;
  }
  return n;
}

// ---------------------------------------------------------------------------
// Parser simulator

void ParserModel::validate() const {
  if (!(error_rate >= 0.0 && error_rate <= 1.0)) {
    fail(ErrorKind::kValidation, "error_rate must lie in [0, 1]");
  }
  if (corruption_kinds.empty()) fail(ErrorKind::kValidation, "corruption_kinds is empty");
}

namespace {

struct Outcome {
  std::vector<std::string> emitted;
  double probability = 0.0;
};

struct ConjunctParts {
  std::string lemma;
  std::string suffix;  // ".agent(x_2,x_1)" or "(x_1)"
  std::string first_arg;
};

ConjunctParts split_conjunct(const std::string& c) {
  ConjunctParts p;
  const auto open = c.find('(');
  const auto dot = c.find('.');
  const auto lemma_end = (dot != std::string::npos && dot < open) ? dot : open;
  p.lemma = c.substr(0, lemma_end);
  p.suffix = c.substr(lemma_end);
  const auto comma = c.find(',', open);
  const auto arg_end = comma == std::string::npos ? c.size() - 1 : comma;
  p.first_arg = c.substr(open + 1, arg_end - open - 1);
  return p;
}

// Replacement lemmas for `lemma`: same lexical category if a lexicon is
// known, otherwise other lemmas of the same shape within the form.
std::vector<std::string> substitution_pool(const ParserModel& model, const ConjunctParts& part,
                                           const std::vector<ConjunctParts>& all) {
  std::vector<std::string> pool;
  if (model.lexicon) {
    if (const auto cat = model.lexicon->category_of(part.lemma)) {
      for (const auto& w : model.lexicon->words(*cat)) {
        if (w != part.lemma) pool.push_back(w);
      }
      return pool;
    }
  }
  const bool role = part.suffix.starts_with('.');
  for (const auto& other : all) {
    if (other.lemma != part.lemma && other.suffix.starts_with('.') == role &&
        std::find(pool.begin(), pool.end(), other.lemma) == pool.end()) {
      pool.push_back(other.lemma);
    }
  }
  return pool;
}

std::vector<std::string> insertion_pool(const ParserModel& model,
                                        const std::vector<ConjunctParts>& all) {
  std::vector<std::string> pool;
  if (model.lexicon) {
    pool = model.lexicon->words(Category::kNoun);
    const auto& adj = model.lexicon->words(Category::kAdjective);
    pool.insert(pool.end(), adj.begin(), adj.end());
    return pool;
  }
  for (const auto& p : all) {
    if (!p.suffix.starts_with('.') && std::find(pool.begin(), pool.end(), p.lemma) == pool.end()) {
      pool.push_back(p.lemma);
    }
  }
  return pool;
}

std::size_t pick(double u, std::size_t n) {
  return std::min(n - 1, static_cast<std::size_t>(u * static_cast<double>(n)));
}

bool enabled(const ParserModel& model, Corruption kind) {
  return std::find(model.corruption_kinds.begin(), model.corruption_kinds.end(), kind) !=
         model.corruption_kinds.end();
}

// Per-step decoder distribution. Exactly seven uniforms are drawn per step
// whatever the error rate, so models that differ only in error_rate see
// coupled randomness and accuracy is monotone in the rate.
std::vector<Outcome> step_distribution(const ParserModel& model, Rng& rng,
                                       const std::string& conjunct,
                                       const std::vector<ConjunctParts>& all, std::size_t index) {
  const double u_corrupt = rng.uniform();
  const double u_conf = rng.uniform();
  const double u_pick = rng.uniform();
  const double u_runner = rng.uniform();
  const double u_sub1 = rng.uniform();
  const double u_sub2 = rng.uniform();
  const double u_ins = rng.uniform();

  const ConjunctParts& part = all[index];
  std::vector<Outcome> outcomes;
  outcomes.push_back({{conjunct}, 0.0});
  if (enabled(model, Corruption::kTokenSubstitute)) {
    std::vector<std::string> pool = substitution_pool(model, part, all);
    if (!pool.empty()) {
      const std::size_t a = pick(u_sub1, pool.size());
      outcomes.push_back({{pool[a] + part.suffix}, 0.0});
      if (pool.size() > 1) {
        std::size_t b = pick(u_sub2, pool.size() - 1);
        if (b >= a) ++b;
        outcomes.push_back({{pool[b] + part.suffix}, 0.0});
      }
    }
  }
  if (enabled(model, Corruption::kConjunctDrop)) outcomes.push_back({{}, 0.0});
  if (enabled(model, Corruption::kConjunctInsert)) {
    const auto pool = insertion_pool(model, all);
    if (!pool.empty()) {
      outcomes.push_back({{conjunct, pool[pick(u_ins, pool.size())] + "(" + part.first_arg + ")"},
                          0.0});
    }
  }

  const std::size_t n = outcomes.size();
  if (n == 1) {
    outcomes[0].probability = 1.0;
    return outcomes;
  }
  const bool corrupted = u_corrupt < model.error_rate;
  const std::size_t realized = corrupted ? 1 + pick(u_pick, n - 1) : 0;
  const std::size_t runner = corrupted ? 0 : 1 + pick(u_runner, n - 1);
  // The realized outcome always holds at least half the mass; wrong steps
  // are less confident on average but overlap with correct ones.
  const double top = corrupted ? 0.5 + 0.45 * std::sqrt(u_conf)
                               : std::min(0.9995, 1.0 - 0.3 * u_conf * u_conf * u_conf);
  const double rest = 1.0 - top;
  for (std::size_t i = 0; i < n; ++i) {
    if (i == realized) {
      outcomes[i].probability = top;
    } else if (n == 2) {
      outcomes[i].probability = rest;
    } else if (i == runner || (corrupted && i == 0)) {
      outcomes[i].probability = 0.6 * rest;
    } else {
      outcomes[i].probability = 0.4 * rest / static_cast<double>(n - 2);
    }
  }
  return outcomes;
}

struct Partial {
  double probability = 1.0;
  std::vector<std::uint8_t> choices;
};

}  // namespace

std::vector<BeamCandidate> parse_with_beam(const ParserModel& model, std::string_view sentence,
                                           std::string_view gold, std::size_t beam_size) {
  model.validate();
  if (beam_size < 1) fail(ErrorKind::kInvalidArgument, "beam_size must be at least 1");
  const std::string gold_norm = normalize_ws(gold);
  const std::vector<std::string> conjuncts = split_on(gold_norm, kAnd);
  if (conjuncts.empty()) fail(ErrorKind::kInvalidArgument, "gold form is empty");
  std::vector<ConjunctParts> parts;
  for (const auto& c : conjuncts) {
    if (c.find('(') == std::string::npos || c.back() != ')') {
      fail(ErrorKind::kStructure, "gold conjunct '" + c + "' is not of the form name(args)");
    }
    parts.push_back(split_conjunct(c));
  }

  Rng rng(mix_seed(model.seed, fnv1a(normalize_ws(sentence))));
  std::vector<std::vector<Outcome>> steps;
  steps.reserve(conjuncts.size());
  for (std::size_t i = 0; i < conjuncts.size(); ++i) {
    steps.push_back(step_distribution(model, rng, conjuncts[i], parts, i));
  }

  // Exact k-best over a product of independent factors: any top-k full
  // sequence has a top-k prefix.
  const std::size_t keep = std::max<std::size_t>(8, 4 * beam_size);
  std::vector<Partial> frontier{Partial{}};
  for (const auto& step : steps) {
    std::vector<Partial> next;
    next.reserve(frontier.size() * step.size());
    for (const auto& p : frontier) {
      for (std::size_t o = 0; o < step.size(); ++o) {
        Partial q = p;
        q.probability *= step[o].probability;
        q.choices.push_back(static_cast<std::uint8_t>(o));
        next.push_back(std::move(q));
      }
    }
    std::sort(next.begin(), next.end(), [](const Partial& a, const Partial& b) {
      if (a.probability != b.probability) return a.probability > b.probability;
      return a.choices < b.choices;
    });
    if (next.size() > keep) next.resize(keep);
    frontier = std::move(next);
  }

  std::vector<BeamCandidate> beam;
  std::unordered_set<std::string> seen;
  for (const auto& p : frontier) {
    std::vector<std::string> emitted;
    for (std::size_t i = 0; i < steps.size(); ++i) {
      const auto& e = steps[i][p.choices[i]].emitted;
      emitted.insert(emitted.end(), e.begin(), e.end());
    }
    if (emitted.empty()) continue;
    std::string seq = join(emitted, kAnd);
    if (!seen.insert(seq).second) continue;
    beam.push_back({std::move(seq), p.probability});
    if (beam.size() == beam_size) break;
  }
  if (beam.empty()) {
    double prob = 1.0;
    for (const auto& step : steps) prob *= step[0].probability;
    beam.push_back({gold_norm, prob});
  }
  return beam;
}

std::vector<ParserModel> checkpoint_sequence(std::uint64_t base_seed,
                                             const std::vector<double>& error_rates,
                                             std::shared_ptr<const Lexicon> lexicon) {
  if (error_rates.empty()) fail(ErrorKind::kInvalidArgument, "error_rates must be non-empty");
  std::vector<ParserModel> models;
  for (std::size_t i = 0; i < error_rates.size(); ++i) {
    ParserModel m;
    m.error_rate = error_rates[i];
    m.seed = mix_seed(base_seed, 1000 + i);
    m.lexicon = lexicon;
    m.validate();
    models.push_back(std::move(m));
  }
  return models;
}

std::vector<PredictionRecord> run_parser(const ParserModel& model,
                                         const std::vector<Example>& split,
                                         std::size_t beam_size, std::string_view id_prefix) {
  std::vector<PredictionRecord> out;
  out.reserve(split.size());
  for (std::size_t i = 0; i < split.size(); ++i) {
    PredictionRecord rec;
    rec.id = std::string(id_prefix) + "-" + std::to_string(i);
    rec.input = split[i].sentence;
    rec.beam = parse_with_beam(model, split[i].sentence, split[i].gold, beam_size);
    rec.prediction = rec.beam.front().sequence;
    rec.gold = split[i].gold;
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace accbound::synth
