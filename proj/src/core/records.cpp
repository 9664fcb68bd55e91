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

#include "records.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <unordered_set>
#include <utility>

#include <nlohmann/json.hpp>

#include "error.hpp"
#include "text.hpp"

namespace accbound {

using ordered_json = nlohmann::ordered_json;

const char* to_string(Label label) noexcept {
  return label == Label::kCorrect ? "correct" : "incorrect";
}

const char* to_string(PairSource source) noexcept {
  switch (source) {
    case PairSource::kGold: return "gold";
    case PairSource::kCheckpointBeam: return "checkpoint_beam";
    case PairSource::kNoise: return "noise";
  }
  return "gold";
}

Label parse_label(std::string_view text) {
  if (text == "correct") return Label::kCorrect;
  if (text == "incorrect") return Label::kIncorrect;
  fail(ErrorKind::kValidation, "field 'label': expected \"correct\" or \"incorrect\"");
}

PairSource parse_source(std::string_view text) {
  if (text == "gold") return PairSource::kGold;
  if (text == "checkpoint_beam") return PairSource::kCheckpointBeam;
  if (text == "noise") return PairSource::kNoise;
  fail(ErrorKind::kValidation, "field 'source': unknown value '" + std::string(text) + "'");
}

Verdict::Verdict(double probability_correct) : probability_(probability_correct) {
  if (!(probability_correct >= 0.0 && probability_correct <= 1.0)) {
    fail(ErrorKind::kValidation, "verdict probability must lie in [0, 1]");
  }
}

bool PredictionRecord::is_correct() const {
  if (!gold) fail(ErrorKind::kValidation, "record '" + id + "': field 'gold' is absent");
  return same_sequence(prediction, *gold);
}

std::optional<double> PredictionRecord::confidence() const {
  if (beam.empty()) return std::nullopt;
  return beam.front().confidence;
}

void validate(const PredictionRecord& record) {
  if (record.id.empty()) fail(ErrorKind::kValidation, "field 'id' must be non-empty");
  for (std::size_t i = 0; i < record.beam.size(); ++i) {
    const double c = record.beam[i].confidence;
    if (!(c > 0.0 && c <= 1.0)) {
      fail(ErrorKind::kValidation, "field 'beam[" + std::to_string(i) +
                                       "].confidence' must lie in (0, 1], got " +
                                       format_shortest(c));
    }
    if (i > 0 && c > record.beam[i - 1].confidence) {
      fail(ErrorKind::kValidation, "field 'beam': confidences must be non-increasing (index " +
                                       std::to_string(i) + ")");
    }
  }
  if (!record.beam.empty() && !same_sequence(record.prediction, record.beam.front().sequence)) {
    fail(ErrorKind::kValidation, "field 'prediction' must equal beam[0].sequence");
  }
}

void validate(const TrainingPair& pair) {
  if (pair.label == Label::kCorrect && pair.source != PairSource::kGold) {
    fail(ErrorKind::kValidation, "field 'source': a correct pair must come from gold");
  }
}

namespace {

template <class T>
T get_field(const ordered_json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end()) fail(ErrorKind::kParse, std::string("missing field '") + key + "'");
  try {
    return it->get<T>();
  } catch (const nlohmann::json::exception&) {
    fail(ErrorKind::kParse, std::string("field '") + key + "' has the wrong type");
  }
}

ordered_json parse_object(std::string_view line) {
  ordered_json obj;
  try {
    obj = ordered_json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorKind::kParse, std::string("malformed json: ") + e.what());
  }
  if (!obj.is_object()) fail(ErrorKind::kParse, "expected a json object");
  return obj;
}

bool blank(std::string_view line) {
  return line.find_first_not_of(" \t\r\n") == std::string_view::npos;
}

// Calls `fn(line)` for every non-blank line, prefixing any Error with the
// 1-based line number.
template <class Fn>
void for_each_line(const std::filesystem::path& path, Fn&& fn) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kIo, "cannot open '" + path.string() + "' for reading");
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (blank(line)) continue;
    try {
      fn(line);
    } catch (const Error& e) {
      throw Error(e.kind(), path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (in.bad()) fail(ErrorKind::kIo, "read failure on '" + path.string() + "'");
}

class LineWriter {
 public:
  explicit LineWriter(const std::filesystem::path& path) : path_(path), out_(path) {
    if (!out_) fail(ErrorKind::kIo, "cannot open '" + path.string() + "' for writing");
  }
  void write(const std::string& line) { out_ << line << '\n'; }
  void close() {
    out_.close();
    if (!out_) fail(ErrorKind::kIo, "write failure on '" + path_.string() + "'");
  }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

}  // namespace

std::string serialize(const PredictionRecord& record) {
  ordered_json obj;
  obj["id"] = record.id;
  obj["input"] = record.input;
  obj["prediction"] = record.prediction;
  ordered_json beam = ordered_json::array();
  for (const auto& cand : record.beam) {
    ordered_json c;
    c["sequence"] = cand.sequence;
    c["confidence"] = cand.confidence;
    beam.push_back(std::move(c));
  }
  obj["beam"] = std::move(beam);
  if (record.gold) obj["gold"] = *record.gold;
  return obj.dump();
}

PredictionRecord parse_record(std::string_view line) {
  const ordered_json obj = parse_object(line);
  PredictionRecord rec;
  rec.id = get_field<std::string>(obj, "id");
  rec.input = get_field<std::string>(obj, "input");
  rec.prediction = get_field<std::string>(obj, "prediction");
  if (obj.contains("beam")) {
    const auto& beam = obj.at("beam");
    if (!beam.is_array()) fail(ErrorKind::kParse, "field 'beam' must be an array");
    for (const auto& c : beam) {
      if (!c.is_object()) fail(ErrorKind::kParse, "field 'beam' must hold objects");
      rec.beam.push_back({get_field<std::string>(c, "sequence"), get_field<double>(c, "confidence")});
    }
  }
  if (obj.contains("gold") && !obj.at("gold").is_null()) {
    rec.gold = get_field<std::string>(obj, "gold");
  }
  validate(rec);
  return rec;
}

std::string serialize(const TrainingPair& pair) {
  ordered_json obj;
  obj["input"] = pair.input;
  obj["output"] = pair.output;
  obj["label"] = to_string(pair.label);
  obj["source"] = to_string(pair.source);
  return obj.dump();
}

TrainingPair parse_pair(std::string_view line) {
  const ordered_json obj = parse_object(line);
  TrainingPair pair;
  pair.input = get_field<std::string>(obj, "input");
  pair.output = get_field<std::string>(obj, "output");
  pair.label = parse_label(get_field<std::string>(obj, "label"));
  pair.source = parse_source(get_field<std::string>(obj, "source"));
  validate(pair);
  return pair;
}

std::vector<PredictionRecord> read_records(const std::filesystem::path& path) {
  std::vector<PredictionRecord> out;
  std::unordered_set<std::string> ids;
  for_each_line(path, [&](const std::string& line) {
    PredictionRecord rec = parse_record(line);
    if (!ids.insert(rec.id).second) {
      fail(ErrorKind::kValidation, "field 'id': duplicate id '" + rec.id + "'");
    }
    out.push_back(std::move(rec));
  });
  return out;
}

void write_records(const std::vector<PredictionRecord>& records,
                   const std::filesystem::path& path) {
  std::unordered_set<std::string_view> ids;
  for (const auto& rec : records) {
    validate(rec);
    if (!ids.insert(rec.id).second) {
      fail(ErrorKind::kValidation, "field 'id': duplicate id '" + rec.id + "'");
    }
  }
  LineWriter out(path);
  for (const auto& rec : records) out.write(serialize(rec));
  out.close();
}

std::vector<TrainingPair> read_pairs(const std::filesystem::path& path) {
  std::vector<TrainingPair> out;
  std::set<std::pair<std::string, std::string>> seen;
  for_each_line(path, [&](const std::string& line) {
    TrainingPair pair = parse_pair(line);
    if (!seen.emplace(normalize_ws(pair.input), normalize_ws(pair.output)).second) {
      fail(ErrorKind::kValidation, "fields 'input'/'output': duplicate pair");
    }
    out.push_back(std::move(pair));
  });
  return out;
}

void write_pairs(const std::vector<TrainingPair>& pairs, const std::filesystem::path& path) {
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& pair : pairs) {
    validate(pair);
    if (!seen.emplace(normalize_ws(pair.input), normalize_ws(pair.output)).second) {
      fail(ErrorKind::kValidation, "fields 'input'/'output': duplicate pair");
    }
  }
  LineWriter out(path);
  for (const auto& pair : pairs) out.write(serialize(pair));
  out.close();
}

std::vector<ExternalVerdict> read_external_verdicts(const std::filesystem::path& path) {
  std::vector<ExternalVerdict> out;
  for_each_line(path, [&](const std::string& line) {
    const ordered_json obj = parse_object(line);
    ExternalVerdict v;
    v.id = get_field<std::string>(obj, "id");
    v.member_index = get_field<std::size_t>(obj, "member_index");
    v.probability = get_field<double>(obj, "probability");
    if (!(v.probability >= 0.0 && v.probability <= 1.0)) {
      fail(ErrorKind::kValidation, "field 'probability' must lie in [0, 1]");
    }
    out.push_back(std::move(v));
  });
  return out;
}

void write_external_verdicts(const std::vector<ExternalVerdict>& verdicts,
                             const std::filesystem::path& path) {
  LineWriter out(path);
  for (const auto& v : verdicts) {
    ordered_json obj;
    obj["id"] = v.id;
    obj["member_index"] = v.member_index;
    obj["probability"] = v.probability;
    out.write(obj.dump());
  }
  out.close();
}

}  // namespace accbound
