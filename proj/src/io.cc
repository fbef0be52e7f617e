// Copyright 2026 The Hetres Authors.
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


#include "hetres/io.h"

#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <utility>

#include "CLI11.hpp"
#include "hetres/engine.h"
#include "json.hpp"

namespace hetres {
namespace {

using nlohmann::json;

const json &Member(const json &doc, const char *key, std::size_t line) {
  auto it = doc.find(key);
  if (it == doc.end()) {
    throw ParseError(line, std::string("missing \"") + key + "\"");
  }
  return *it;
}

std::string StringMember(const json &doc, const char *key, std::size_t line) {
  const json &v = Member(doc, key, line);
  if (!v.is_string()) {
    throw ParseError(line, std::string("\"") + key + "\" must be a string");
  }
  return v.get<std::string>();
}

std::ifstream OpenInput(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return in;
}

// Number of unordered pairs among n items.
std::size_t Pairs(std::size_t n) { return n * (n - (n > 0 ? 1 : 0)) / 2; }

double Ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

ParseError::ParseError(std::size_t line, const std::string &what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what),
      line_(line) {}

RecordStore ParseInput(std::istream &in) {
  RecordStore store;
  std::set<std::string> ids;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    json doc;
    try {
      doc = json::parse(text);
    } catch (const json::parse_error &e) {
      throw ParseError(line, std::string("malformed JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ParseError(line, "record must be an object");

    std::string id = StringMember(doc, "id", line);
    const std::string source = StringMember(doc, "source", line);
    if (!ids.insert(id).second) throw ParseError(line, "duplicate id " + id);

    const json &fields = Member(doc, "fields", line);
    if (!fields.is_array() || fields.empty()) {
      throw ParseError(line, "record " + id + " has no fields");
    }
    std::set<std::string> attrs;
    std::vector<Field> out;
    for (const json &f : fields) {
      if (!f.is_object()) throw ParseError(line, "field must be an object");
      const std::string attr = StringMember(f, "attr", line);
      if (!attrs.insert(attr).second) {
        throw ParseError(line, "attribute " + attr + " repeated in record " +
                                   id + " (attributes must not be redundant)");
      }
      const json &values = Member(f, "values", line);
      if (!values.is_array() || values.empty()) {
        throw ParseError(line, "field " + attr + " has no values");
      }
      Field field;
      field.AddOrigin(AttrOrigin{source, attr});
      for (const json &v : values) {
        if (!v.is_string()) {
          throw ParseError(line, "values of " + attr + " must be strings");
        }
        std::string value = NormalizeValue(v.get<std::string>());
        if (!value.empty()) field.AddValue(std::move(value));
      }
      if (field.values.empty()) {
        throw ParseError(line, "field " + attr + " has only empty values");
      }
      out.push_back(std::move(field));
    }
    store.Add(std::move(id), std::move(out));
  }
  if (store.original_count() == 0) throw ParseError(line, "no records");
  return store;
}

RecordStore ParseInputFile(const std::string &path) {
  std::ifstream in = OpenInput(path);
  return ParseInput(in);
}

EntityLabels ReadLabels(std::istream &in) {
  EntityLabels out;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    json doc;
    try {
      doc = json::parse(text);
    } catch (const json::parse_error &e) {
      throw ParseError(line, std::string("malformed JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ParseError(line, "label must be an object");
    std::string id = StringMember(doc, "id", line);
    const json &entity = Member(doc, "entity", line);
    std::string value;
    if (entity.is_string()) {
      value = entity.get<std::string>();
    } else if (entity.is_number()) {
      value = entity.dump();
    } else {
      throw ParseError(line, "\"entity\" must be a string or number");
    }
    if (!out.emplace(std::move(id), std::move(value)).second) {
      throw ParseError(line, "duplicate id in labels");
    }
  }
  return out;
}

EntityLabels ReadLabelsFile(const std::string &path) {
  std::ifstream in = OpenInput(path);
  return ReadLabels(in);
}

EntityLabels ExternalLabels(const RecordStore &store,
                            const std::vector<Rid> &labels) {
  EntityLabels out;
  for (Rid r = 1; r <= labels.size(); ++r) {
    out.emplace(store.external_id(r), store.external_id(labels[r - 1]));
  }
  return out;
}

void WriteLabels(std::ostream &out, const RecordStore &store,
                 const std::vector<Rid> &labels) {
  for (Rid r = 1; r <= labels.size(); ++r) {
    json row = {{"id", store.external_id(r)},
                {"entity", store.external_id(labels[r - 1])}};
    out << row.dump() << '\n';
  }
}

std::string EvalReport::ToJson() const {
  json doc = {{"precision", precision},   {"recall", recall},
              {"f1", f1},                 {"true_positive", true_positive},
              {"emitted_pairs", emitted}, {"gold_pairs", gold}};
  return doc.dump();
}

EvalReport Evaluate(const EntityLabels &labels, const EntityLabels &gold) {
  if (gold.empty()) throw std::invalid_argument("empty ground truth");
  std::map<std::string, std::size_t> by_label, by_gold;
  std::map<std::pair<std::string, std::string>, std::size_t> cells;
  for (const auto &[id, truth] : gold) {
    auto it = labels.find(id);
    if (it == labels.end()) {
      throw std::invalid_argument("ground truth names unlabeled record " + id);
    }
    ++by_label[it->second];
    ++by_gold[truth];
    ++cells[{it->second, truth}];
  }
  EvalReport r;
  for (const auto &[_, n] : cells) r.true_positive += Pairs(n);
  for (const auto &[_, n] : by_label) r.emitted += Pairs(n);
  for (const auto &[_, n] : by_gold) r.gold += Pairs(n);
  if (r.emitted == 0 && r.gold == 0) {
    r.precision = r.recall = r.f1 = 1.0;
    return r;
  }
  r.precision = Ratio(r.true_positive, r.emitted);
  r.recall = Ratio(r.true_positive, r.gold);
  if (r.precision > 0.0 && r.recall > 0.0) {
    r.f1 = 2.0 / (1.0 / r.precision + 1.0 / r.recall);
  }
  return r;
}

int RunCli(int argc, const char *const *argv, std::ostream &out,
           std::ostream &err) {
  CLI::App app{"Entity resolution over heterogeneous records", "hetres"};
  EngineConfig config;
  std::string input, gold_path, matchings_path, index_path, out_path,
      report_path;
  std::size_t max_iters = 0;
  app.add_option("--input", input, "records, JSON lines")->required();
  app.add_option("--delta", config.delta, "record similarity threshold");
  app.add_option("--xi", config.xi, "value similarity threshold");
  app.add_option("--q", config.q, "gram length");
  app.add_option("--rho", config.rho, "error bound for schema matchings");
  app.add_option("--prior", config.prior, "vote accuracy prior");
  app.add_option("--max-iters", max_iters, "iteration cap (default: n)");
  app.add_option("--ground-truth", gold_path, "gold labels, JSON lines");
  app.add_option("--emit-matchings", matchings_path,
                 "write promoted attribute matchings");
  app.add_option("--dump-index", index_path, "write the initial pair index");
  app.add_option("--out", out_path, "labels output (default stdout)");
  app.add_option("--report", report_path,
                 "evaluation report output (default stderr)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    return app.exit(e, out, err);
  }
  try {
    config.Validate();
    if (app.count("--max-iters") && max_iters < 1) {
      throw std::invalid_argument("max-iters must be at least 1");
    }
  } catch (const std::invalid_argument &e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  }
  config.max_iterations = max_iters;

  try {
    EntityLabels gold;
    if (!gold_path.empty()) gold = ReadLabelsFile(gold_path);

    Engine engine(ParseInputFile(input), config);
    if (!index_path.empty()) {
      std::ofstream dump(index_path);
      if (!dump) throw std::runtime_error("cannot write " + index_path);
      engine.index().Dump(dump);
    }
    const ResolutionResult result = engine.Run();

    if (out_path.empty()) {
      WriteLabels(out, engine.store(), result.labels);
    } else {
      std::ofstream file(out_path);
      if (!file) throw std::runtime_error("cannot write " + out_path);
      WriteLabels(file, engine.store(), result.labels);
    }
    if (!matchings_path.empty()) {
      std::ofstream file(matchings_path);
      if (!file) throw std::runtime_error("cannot write " + matchings_path);
      WritePromotions(file, result.promoted);
    }
    if (!gold_path.empty()) {
      const EvalReport report =
          Evaluate(ExternalLabels(engine.store(), result.labels), gold);
      if (report_path.empty()) {
        err << report.ToJson() << '\n';
      } else {
        std::ofstream file(report_path);
        if (!file) throw std::runtime_error("cannot write " + report_path);
        file << report.ToJson() << '\n';
      }
    }
    if (!result.converged) {
      err << "no fixpoint after " << result.iterations
          << " iterations; labels are partial\n";
      return 3;
    }
  } catch (const std::exception &e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace hetres
