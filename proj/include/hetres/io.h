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


// JSON-lines ingestion, label output, pairwise evaluation and the batch
// command line.

#ifndef HETRES_IO_H_
#define HETRES_IO_H_

#include <cstddef>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "hetres/records.h"

namespace hetres {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string &what);

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// One record per line: {"id": str, "source": str,
// "fields": [{"attr": str, "values": [str, ...]}, ...]}. Blank lines are
// skipped. Values are normalized; values that normalize to empty are dropped.
RecordStore ParseInput(std::istream &in);
RecordStore ParseInputFile(const std::string &path);

// External id -> entity id. Reads lines {"id": str, "entity": str | number}.
using EntityLabels = std::map<std::string, std::string>;
EntityLabels ReadLabels(std::istream &in);
EntityLabels ReadLabelsFile(const std::string &path);

// Entity of record rid is the external id of its root.
EntityLabels ExternalLabels(const RecordStore &store,
                          const std::vector<Rid> &labels);

// One line {"id", "entity"} per record in rid order.
void WriteLabels(std::ostream &out, const RecordStore &store,
                 const std::vector<Rid> &labels);

struct EvalReport {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t true_positive = 0;
  std::size_t emitted = 0;  // same-entity pairs in the labels
  std::size_t gold = 0;     // same-entity pairs in the gold standard

  std::string ToJson() const;
};

// Pairwise precision and recall over the records listed in `gold`. Throws
// std::invalid_argument when gold is empty or names a record absent from
// `labels`.
EvalReport Evaluate(const EntityLabels &labels, const EntityLabels &gold);

// Command-line entry point. Returns the process exit status: 0 on success,
// 1 on input or runtime errors, 2 on usage errors, 3 when the iteration cap
// was reached before a fixpoint.
int RunCli(int argc, const char *const *argv, std::ostream &out,
           std::ostream &err);

}  // namespace hetres

#endif  // HETRES_IO_H_
