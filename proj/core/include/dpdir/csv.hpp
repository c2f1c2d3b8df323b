// Copyright 2026 The dpdirichlet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DPDIR_CSV_HPP_
#define DPDIR_CSV_HPP_

#include <string>
#include <vector>

#include "dpdir/dirichlet.hpp"

namespace dpdir {

struct IngestResult {
  CompositionalDataset data;
  std::vector<std::string> group_labels;  // empty when no group column
  std::size_t dropped_zero_rows = 0;
};

// Reads a header-line CSV of proportions, one column per component, with an
// optional group-label column. Rows containing a zero entry are dropped
// (and counted) when drop_zero is set; otherwise they are validation
// errors. All parse and validation errors report 1-based line numbers.
IngestResult ingest_csv(const std::string& path,
                        const std::string& group_column = "",
                        bool drop_zero = false);

}  // namespace dpdir

#endif  // DPDIR_CSV_HPP_
