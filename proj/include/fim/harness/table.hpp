// SPDX-License-Identifier: Apache-2.0
//
// fim-mimo: capacity optimization for MIMO links between flexible
// intelligent metasurfaces
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace fim::harness {

inline constexpr const char* kVersion = "fim-mimo 1.0.0";

/// Shortest round-trip decimal form of a double (std::to_chars). Infinities
/// come out as "inf"/"-inf". All table output goes through this, which is
/// what makes byte-identical reproduction achievable.
std::string format_double(double value);

/// Per-(sweep value, scheme) aggregate of one experiment.
struct SweepRow {
  std::string sweep_param;
  std::string sweep_value;
  std::string scheme;
  int realizations = 0;
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::vector<double> per_realization;  // kept only when requested
};

/// Cell-level result table plus metadata. `cells` holds final formatted
/// strings; writers serialize them verbatim. Sweep experiments also retain
/// typed rows for programmatic use.
struct ResultTable {
  struct Meta {
    std::string config_hash;  // hex FNV-1a of the canonical config text
    std::uint64_t seed = 0;
    std::string version = kVersion;
    std::string experiment;
  } meta;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> cells;
  std::vector<SweepRow> sweep_rows;  // empty for trace-style tables
};

/// CSV with a '#'-prefixed JSON metadata header line.
void write_csv(const ResultTable& table, std::ostream& out);

/// One JSON object: {"meta": {...}, "columns": [...], "rows": [[...], ...]}.
void write_json(const ResultTable& table, std::ostream& out);

/// Dispatch on "csv" | "json".
void write_table(const ResultTable& table, const std::string& format,
                 std::ostream& out);

}  // namespace fim::harness
