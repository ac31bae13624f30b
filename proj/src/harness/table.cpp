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

#include "fim/harness/table.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace fim::harness {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, result.ptr);
}

namespace {

std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char c : s) {
    if (c == '"' || c == '\\') {
      out.push_back('\\');
      out.push_back(c);
    } else {
      out.push_back(c);
    }
  }
  return out;
}

std::string meta_json(const ResultTable::Meta& meta) {
  std::string out = "{\"config_hash\":\"" + json_escape(meta.config_hash) +
                    "\",\"seed\":" + std::to_string(meta.seed) +
                    ",\"version\":\"" + json_escape(meta.version) +
                    "\",\"experiment\":\"" + json_escape(meta.experiment) +
                    "\"}";
  return out;
}

}  // namespace

void write_csv(const ResultTable& table, std::ostream& out) {
  out << "# " << meta_json(table.meta) << '\n';
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (c) out << ',';
    out << table.columns[c];
  }
  out << '\n';
  for (const auto& row : table.cells) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out << ',';
      out << row[c];
    }
    out << '\n';
  }
}

void write_json(const ResultTable& table, std::ostream& out) {
  out << "{\"meta\":" << meta_json(table.meta) << ",\"columns\":[";
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (c) out << ',';
    out << '"' << json_escape(table.columns[c]) << '"';
  }
  out << "],\"rows\":[";
  for (std::size_t r = 0; r < table.cells.size(); ++r) {
    if (r) out << ',';
    out << '[';
    for (std::size_t c = 0; c < table.cells[r].size(); ++c) {
      if (c) out << ',';
      out << '"' << json_escape(table.cells[r][c]) << '"';
    }
    out << ']';
  }
  out << "]}\n";
}

void write_table(const ResultTable& table, const std::string& format,
                 std::ostream& out) {
  if (format == "csv") {
    write_csv(table, out);
  } else if (format == "json") {
    write_json(table, out);
  } else {
    throw std::invalid_argument("write_table: unknown format '" + format +
                                "'");
  }
}

}  // namespace fim::harness
