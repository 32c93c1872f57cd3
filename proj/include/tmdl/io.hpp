// Copyright 2026 The tmdl Authors. All Rights Reserved.
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

#pragma once

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "tmdl/common.hpp"

namespace tmdl::io {

using Json = nlohmann::ordered_json;
using Cell = std::variant<double, long long, std::string>;

// A CSV payload: named columns, rows of cells in column order.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  explicit Table(std::vector<std::string> cols = {}) : columns(std::move(cols)) {}

  void add(std::vector<Cell> row) {
    if (row.size() != columns.size())
      throw DimensionMismatch("row has " + std::to_string(row.size()) + " cells, table has " +
                              std::to_string(columns.size()) + " columns");
    rows.push_back(std::move(row));
  }

  // NaN cells per column, only columns that have any.
  std::map<std::string, long> nan_cells() const {
    std::map<std::string, long> out;
    for (const auto& r : rows)
      for (size_t j = 0; j < r.size(); ++j)
        if (const double* d = std::get_if<double>(&r[j]); d && std::isnan(*d)) ++out[columns[j]];
    return out;
  }
};

// 17 significant digits, so that strtod gives the same double back.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string format_cell(const Cell& c) {
  if (const double* d = std::get_if<double>(&c)) return format_double(*d);
  if (const long long* i = std::get_if<long long>(&c)) return std::to_string(*i);
  const std::string& s = std::get<std::string>(c);
  if (s.find_first_of(",\n\r\"") != std::string::npos)
    throw InvalidArgument("CSV text cell contains a separator: '" + s + "'");
  return s;
}

inline std::string to_csv(const Table& t) {
  std::string out;
  for (size_t j = 0; j < t.columns.size(); ++j) out += (j ? "," : "") + t.columns[j];
  out += '\n';
  for (const auto& r : t.rows) {
    for (size_t j = 0; j < r.size(); ++j) out += (j ? "," : "") + format_cell(r[j]);
    out += '\n';
  }
  return out;
}

inline void write_text(const std::string& text, const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path.string() + "' for writing");
  f.write(text.data(), std::streamsize(text.size()));
  f.close();
  if (!f) throw IoError("write to '" + path.string() + "' failed");
}

inline void emit_csv(const Table& t, const std::filesystem::path& path) { write_text(to_csv(t), path); }

inline void emit_json(const Json& meta, const std::filesystem::path& path) {
  write_text(meta.dump(2) + "\n", path);
}

// Raw read-back: header plus text cells.
struct CsvText {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  long column(const std::string& name) const {
    for (size_t j = 0; j < columns.size(); ++j)
      if (columns[j] == name) return long(j);
    throw InvalidArgument("no column '" + name + "'");
  }
};

inline std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(line);
  while (std::getline(is, cur, ',')) out.push_back(cur);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline CsvText read_csv(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path.string() + "'");
  CsvText out;
  std::string line;
  if (!std::getline(f, line)) throw IoError("'" + path.string() + "' has no header row");
  out.columns = split_line(line);
  while (std::getline(f, line)) {
    auto cells = split_line(line);
    if (cells.size() != out.columns.size())
      throw IoError("'" + path.string() + "': row with " + std::to_string(cells.size()) +
                    " cells under " + std::to_string(out.columns.size()) + " columns");
    out.rows.push_back(std::move(cells));
  }
  return out;
}

inline double parse_double(const std::string& s) {
  if (s == "nan") return std::nan("");
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || *end != '\0' || (errno == ERANGE && std::isinf(v)))
    throw InvalidArgument("not a number: '" + s + "'");
  return v;
}

// Files of one run plus the metadata sidecar describing them.
struct ResultBundle {
  std::vector<std::pair<std::string, Table>> files;
  Json meta = Json::object();

  Table& add(const std::string& name, std::vector<std::string> columns) {
    files.emplace_back(name, Table(std::move(columns)));
    return files.back().second;
  }
};

inline Json describe_files(const ResultBundle& b) {
  Json files = Json::array();
  for (const auto& [name, t] : b.files) {
    Json f;
    f["name"] = name;
    f["rows"] = t.rows.size();
    f["columns"] = t.columns;
    Json nan = Json::object();
    for (const auto& [col, k] : t.nan_cells()) nan[col] = k;
    f["nan_cells"] = nan;
    files.push_back(f);
  }
  return files;
}

// Writes every CSV and metadata.json into dir (which must exist).
inline void write_bundle(const ResultBundle& b, const std::filesystem::path& dir) {
  for (const auto& [name, t] : b.files) emit_csv(t, dir / name);
  Json meta = b.meta;
  meta["files"] = describe_files(b);
  emit_json(meta, dir / "metadata.json");
}

}  // namespace tmdl::io
