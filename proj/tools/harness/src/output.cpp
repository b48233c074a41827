// Copyright 2026 The sledsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "sledsim/harness/output.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "sledsim/errors.hpp"

namespace sledsim::harness {
namespace {

std::string format_cell(const Cell& c) {
  if (const double* d = std::get_if<double>(&c)) {
    if (std::isnan(*d)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.16e", *d);
    return buf;
  }
  if (const std::int64_t* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  const std::string& s = std::get<std::string>(c);
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) {
    if (ch == '"') q += '"';
    q += ch;
  }
  return q + "\"";
}

}  // namespace

void Table::add(std::vector<Cell> row) {
  if (row.size() != columns.size()) throw Error("table: row width differs from the header");
  rows.push_back(std::move(row));
}

std::string format_csv(const Table& table) {
  std::string out;
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i) out += ',';
    out += table.columns[i];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_cell(row[i]);
    }
    out += '\n';
  }
  return out;
}

nlohmann::json table_json(const Table& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : table.rows) {
    nlohmann::json r = nlohmann::json::array();
    for (const auto& c : row) std::visit([&](const auto& v) { r.push_back(v); }, c);
    rows.push_back(std::move(r));
  }
  return {{"columns", table.columns}, {"rows", rows}};
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw Error("sha256: digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

OutputDir::OutputDir(std::filesystem::path root, bool json_mirror)
    : root_(std::move(root)), json_mirror_(json_mirror) {
  std::filesystem::create_directories(root_);
}

void OutputDir::write_text(const std::string& file, const std::string& text) {
  const auto path = root_ / file;
  std::ofstream f(path, std::ios::binary);
  f << text;
  if (!f) throw Error("output: cannot write " + path.string());
  files_.push_back({file, sha256_hex(text), text.size()});
}

void OutputDir::write_table(const std::string& name, const Table& table) {
  write_text(name + ".csv", format_csv(table));
  if (json_mirror_) write_text(name + ".json", table_json(table).dump(1) + "\n");
}

void OutputDir::write_json(const std::string& name, const nlohmann::json& doc) {
  write_text(name + ".json", doc.dump(1) + "\n");
}

}  // namespace sledsim::harness
