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

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

namespace sledsim::harness {

using Cell = std::variant<double, std::int64_t, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row);
};

/// "%.16e" numbers, header row, comma separated.
std::string format_csv(const Table& table);
nlohmann::json table_json(const Table& table);

std::string sha256_hex(const std::string& bytes);

struct FileRecord {
  std::string path;
  std::string sha256;
  std::size_t bytes = 0;
};

/// Writes files into one directory and remembers what it wrote.
class OutputDir {
 public:
  explicit OutputDir(std::filesystem::path root, bool json_mirror = true);

  const std::filesystem::path& root() const { return root_; }
  /// Writes name.csv and, with the mirror enabled, name.json.
  void write_table(const std::string& name, const Table& table);
  void write_json(const std::string& name, const nlohmann::json& doc);
  void write_text(const std::string& file, const std::string& text);
  const std::vector<FileRecord>& files() const { return files_; }

 private:
  std::filesystem::path root_;
  bool json_mirror_;
  std::vector<FileRecord> files_;
};

}  // namespace sledsim::harness
