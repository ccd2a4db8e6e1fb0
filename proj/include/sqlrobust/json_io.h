// Copyright 2026 The sqlrobust Authors.
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

#ifndef SQLROBUST_JSON_IO_H_
#define SQLROBUST_JSON_IO_H_

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>

#include "json.hpp"

namespace sqlrobust {

using Json = nlohmann::ordered_json;

// Reads and parses a JSON file. Throws InputError naming the path on I/O or
// parse failure.
Json ReadJsonFile(const std::filesystem::path &path);

std::string ReadTextFile(const std::filesystem::path &path);

// Writes through a sibling temp file that is renamed into place on Commit().
// An uncommitted writer removes its temp file on destruction.
class AtomicFileWriter {
 public:
  explicit AtomicFileWriter(std::filesystem::path path);
  ~AtomicFileWriter();

  AtomicFileWriter(const AtomicFileWriter &) = delete;
  AtomicFileWriter &operator=(const AtomicFileWriter &) = delete;

  std::ostream &stream() { return out_; }
  void Write(std::string_view data) { out_ << data; }
  void Commit();

 private:
  std::filesystem::path path_;
  std::filesystem::path temp_path_;
  std::ofstream out_;
  bool committed_ = false;
};

void WriteFileAtomic(const std::filesystem::path &path, std::string_view content);

// Pretty-printed JSON with a trailing newline.
void WriteJsonFile(const std::filesystem::path &path, const Json &value);

// UTC wall-clock time, ISO-8601. Only ever stored under metadata.generated_at.
std::string UtcTimestamp();

}  // namespace sqlrobust

#endif  // SQLROBUST_JSON_IO_H_
