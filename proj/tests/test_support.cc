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

#include "test_support.h"

#include <sstream>

namespace sqlrobust::testing {

CliRun RunCliArgs(const std::vector<std::string> &args) {
  std::vector<const char *> argv = {"sqlrobust"};
  for (const std::string &a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  CliRun run;
  run.code = RunCli(static_cast<int>(argv.size()), argv.data(), out, err);
  run.out = out.str();
  run.err = err.str();
  return run;
}

Json StripMetadata(Json value) {
  if (value.is_object()) {
    value.erase("metadata");
    for (auto &[k, v] : value.items()) v = StripMetadata(v);
  } else if (value.is_array()) {
    for (auto &v : value) v = StripMetadata(v);
  }
  return value;
}

}  // namespace sqlrobust::testing
