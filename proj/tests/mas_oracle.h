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

#ifndef SQLROBUST_TESTS_MAS_ORACLE_H_
#define SQLROBUST_TESTS_MAS_ORACLE_H_

#include <algorithm>
#include <cctype>
#include <string>
#include <vector>

#include "sqlrobust/schema.h"

namespace sqlrobust::testing {

// Lowercase word runs, split at any character that is neither alphanumeric
// nor a space.
inline std::vector<std::vector<std::string>> Runs(const std::string &question) {
  std::vector<std::vector<std::string>> runs(1);
  std::string word;
  auto flush = [&] {
    if (!word.empty()) runs.back().push_back(word);
    word.clear();
  };
  for (unsigned char c : question) {
    if (std::isalnum(c)) {
      word += static_cast<char>(std::tolower(c));
    } else {
      flush();
      if (c != ' ' && !runs.back().empty()) runs.emplace_back();
    }
  }
  flush();
  return runs;
}

inline bool Occurs(const std::vector<std::vector<std::string>> &runs, const std::string &phrase) {
  std::vector<std::string> words;
  std::string w;
  for (char c : phrase + " ") {
    if (c == ' ') {
      if (!w.empty()) words.push_back(w);
      w.clear();
    } else {
      w += c;
    }
  }
  for (const auto &run : runs) {
    for (std::size_t i = 0; i + words.size() <= run.size(); ++i) {
      if (std::equal(words.begin(), words.end(), run.begin() + static_cast<long>(i))) return true;
    }
  }
  return false;
}

// Selection rule stated independently: among annotations occurring in the
// question pick the one with most words, earliest in list order on ties;
// the default when none occurs.
inline std::string ExpectedSelection(const AnnotationSet &set, const std::string &question) {
  const auto runs = Runs(question);
  std::string best;
  std::size_t best_words = 0;
  for (const std::string &a : set.All()) {
    if (!Occurs(runs, a)) continue;
    const std::size_t n = static_cast<std::size_t>(std::count(a.begin(), a.end(), ' ')) + 1;
    if (n > best_words) {
      best = a;
      best_words = n;
    }
  }
  return best_words ? best : set.default_phrase();
}

}  // namespace sqlrobust::testing

#endif  // SQLROBUST_TESTS_MAS_ORACLE_H_
