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

#ifndef SQLROBUST_TEXT_H_
#define SQLROBUST_TEXT_H_

#include <string>
#include <string_view>
#include <vector>

namespace sqlrobust {

// A question token. Word tokens are maximal runs of alphanumeric (or
// non-ASCII) bytes; every other non-space byte is a single punctuation token.
// `space_before` records the original spacing so that untouched text
// detokenizes byte-for-byte.
struct Token {
  std::string surface;
  std::string norm;  // lowercased word, empty for punctuation
  bool space_before = false;
  bool is_word = false;

  bool operator==(const Token &) const = default;
};

std::vector<Token> Tokenize(std::string_view text);

std::string Detokenize(const std::vector<Token> &tokens);

// Lowercased word tokens of `phrase`; punctuation and underscores separate
// words and are dropped.
std::vector<std::string> NormalizeTokens(std::string_view phrase);

// NormalizeTokens joined by single spaces. A fixed point: applying it to its
// own output returns the output unchanged.
std::string NormalizePhrase(std::string_view phrase);

std::string JoinTokens(const std::vector<std::string> &words, std::size_t begin,
                       std::size_t end);

std::string ToLower(std::string_view s);

// {id, age, name, year}: never substituted.
bool IsReservedWord(std::string_view normalized_word);

// True if any word of the normalized phrase is reserved.
bool ContainsReservedWord(std::string_view normalized_phrase);

}  // namespace sqlrobust

#endif  // SQLROBUST_TEXT_H_
