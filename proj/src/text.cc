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

#include "sqlrobust/text.h"

#include <array>
#include <cctype>

namespace sqlrobust {
namespace {

bool IsWordByte(unsigned char c) { return std::isalnum(c) || c >= 0x80; }

constexpr std::array<std::string_view, 4> kReservedWords = {"id", "age", "name", "year"};

}  // namespace

std::string ToLower(std::string_view s) {
  std::string out(s);
  for (char &c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::vector<Token> Tokenize(std::string_view text) {
  std::vector<Token> tokens;
  bool space = false;
  std::size_t i = 0;
  while (i < text.size()) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (std::isspace(c)) {
      space = true;
      ++i;
      continue;
    }
    Token token;
    token.space_before = space && !tokens.empty();
    if (IsWordByte(c)) {
      std::size_t j = i;
      while (j < text.size() && IsWordByte(static_cast<unsigned char>(text[j]))) ++j;
      token.surface = std::string(text.substr(i, j - i));
      token.norm = ToLower(token.surface);
      token.is_word = true;
      i = j;
    } else {
      token.surface = std::string(1, text[i]);
      ++i;
    }
    tokens.push_back(std::move(token));
    space = false;
  }
  return tokens;
}

std::string Detokenize(const std::vector<Token> &tokens) {
  std::string out;
  for (const Token &token : tokens) {
    if (token.space_before && !out.empty()) out += ' ';
    out += token.surface;
  }
  return out;
}

std::vector<std::string> NormalizeTokens(std::string_view phrase) {
  std::vector<std::string> words;
  std::string current;
  for (char ch : phrase) {
    const auto c = static_cast<unsigned char>(ch);
    if (IsWordByte(c)) {
      current += static_cast<char>(std::tolower(c));
    } else if (!current.empty()) {
      words.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) words.push_back(std::move(current));
  return words;
}

std::string JoinTokens(const std::vector<std::string> &words, std::size_t begin,
                       std::size_t end) {
  std::string out;
  for (std::size_t i = begin; i < end && i < words.size(); ++i) {
    if (i > begin) out += ' ';
    out += words[i];
  }
  return out;
}

std::string NormalizePhrase(std::string_view phrase) {
  const auto words = NormalizeTokens(phrase);
  return JoinTokens(words, 0, words.size());
}

bool IsReservedWord(std::string_view normalized_word) {
  for (std::string_view reserved : kReservedWords) {
    if (normalized_word == reserved) return true;
  }
  return false;
}

bool ContainsReservedWord(std::string_view normalized_phrase) {
  for (const std::string &word : NormalizeTokens(normalized_phrase)) {
    if (IsReservedWord(word)) return true;
  }
  return false;
}

}  // namespace sqlrobust
