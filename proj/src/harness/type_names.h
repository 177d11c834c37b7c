// Copyright 2026 The SymTEE Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Spelling-level helpers for C type names, shared by lowering and synthesis.

#ifndef SYMTEE_HARNESS_TYPE_NAMES_H_
#define SYMTEE_HARNESS_TYPE_NAMES_H_

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>

namespace symtee::harness::internal {

// Drops const/volatile/restrict words from a base type spelling.
inline std::string StripQualifiers(const std::string& base) {
  std::string out;
  size_t i = 0;
  while (i < base.size()) {
    size_t j = base.find(' ', i);
    if (j == std::string::npos) j = base.size();
    std::string word = base.substr(i, j - i);
    if (!word.empty() && word != "const" && word != "volatile" && word != "restrict") {
      if (!out.empty()) out += ' ';
      out += word;
    }
    i = j + 1;
  }
  return out;
}

// True for spellings built only from integer keywords ("unsigned long").
inline bool IsIntegerWords(const std::string& base) {
  static const std::set<std::string> kWords = {"unsigned", "signed", "char", "short",
                                               "int",      "long",   "_Bool"};
  if (base.empty()) return false;
  size_t i = 0;
  while (i < base.size()) {
    size_t j = base.find(' ', i);
    if (j == std::string::npos) j = base.size();
    if (!kWords.count(base.substr(i, j - i))) return false;
    i = j + 1;
  }
  return true;
}

// Width and signedness of integer typedefs that need no visible declaration.
inline std::optional<std::pair<int, bool>> WellKnownIntType(const std::string& name) {
  static const std::map<std::string, std::pair<int, bool>> kInts = {
      {"size_t", {64, false}},   {"ssize_t", {64, true}},   {"ptrdiff_t", {64, true}},
      {"uint8_t", {8, false}},   {"uint16_t", {16, false}}, {"uint32_t", {32, false}},
      {"uint64_t", {64, false}}, {"int8_t", {8, true}},     {"int16_t", {16, true}},
      {"int32_t", {32, true}},   {"int64_t", {64, true}},   {"uintptr_t", {64, false}},
      {"intptr_t", {64, true}},  {"TEE_Result", {32, false}}, {"bool", {8, false}}};
  auto it = kInts.find(name);
  if (it == kInts.end()) return std::nullopt;
  return it->second;
}

// Opaque TEE handle typedefs, modeled as void pointers.
inline bool IsTeeHandleType(const std::string& name) {
  return name == "TEE_ObjectHandle" || name == "TEE_OperationHandle" ||
         name == "TEE_TASessionHandle" || name == "TEE_PropSetHandle" ||
         name == "TEE_ObjectEnumHandle";
}

}  // namespace symtee::harness::internal

#endif  // SYMTEE_HARNESS_TYPE_NAMES_H_
