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

#ifndef SYMTEE_CPARSE_LEXER_H_
#define SYMTEE_CPARSE_LEXER_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "symtee/cparse/errors.h"

namespace symtee::cparse {

enum class TokenKind {
  kIdentifier,
  kKeyword,
  kInt,
  kChar,
  kString,
  kPunct,
  kInclude,        // #include line; text = header spelling
  kDefine,         // #define line; text = name, value = body
  kDirective,      // any other single-line directive
  kOpaqueRegion,   // #if ... #endif block, kept verbatim
  kEnd,
};

struct Token {
  TokenKind kind = TokenKind::kEnd;
  std::string text;    // identifier/keyword/punctuator/literal spelling
  std::string value;   // macro body for kDefine
  std::uint64_t int_value = 0;
  bool from_macro = false;
  std::uint32_t start = 0;  // byte offsets into the source
  std::uint32_t end = 0;
  std::uint32_t line = 1;
  std::uint32_t column = 1;
  std::uint32_t end_line = 1;

  bool Is(TokenKind k, std::string_view t) const { return kind == k && text == t; }
  bool IsPunct(std::string_view t) const { return Is(TokenKind::kPunct, t); }
  bool IsKeyword(std::string_view t) const { return Is(TokenKind::kKeyword, t); }
};

// Splits `source` into tokens. Comments are dropped; preprocessor lines are
// turned into directive tokens; object-like integer macros are expanded in
// the tokens that follow their definition. Throws ParseError on malformed
// literals or unterminated comments.
std::vector<Token> Tokenize(std::string_view source);

// Parses a C integer literal spelling (decimal, hex, octal, with u/l suffixes)
// or a character literal. Returns false if the spelling is not a literal.
bool ParseIntegerSpelling(std::string_view spelling, std::uint64_t* value);

}  // namespace symtee::cparse

#endif  // SYMTEE_CPARSE_LEXER_H_
