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

#include "symtee/cparse/lexer.h"

#include <array>
#include <cctype>
#include <map>
#include <set>
#include <utility>

namespace symtee::cparse {
namespace {

const std::set<std::string, std::less<>>& Keywords() {
  static const std::set<std::string, std::less<>> kKeywords = {
      "auto",     "break",    "case",     "char",   "const",    "continue",
      "default",  "do",       "double",   "else",   "enum",     "extern",
      "float",    "for",      "goto",     "if",     "inline",   "int",
      "long",     "register", "restrict", "return", "short",    "signed",
      "sizeof",   "static",   "struct",   "switch", "typedef",  "union",
      "unsigned", "void",     "volatile", "while",  "_Bool",    "__asm__",
      "asm",      "__inline", "__inline__", "__restrict"};
  return kKeywords;
}

// Longest first within each leading character.
constexpr std::array<std::string_view, 48> kPuncts = {
    "<<=", ">>=", "...", "->", "++", "--", "<<", ">>", "<=", ">=", "==", "!=",
    "&&",  "||",  "+=",  "-=", "*=", "/=", "%=", "&=", "|=", "^=", "(",  ")",
    "[",   "]",   "{",   "}",  ";",  ",",  ":",  "?",  ".",  "+",  "-",  "*",
    "/",   "%",   "&",   "|",  "^",  "!",  "~",  "<",  ">",  "=",  "#",  "\\"};

bool IsIdentStart(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
bool IsIdentChar(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

std::string Trim(std::string_view s) {
  size_t b = 0;
  size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

// Removes comments from a directive body.
std::string StripComments(std::string_view s) {
  std::string out;
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '/' && i + 1 < s.size() && s[i + 1] == '/') break;
    if (s[i] == '/' && i + 1 < s.size() && s[i + 1] == '*') {
      size_t close = s.find("*/", i + 2);
      if (close == std::string_view::npos) break;
      out += ' ';
      i = close + 1;
      continue;
    }
    out += s[i];
  }
  return out;
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> Run() {
    std::vector<Token> out;
    bool line_start = true;
    while (true) {
      SkipSpaceAndComments(&line_start);
      if (pos_ >= src_.size()) break;
      char c = src_[pos_];
      if (c == '#' && line_start) {
        out.push_back(LexDirective());
        line_start = true;
        continue;
      }
      line_start = false;
      Token t;
      t.start = static_cast<std::uint32_t>(pos_);
      t.line = line_;
      t.column = Column();
      if (IsIdentStart(c)) {
        size_t b = pos_;
        while (pos_ < src_.size() && IsIdentChar(src_[pos_])) ++pos_;
        t.text = std::string(src_.substr(b, pos_ - b));
        if (Keywords().count(t.text)) {
          t.kind = TokenKind::kKeyword;
        } else if (auto it = macros_.find(t.text); it != macros_.end()) {
          t.kind = TokenKind::kInt;
          t.int_value = it->second;
          t.from_macro = true;
        } else {
          t.kind = TokenKind::kIdentifier;
        }
      } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                 (c == '.' && pos_ + 1 < src_.size() &&
                  std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
        size_t b = pos_;
        while (pos_ < src_.size() &&
               (IsIdentChar(src_[pos_]) || src_[pos_] == '.')) {
          ++pos_;
        }
        t.text = std::string(src_.substr(b, pos_ - b));
        if (!ParseIntegerSpelling(t.text, &t.int_value)) {
          throw ParseError("unsupported numeric literal '" + t.text + "'",
                           t.line, t.column);
        }
        t.kind = TokenKind::kInt;
      } else if (c == '\'') {
        size_t b = pos_;
        ScanQuoted('\'');
        t.text = std::string(src_.substr(b, pos_ - b));
        if (!ParseIntegerSpelling(t.text, &t.int_value)) {
          throw ParseError("malformed character literal", t.line, t.column);
        }
        t.kind = TokenKind::kChar;
      } else if (c == '"') {
        size_t b = pos_;
        ScanQuoted('"');
        t.text = std::string(src_.substr(b, pos_ - b));
        t.kind = TokenKind::kString;
      } else {
        bool matched = false;
        for (std::string_view p : kPuncts) {
          if (src_.substr(pos_, p.size()) == p) {
            t.text = std::string(p);
            pos_ += p.size();
            matched = true;
            break;
          }
        }
        if (!matched) {
          throw ParseError(std::string("unexpected character '") + c + "'",
                           t.line, t.column);
        }
        t.kind = TokenKind::kPunct;
      }
      t.end = static_cast<std::uint32_t>(pos_);
      t.end_line = line_;
      out.push_back(std::move(t));
    }
    Token end;
    end.kind = TokenKind::kEnd;
    end.start = end.end = static_cast<std::uint32_t>(src_.size());
    end.line = end.end_line = line_;
    end.column = Column();
    out.push_back(std::move(end));
    return out;
  }

 private:
  std::uint32_t Column() const {
    return static_cast<std::uint32_t>(pos_ - line_begin_ + 1);
  }

  void Advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      line_begin_ = pos_ + 1;
    }
    ++pos_;
  }

  void SkipSpaceAndComments(bool* line_start) {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '\n') {
        *line_start = true;
        Advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        Advance();
      } else if (c == '\\' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '\n') {
        Advance();
        Advance();
      } else if (src_.substr(pos_, 2) == "//") {
        while (pos_ < src_.size() && src_[pos_] != '\n') Advance();
      } else if (src_.substr(pos_, 2) == "/*") {
        std::uint32_t line = line_;
        std::uint32_t col = Column();
        size_t close = src_.find("*/", pos_ + 2);
        if (close == std::string_view::npos) {
          throw ParseError("unterminated comment", line, col);
        }
        while (pos_ < close + 2) Advance();
      } else {
        return;
      }
    }
  }

  void ScanQuoted(char quote) {
    std::uint32_t line = line_;
    std::uint32_t col = Column();
    Advance();
    while (pos_ < src_.size() && src_[pos_] != quote) {
      if (src_[pos_] == '\n') break;
      if (src_[pos_] == '\\' && pos_ + 1 < src_.size()) Advance();
      Advance();
    }
    if (pos_ >= src_.size() || src_[pos_] != quote) {
      throw ParseError("unterminated literal", line, col);
    }
    Advance();
  }

  // Reads one logical line (with backslash continuations) starting at pos_.
  std::string_view ReadLogicalLine() {
    size_t b = pos_;
    while (pos_ < src_.size() && src_[pos_] != '\n') {
      if (src_[pos_] == '\\' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '\n') {
        Advance();
      }
      Advance();
    }
    return src_.substr(b, pos_ - b);
  }

  static std::string DirectiveName(std::string_view line) {
    size_t i = 1;
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    size_t b = i;
    while (i < line.size() && IsIdentChar(line[i])) ++i;
    return std::string(line.substr(b, i - b));
  }

  Token LexDirective() {
    Token t;
    t.start = static_cast<std::uint32_t>(pos_);
    t.line = line_;
    t.column = Column();
    std::string_view line = ReadLogicalLine();
    std::string name = DirectiveName(line);
    size_t name_end = line.find(name, 1) + name.size();
    std::string rest = Trim(StripComments(line.substr(name_end)));
    if (name == "include") {
      t.kind = TokenKind::kInclude;
      t.text = rest;
    } else if (name == "define") {
      size_t i = 0;
      while (i < rest.size() && IsIdentChar(rest[i])) ++i;
      std::string macro = rest.substr(0, i);
      if (macro.empty() || (i < rest.size() && rest[i] == '(')) {
        t.kind = TokenKind::kDirective;
        t.text = std::string(line);
      } else {
        t.kind = TokenKind::kDefine;
        t.text = macro;
        t.value = Trim(rest.substr(i));
        std::string body = t.value;
        if (body.size() >= 2 && body.front() == '(' && body.back() == ')') {
          body = Trim(body.substr(1, body.size() - 2));
        }
        std::uint64_t v = 0;
        if (!body.empty() && ParseIntegerSpelling(body, &v) &&
            (std::isdigit(static_cast<unsigned char>(body[0])) ||
             body[0] == '\'')) {
          t.int_value = v;
          t.from_macro = true;  // marks an integer macro
          macros_[macro] = v;
        } else {
          macros_.erase(macro);
        }
      }
    } else if (name == "if" || name == "ifdef" || name == "ifndef") {
      int depth = 1;
      while (depth > 0 && pos_ < src_.size()) {
        Advance();  // newline
        size_t b = pos_;
        while (b < src_.size() && (src_[b] == ' ' || src_[b] == '\t')) ++b;
        if (b < src_.size() && src_[b] == '#') {
          while (pos_ < b) Advance();
          std::string inner = DirectiveName(ReadLogicalLine());
          if (inner == "if" || inner == "ifdef" || inner == "ifndef") ++depth;
          if (inner == "endif") --depth;
        } else {
          ReadLogicalLine();
        }
      }
      if (depth > 0) {
        throw ParseError("unterminated conditional directive", t.line, t.column);
      }
      t.kind = TokenKind::kOpaqueRegion;
      t.text = std::string(src_.substr(t.start, pos_ - t.start));
    } else {
      if (name == "undef") macros_.erase(Trim(rest));
      t.kind = TokenKind::kDirective;
      t.text = std::string(line);
    }
    t.end = static_cast<std::uint32_t>(pos_);
    t.end_line = line_;
    return t;
  }

  std::string_view src_;
  size_t pos_ = 0;
  size_t line_begin_ = 0;
  std::uint32_t line_ = 1;
  std::map<std::string, std::uint64_t, std::less<>> macros_;
};

int EscapeValue(std::string_view s, size_t* i) {
  // s[*i] is the character after the backslash.
  char c = s[*i];
  ++*i;
  switch (c) {
    case 'n': return '\n';
    case 't': return '\t';
    case 'r': return '\r';
    case 'a': return '\a';
    case 'b': return '\b';
    case 'f': return '\f';
    case 'v': return '\v';
    case '\\': return '\\';
    case '\'': return '\'';
    case '"': return '"';
    case '?': return '?';
    case 'x': {
      int v = 0;
      while (*i < s.size() && std::isxdigit(static_cast<unsigned char>(s[*i]))) {
        char h = s[*i];
        v = v * 16 + (std::isdigit(static_cast<unsigned char>(h))
                          ? h - '0'
                          : std::tolower(static_cast<unsigned char>(h)) - 'a' + 10);
        ++*i;
      }
      return v & 0xff;
    }
    default:
      if (c >= '0' && c <= '7') {
        int v = c - '0';
        for (int k = 0; k < 2 && *i < s.size() && s[*i] >= '0' && s[*i] <= '7'; ++k) {
          v = v * 8 + (s[*i] - '0');
          ++*i;
        }
        return v & 0xff;
      }
      return -1;
  }
}

}  // namespace

bool ParseIntegerSpelling(std::string_view s, std::uint64_t* value) {
  if (s.empty()) return false;
  if (s.front() == '\'') {
    if (s.size() < 3 || s.back() != '\'') return false;
    std::string_view body = s.substr(1, s.size() - 2);
    size_t i = 0;
    int v;
    if (body[0] == '\\') {
      i = 1;
      if (body.size() < 2) return false;
      v = EscapeValue(body, &i);
      if (v < 0) return false;
    } else {
      v = static_cast<unsigned char>(body[0]);
      i = 1;
    }
    if (i != body.size()) return false;
    *value = static_cast<std::uint64_t>(v);
    return true;
  }
  size_t end = s.size();
  while (end > 0 && (s[end - 1] == 'u' || s[end - 1] == 'U' ||
                     s[end - 1] == 'l' || s[end - 1] == 'L')) {
    --end;
  }
  if (s.size() - end > 3) return false;
  std::string_view digits = s.substr(0, end);
  if (digits.empty()) return false;
  int base = 10;
  if (digits.size() > 2 && digits[0] == '0' && (digits[1] == 'x' || digits[1] == 'X')) {
    base = 16;
    digits.remove_prefix(2);
  } else if (digits.size() > 1 && digits[0] == '0') {
    base = 8;
    digits.remove_prefix(1);
  }
  unsigned __int128 acc = 0;
  for (char c : digits) {
    int d;
    if (std::isdigit(static_cast<unsigned char>(c))) {
      d = c - '0';
    } else if (base == 16 && std::isxdigit(static_cast<unsigned char>(c))) {
      d = std::tolower(static_cast<unsigned char>(c)) - 'a' + 10;
    } else {
      return false;
    }
    if (d >= base) return false;
    acc = acc * base + d;
    if (acc > UINT64_MAX) return false;
  }
  *value = static_cast<std::uint64_t>(acc);
  return true;
}

std::vector<Token> Tokenize(std::string_view source) {
  return Lexer(source).Run();
}

}  // namespace symtee::cparse
