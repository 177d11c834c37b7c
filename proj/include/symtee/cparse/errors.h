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

#ifndef SYMTEE_CPARSE_ERRORS_H_
#define SYMTEE_CPARSE_ERRORS_H_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace symtee::cparse {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::string message, std::uint32_t line, std::uint32_t column,
             std::vector<std::string> expected = {});

  std::uint32_t line() const { return line_; }
  std::uint32_t column() const { return column_; }
  const std::vector<std::string>& expected() const { return expected_; }

 private:
  std::uint32_t line_;
  std::uint32_t column_;
  std::vector<std::string> expected_;
};

class DuplicateDefinition : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace symtee::cparse

#endif  // SYMTEE_CPARSE_ERRORS_H_
