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


#include "symtee/cparse/errors.h"

#include <utility>

namespace symtee::cparse {

ParseError::ParseError(std::string message, std::uint32_t line,
                       std::uint32_t column, std::vector<std::string> expected)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) +
                         ": " + message),
      line_(line),
      column_(column),
      expected_(std::move(expected)) {}

}  // namespace symtee::cparse
