/*
 * Copyright 2026 The ccdfg Authors. All rights reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Text formats.
//
// .ccdfg documents are line oriented:
//
//   ccdfg-format 1
//   design sequential            (or: design pipelined)
//   meta <key> <value...>        (any number)
//   pre:                         (pipelined: entry: prologue: fullstage:
//   step Entry                    epilogue: exit:)
//   loop:
//   step X
//     ms (i (phi ((0 Entry) (i' Z)))) (a (phi ((0 Entry) (a' Z))))
//   step Z -> X Exit
//     ms (store q a')
//   post:
//   step Exit
//
// Each `ms` line is one microstep holding one or more statements written as
// S-expressions: (v expr), (v (phi ((e0 b0) (e1 b1)))) or (store addr val).
// Expressions are numbers, identifiers, (op a b) for op in add sub mul xor
// and or shl lshr eq lt, (load e) and (getelemptr ptr e). `#` starts a
// comment.
//
// .cstate files hold an initial state in three sections:
//
//   vars: a=0 b=5
//   mem: 0=7 1=9
//   ptrs: arr=0
//
// Sections may share a line when separated by `;`.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "ccdfg/ir.hpp"
#include "ccdfg/state.hpp"

namespace ccdfg::textio {

inline constexpr std::string_view kFormatVersion = "1";

struct CcdfgDocument {
  std::string version{kFormatVersion};
  std::variant<Ccdfg, PipelinedCcdfg> design;
  std::vector<std::pair<std::string, std::string>> meta;

  bool is_pipelined() const {
    return std::holds_alternative<PipelinedCcdfg>(design);
  }
  const std::string* find_meta(std::string_view key) const;
  bool operator==(const CcdfgDocument&) const = default;
};

class ParseError : public std::runtime_error {
 public:
  enum class Kind { Syntax, Semantic, Range };

  ParseError(Kind kind, std::size_t line, std::size_t column,
             std::string token, const std::string& message);

  Kind kind() const { return kind_; }
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  const std::string& token() const { return token_; }

 private:
  Kind kind_;
  std::size_t line_;
  std::size_t column_;
  std::string token_;
};

std::string_view kind_name(ParseError::Kind kind);

// Constants must fit in `width` bits.
CcdfgDocument parse_ccdfg(std::string_view text,
                          unsigned width = kDefaultWidth);
std::string serialize_ccdfg(const CcdfgDocument& doc);

std::string serialize_expression(const Expression& e);
std::string serialize_statement(const Statement& st);

CcdfgState parse_state(std::string_view text, unsigned width = kDefaultWidth);
// Bindings keep their order, so parse_state(serialize_state(s)) == s.
std::string serialize_state(const CcdfgState& s);

}  // namespace ccdfg::textio
