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

#pragma once

#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ccdfg/ir.hpp"

namespace ccdfg {

// Machine state threaded through execution: variable bindings in binding
// order, word-addressed memory and the pointer table used by getelemptr.
// Every value is reduced modulo 2^width.
struct CcdfgState {
  std::vector<std::pair<std::string, Word>> bindings;
  std::map<Word, Word> memory;
  std::map<std::string, Word> pointers;
  unsigned width = kDefaultWidth;

  const Word* find(std::string_view name) const {
    for (const auto& [k, v] : bindings) {
      if (k == name) return &v;
    }
    return nullptr;
  }

  // Updates an existing binding in place, otherwise appends.
  void bind(const std::string& name, Word value) {
    for (auto& [k, v] : bindings) {
      if (k == name) {
        v = value;
        return;
      }
    }
    bindings.emplace_back(name, value);
  }

  bool operator==(const CcdfgState&) const = default;
};

}  // namespace ccdfg
