// Copyright 2026 The msparallel Authors
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

#pragma once

#include <string_view>
#include <vector>

namespace msp::detail {

struct FixtureTable {
  int ion_count;
  std::string_view mode_frequencies_csv;
  std::string_view lamb_dicke_csv;
  std::string_view mode_frequencies_path;
  std::string_view lamb_dicke_path;
};

const std::vector<FixtureTable>& fixture_tables();

}  // namespace msp::detail
