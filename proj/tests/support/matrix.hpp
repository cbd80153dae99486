// Copyright 2026 The pass-dcc Authors
//
//    Licensed under the Apache License, Version 2.0 (the "License");
//    you may not use this file except in compliance with the License.
//    You may obtain a copy of the License at
//
//        http://www.apache.org/licenses/LICENSE-2.0
//
//    Unless required by applicable law or agreed to in writing, software
//    distributed under the License is distributed on an "AS IS" BASIS,
//    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//    See the License for the specific language governing permissions and
//    limitations under the License.

#pragma once

#include <string>
#include <vector>

#include "world.hpp"

namespace passdcc::fixture {

struct MatrixReport {
	int cells {0};
	int allowed {0};   // cells that succeeded as whitelisted
	int rejected {0};  // cells that failed with the record unchanged
	std::vector<std::string> problems;
};

// Applies every workflow operation to a fresh patient in every state and
// compares the outcome with the whitelist.
MatrixReport run_workflow_matrix(World &world);

} // namespace passdcc::fixture
