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

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace passdcc::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUser = 1;
inline constexpr int kExitIntegrity = 2;

// passdcc-admin entry point. `args` excludes the program name. Results go
// to `out`; failures are printed to `err` as one JSON object.
int run_admin(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

// Integrity check of any store URL: log replay against snapshots for the
// embedded driver, plus hash chain and record validation for both.
nlohmann::json verify_store(const std::string &url, bool &ok);

// Copies every entity and audit event from `from` into the empty store at
// `to`, then re-reads both and compares them.
nlohmann::json migrate_store(const std::string &from, const std::string &to);

// Detects the document kind (rules, capabilities, forms) and runs the
// loader the service uses. Throws Error(Configuration) when rejected.
std::string check_config(const std::string &path, const std::string &kind);

} // namespace passdcc::cli
