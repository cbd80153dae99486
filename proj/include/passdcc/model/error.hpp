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

#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

namespace passdcc {

enum class ErrorCode {
	Validation,         // malformed or invariant-violating input
	Precondition,       // operation called in a context its contract forbids
	Transition,         // workflow state does not admit the operation
	Authorization,      // policy DENY
	NotFound,
	Conflict,           // CAS mismatch, duplicate username, ...
	AuthFailure,        // bad credentials
	Locked,             // account disabled
	Submission,         // enrollment submitted with incomplete forms
	Configuration,      // rule set / capability matrix / form schema rejected
	ContractViolation,  // API misuse by a caller inside the process
	Io,                 // retriable storage or transport failure
	Integrity,          // hash chain or replay mismatch
};

std::string_view to_string(ErrorCode code);

// All domain failures are reported as Error. `detail` carries the
// machine-readable payload (violations, allowed states, reason codes).
class Error : public std::runtime_error {
public:
	Error(ErrorCode code, std::string message, nlohmann::json detail = nullptr);

	ErrorCode code() const noexcept {
		return code_;
	}
	const nlohmann::json &detail() const noexcept {
		return detail_;
	}

private:
	ErrorCode code_;
	nlohmann::json detail_;
};

} // namespace passdcc
