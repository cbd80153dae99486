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

#include <passdcc/model/error.hpp>

namespace passdcc {

std::string_view to_string(ErrorCode code) {
	switch (code) {
	case ErrorCode::Validation:
		return "validation";
	case ErrorCode::Precondition:
		return "precondition";
	case ErrorCode::Transition:
		return "transition";
	case ErrorCode::Authorization:
		return "authorization";
	case ErrorCode::NotFound:
		return "not_found";
	case ErrorCode::Conflict:
		return "conflict";
	case ErrorCode::AuthFailure:
		return "auth_failure";
	case ErrorCode::Locked:
		return "locked";
	case ErrorCode::Submission:
		return "submission";
	case ErrorCode::Configuration:
		return "configuration";
	case ErrorCode::ContractViolation:
		return "contract_violation";
	case ErrorCode::Io:
		return "io";
	case ErrorCode::Integrity:
		return "integrity";
	}
	return "unknown";
}

Error::Error(ErrorCode code, std::string message, nlohmann::json detail) :
	std::runtime_error(std::move(message)),
	code_(code),
	detail_(std::move(detail)) {
}

} // namespace passdcc
