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

#include <functional>
#include <optional>
#include <string>

#include <json.hpp>

#include <passdcc/access/policy.hpp>
#include <passdcc/eligibility/rules.hpp>
#include <passdcc/model/error.hpp>
#include <passdcc/model/forms.hpp>
#include <passdcc/model/ids.hpp>
#include <passdcc/model/time.hpp>
#include <passdcc/security/crypto.hpp>
#include <passdcc/store/driver.hpp>

namespace passdcc::workflow {

struct ServiceOptions {
	int lockout_threshold {5};
	// Retries of an operation that lost a CAS race when the caller did
	// not pin a version.
	int conflict_retries {16};
	std::string export_salt;
};

// Everything the services read or write. Not owned.
struct ServiceContext {
	store::StoreDriver &store;
	const access::Policy &policy;
	const eligibility::EligibilityConfig &eligibility;
	const FormCatalog &forms;
	const Clock &clock;
	IdGenerator &ids;
	const security::PasswordHasher &hasher;
	ServiceOptions options {};

	AuditEvent event(const std::string &actor, AuditAction action, AuditSubject subject, nlohmann::json detail = nlohmann::json::object()) const;

	// Authorizes or records ACCESS_DENIED and throws Error(Authorization)
	// with {"reason","action","subject"} in the detail.
	access::Decision require(
		const UserAccount &actor,
		access::Action action,
		const access::Subject &subject,
		const AuditSubject &audit_subject) const;

	// Runs `body` again when it loses an optimistic-concurrency race and
	// the caller supplied no expected version.
	template <typename F>
	auto retrying(const std::optional<std::int64_t> &expected, F &&body) const -> decltype(body());
};

std::string actor_id(const UserAccount &account);

bool is_cas_conflict(const Error &e);

template <typename F>
auto ServiceContext::retrying(const std::optional<std::int64_t> &expected, F &&body) const -> decltype(body()) {
	for (int attempt = 0;; ++attempt) {
		try {
			return body();
		} catch (const Error &e) {
			if (expected || attempt >= options.conflict_retries || !is_cas_conflict(e)) {
				throw;
			}
		}
	}
}

} // namespace passdcc::workflow
