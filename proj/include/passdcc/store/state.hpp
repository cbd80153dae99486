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

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include <passdcc/model/types.hpp>
#include <passdcc/store/batch.hpp>

namespace passdcc::store {

// Complete logical content of a store. The embedded driver keeps one in
// memory; snapshots, verification and migration exchange it.
struct StoreState {
	std::map<SiteId, Site> sites;
	std::map<AccountId, UserAccount> accounts;
	std::map<PatientId, PatientRecord> patients;
	std::map<NotificationId, Notification> notifications;
	std::vector<AuditEvent> audit;

	bool operator==(const StoreState &) const = default;

	std::int64_t last_seq() const {
		return audit.empty() ? 0 : audit.back().seq;
	}
	const std::string &last_hash() const;

	const UserAccount *account_by_username(std::string_view username) const;
	const Notification *notification_for(const PatientId &patient, NotificationTemplate tmpl) const;

	// Checks every CAS condition and uniqueness constraint of `batch`
	// against this state and returns the batch as it will be stored:
	// versions bumped, audit events sealed. Throws Error(Conflict) or
	// Error(Validation); never modifies the state.
	WriteBatch prepare(const WriteBatch &batch) const;

	// Applies an already prepared batch.
	void apply(const WriteBatch &prepared);

	nlohmann::json to_json() const;
	static StoreState from_json(const nlohmann::json &j);
};

// Throws Error(Validation) when a write in the batch carries a value that
// breaks its type's invariants.
void validate_batch(const WriteBatch &batch);

} // namespace passdcc::store
