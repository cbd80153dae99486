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

#include <cstdint>
#include <vector>

#include <json.hpp>

#include <passdcc/model/types.hpp>

namespace passdcc::store {

// Conditional writes. `expected_*` is the currently stored version or
// revision (0 to create); the store persists the entity at expected + 1.
struct PatientWrite {
	PatientRecord record;
	std::int64_t expected_version {0};
};

struct AccountWrite {
	UserAccount account;
	std::int64_t expected_revision {0};
};

struct SiteWrite {
	Site site;
	std::int64_t expected_revision {0};
};

struct NotificationWrite {
	Notification notification;
	std::int64_t expected_revision {0};
};

// Unit of atomicity: every write and every audit event in a batch becomes
// visible together or not at all. Audit events get their seq and hash
// chain links at commit.
struct WriteBatch {
	std::vector<PatientWrite> patients;
	std::vector<AccountWrite> accounts;
	std::vector<SiteWrite> sites;
	std::vector<NotificationWrite> notifications;
	std::vector<AuditEvent> audit;

	bool empty() const {
		return patients.empty() && accounts.empty() && sites.empty() && notifications.empty()
			   && audit.empty();
	}
};

struct CommitResult {
	std::int64_t first_seq {0};  // 0 when the batch carried no audit events
	std::int64_t last_seq {0};
};

nlohmann::json batch_json(const WriteBatch &batch);
WriteBatch batch_from_json(const nlohmann::json &j);

} // namespace passdcc::store
