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

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include <passdcc/model/types.hpp>
#include <passdcc/store/batch.hpp>
#include <passdcc/store/state.hpp>

namespace passdcc::store {

struct PatientFilter {
	std::optional<SiteId> site;
	std::optional<WorkflowState> state;
};

// Storage contract shared by the EMBEDDED and RELATIONAL drivers.
//
// commit() is the only mutation. Reads see every acknowledged commit.
// Lists are ordered by id. Missing entities are returned as nullopt, not
// thrown. Failures to reach the medium throw Error(Io) and leave nothing
// partially visible. There is deliberately no way to change or remove an
// audit event once committed.
class StoreDriver {
public:
	virtual ~StoreDriver() = default;

	virtual std::string_view kind() const = 0;

	virtual CommitResult commit(const WriteBatch &batch) = 0;

	virtual std::optional<PatientRecord> get_patient(const PatientId &id) const = 0;
	virtual std::vector<PatientRecord> list_patients(const PatientFilter &filter = {}) const = 0;

	virtual std::optional<UserAccount> get_account(const AccountId &id) const = 0;
	virtual std::optional<UserAccount> get_account_by_username(std::string_view username) const = 0;
	virtual std::vector<UserAccount> list_accounts() const = 0;

	virtual std::optional<Site> get_site(const SiteId &id) const = 0;
	virtual std::vector<Site> list_sites() const = 0;

	virtual std::optional<Notification> get_notification(const NotificationId &id) const = 0;
	virtual std::optional<Notification> find_notification(const PatientId &patient, NotificationTemplate tmpl) const = 0;
	virtual std::vector<Notification> list_notifications(std::optional<NotificationStatus> status = std::nullopt) const = 0;

	// Events with seq >= from_seq in ascending order.
	virtual std::vector<AuditEvent> read_audit(std::int64_t from_seq, std::optional<std::size_t> limit = std::nullopt) const = 0;
	virtual std::int64_t last_seq() const = 0;

	// Bulk load into an empty store, preserving versions, seqs and hashes.
	virtual void import_state(const StoreState &state) = 0;

	virtual nlohmann::json health() const = 0;

	// Clean shutdown (the embedded driver writes a snapshot).
	virtual void close() {
	}

	// Conveniences over commit().
	PatientRecord put_patient_cas(PatientRecord record, std::int64_t expected_version, std::vector<AuditEvent> events = {});
	std::int64_t append_audit(std::vector<AuditEvent> events);
	UserAccount put_account(UserAccount account, std::int64_t expected_revision, std::vector<AuditEvent> events = {});
	Site put_site(Site site, std::int64_t expected_revision, std::vector<AuditEvent> events = {});
};

// Full logical dump through the read interface.
StoreState dump(const StoreDriver &driver);

// "embedded://<dir>" or "sqlite://<path>" ("sqlite://:memory:" for tests).
std::unique_ptr<StoreDriver> open_store(const std::string &url);

} // namespace passdcc::store
