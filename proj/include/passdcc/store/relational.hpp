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

#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include <passdcc/store/driver.hpp>

struct sqlite3;

namespace passdcc::store {

class LockFile;

// SQL-backed driver. Connection strings: "sqlite://<path>" or
// "sqlite://:memory:". The schema in sql/schema.sql is applied on open.
class RelationalDriver final : public StoreDriver {
public:
	explicit RelationalDriver(const std::string &url);
	~RelationalDriver() override;

	std::string_view kind() const override {
		return "RELATIONAL";
	}

	CommitResult commit(const WriteBatch &batch) override;

	std::optional<PatientRecord> get_patient(const PatientId &id) const override;
	std::vector<PatientRecord> list_patients(const PatientFilter &filter) const override;
	std::optional<UserAccount> get_account(const AccountId &id) const override;
	std::optional<UserAccount> get_account_by_username(std::string_view username) const override;
	std::vector<UserAccount> list_accounts() const override;
	std::optional<Site> get_site(const SiteId &id) const override;
	std::vector<Site> list_sites() const override;
	std::optional<Notification> get_notification(const NotificationId &id) const override;
	std::optional<Notification> find_notification(const PatientId &patient, NotificationTemplate tmpl) const override;
	std::vector<Notification> list_notifications(std::optional<NotificationStatus> status) const override;
	std::vector<AuditEvent> read_audit(std::int64_t from_seq, std::optional<std::size_t> limit) const override;
	std::int64_t last_seq() const override;
	void import_state(const StoreState &state) override;
	nlohmann::json health() const override;

	// Direct SQL for maintenance and tamper tests.
	void execute(const std::string &sql);

private:
	std::string url_;
	sqlite3 *db_ {nullptr};
	std::unique_ptr<LockFile> lock_;
	mutable std::mutex mutex_;
};

// Text of sql/schema.sql, compiled in.
const std::string &relational_schema();

} // namespace passdcc::store
