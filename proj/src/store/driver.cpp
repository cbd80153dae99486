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

#include <passdcc/store/driver.hpp>

#include <passdcc/model/error.hpp>
#include <passdcc/store/embedded.hpp>
#include <passdcc/store/relational.hpp>

namespace passdcc::store {

PatientRecord StoreDriver::put_patient_cas(PatientRecord record, std::int64_t expected_version, std::vector<AuditEvent> events) {
	WriteBatch batch;
	record.state_version = expected_version + 1;
	batch.patients.push_back({record, expected_version});
	batch.audit = std::move(events);
	commit(batch);
	return record;
}

std::int64_t StoreDriver::append_audit(std::vector<AuditEvent> events) {
	WriteBatch batch;
	batch.audit = std::move(events);
	return commit(batch).first_seq;
}

UserAccount StoreDriver::put_account(UserAccount account, std::int64_t expected_revision, std::vector<AuditEvent> events) {
	WriteBatch batch;
	account.revision = expected_revision + 1;
	batch.accounts.push_back({account, expected_revision});
	batch.audit = std::move(events);
	commit(batch);
	return account;
}

Site StoreDriver::put_site(Site site, std::int64_t expected_revision, std::vector<AuditEvent> events) {
	WriteBatch batch;
	site.revision = expected_revision + 1;
	batch.sites.push_back({site, expected_revision});
	batch.audit = std::move(events);
	commit(batch);
	return site;
}

StoreState dump(const StoreDriver &driver) {
	StoreState s;
	for (auto &v : driver.list_sites()) {
		s.sites.emplace(v.site_id, std::move(v));
	}
	for (auto &v : driver.list_accounts()) {
		s.accounts.emplace(v.account_id, std::move(v));
	}
	for (auto &v : driver.list_patients({})) {
		s.patients.emplace(v.patient_id, std::move(v));
	}
	for (auto &v : driver.list_notifications(std::nullopt)) {
		s.notifications.emplace(v.notification_id, std::move(v));
	}
	s.audit = driver.read_audit(1, std::nullopt);
	return s;
}

std::unique_ptr<StoreDriver> open_store(const std::string &url) {
	constexpr std::string_view kEmbedded = "embedded://";
	if (url.rfind(kEmbedded, 0) == 0) {
		auto dir = url.substr(kEmbedded.size());
		if (dir.empty()) {
			throw Error(ErrorCode::Configuration, "embedded store URL has no directory");
		}
		return std::make_unique<EmbeddedDriver>(dir);
	}
	if (url.rfind("sqlite://", 0) == 0) {
		return std::make_unique<RelationalDriver>(url);
	}
	throw Error(ErrorCode::Configuration, "unsupported store URL '" + url + "' (use embedded:// or sqlite://)");
}

} // namespace passdcc::store
