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

#include <passdcc/store/batch.hpp>

#include <passdcc/model/codec.hpp>

namespace passdcc::store {

json batch_json(const WriteBatch &batch) {
	json patients = json::array();
	for (const auto &w : batch.patients) {
		patients.push_back({{"record", w.record}, {"expected", w.expected_version}});
	}
	json accounts = json::array();
	for (const auto &w : batch.accounts) {
		accounts.push_back({{"account", w.account}, {"expected", w.expected_revision}});
	}
	json sites = json::array();
	for (const auto &w : batch.sites) {
		sites.push_back({{"site", w.site}, {"expected", w.expected_revision}});
	}
	json notifications = json::array();
	for (const auto &w : batch.notifications) {
		notifications.push_back({{"notification", w.notification}, {"expected", w.expected_revision}});
	}
	return {
		{"patients", patients},
		{"accounts", accounts},
		{"sites", sites},
		{"notifications", notifications},
		{"audit", batch.audit},
	};
}

WriteBatch batch_from_json(const json &j) {
	WriteBatch b;
	for (const auto &w : j.at("patients")) {
		b.patients.push_back({w.at("record").get<PatientRecord>(), w.at("expected").get<std::int64_t>()});
	}
	for (const auto &w : j.at("accounts")) {
		b.accounts.push_back({w.at("account").get<UserAccount>(), w.at("expected").get<std::int64_t>()});
	}
	for (const auto &w : j.at("sites")) {
		b.sites.push_back({w.at("site").get<Site>(), w.at("expected").get<std::int64_t>()});
	}
	for (const auto &w : j.at("notifications")) {
		b.notifications.push_back(
			{w.at("notification").get<Notification>(), w.at("expected").get<std::int64_t>()});
	}
	b.audit = j.at("audit").get<std::vector<AuditEvent>>();
	return b;
}

} // namespace passdcc::store
