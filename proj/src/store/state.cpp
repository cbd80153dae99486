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

#include <passdcc/store/state.hpp>

#include <set>

#include <passdcc/model/codec.hpp>
#include <passdcc/model/validate.hpp>
#include <passdcc/store/audit_chain.hpp>

namespace passdcc::store {

namespace {

Error conflict(std::string_view entity, const std::string &id, std::int64_t expected, std::int64_t actual) {
	return Error(
		ErrorCode::Conflict,
		std::string(entity) + " " + id + ": expected version " + std::to_string(expected) + ", stored "
			+ std::to_string(actual),
		{{"entity", entity}, {"id", id}, {"expected", expected}, {"actual", actual}});
}

template <typename T>
void reject_invalid(std::string_view entity, const std::string &id, const T &value) {
	auto violations = validate(value);
	if (!violations.empty()) {
		throw Error(
			ErrorCode::Validation,
			std::string(entity) + " " + id + " violates its invariants",
			violations_json(violations));
	}
}

} // namespace

const std::string &StoreState::last_hash() const {
	return audit.empty() ? kGenesisHash : audit.back().hash;
}

const UserAccount *StoreState::account_by_username(std::string_view username) const {
	for (const auto &[_, a] : accounts) {
		if (a.username == username) {
			return &a;
		}
	}
	return nullptr;
}

const Notification *StoreState::notification_for(const PatientId &patient, NotificationTemplate tmpl) const {
	for (const auto &[_, n] : notifications) {
		if (n.patient_id == patient && n.template_name == tmpl) {
			return &n;
		}
	}
	return nullptr;
}

void validate_batch(const WriteBatch &batch) {
	for (const auto &w : batch.sites) {
		reject_invalid("site", w.site.site_id.str(), w.site);
	}
	for (const auto &w : batch.accounts) {
		reject_invalid("account", w.account.account_id.str(), w.account);
	}
	for (const auto &w : batch.patients) {
		reject_invalid("patient", w.record.patient_id.str(), w.record);
	}
	for (const auto &w : batch.notifications) {
		reject_invalid("notification", w.notification.notification_id.str(), w.notification);
	}
	for (const auto &e : batch.audit) {
		if (e.actor.empty() || !e.detail.is_object()) {
			throw Error(ErrorCode::Validation, "audit event needs an actor and an object detail");
		}
	}
}

WriteBatch StoreState::prepare(const WriteBatch &batch) const {
	WriteBatch out = batch;

	std::set<std::string> seen;
	for (auto &w : out.sites) {
		if (!seen.insert("s:" + w.site.site_id.str()).second) {
			throw Error(ErrorCode::ContractViolation, "site written twice in one batch");
		}
		auto it = sites.find(w.site.site_id);
		std::int64_t actual = it == sites.end() ? 0 : it->second.revision;
		if (actual != w.expected_revision) {
			throw conflict("site", w.site.site_id.str(), w.expected_revision, actual);
		}
		w.site.revision = w.expected_revision + 1;
	}

	std::map<std::string, AccountId> batch_usernames;
	for (auto &w : out.accounts) {
		const auto &id = w.account.account_id;
		if (!seen.insert("a:" + id.str()).second) {
			throw Error(ErrorCode::ContractViolation, "account written twice in one batch");
		}
		auto it = accounts.find(id);
		std::int64_t actual = it == accounts.end() ? 0 : it->second.revision;
		if (actual != w.expected_revision) {
			throw conflict("account", id.str(), w.expected_revision, actual);
		}
		const auto *holder = account_by_username(w.account.username);
		if ((holder && holder->account_id != id)
			|| (batch_usernames.count(w.account.username) && batch_usernames[w.account.username] != id)) {
			throw Error(
				ErrorCode::Conflict,
				"username '" + w.account.username + "' is already taken",
				{{"entity", "account"}, {"username", w.account.username}});
		}
		batch_usernames[w.account.username] = id;
		w.account.revision = w.expected_revision + 1;
	}

	for (auto &w : out.patients) {
		const auto &id = w.record.patient_id;
		if (!seen.insert("p:" + id.str()).second) {
			throw Error(ErrorCode::ContractViolation, "patient written twice in one batch");
		}
		auto it = patients.find(id);
		std::int64_t actual = it == patients.end() ? 0 : it->second.state_version;
		if (actual != w.expected_version) {
			throw conflict("patient", id.str(), w.expected_version, actual);
		}
		if (it != patients.end() && it->second.site_id != w.record.site_id) {
			throw Error(ErrorCode::ContractViolation, "patient " + id.str() + ": owning site is immutable");
		}
		w.record.state_version = w.expected_version + 1;
	}

	for (auto &w : out.notifications) {
		const auto &id = w.notification.notification_id;
		if (!seen.insert("n:" + id.str()).second) {
			throw Error(ErrorCode::ContractViolation, "notification written twice in one batch");
		}
		auto it = notifications.find(id);
		std::int64_t actual = it == notifications.end() ? 0 : it->second.revision;
		if (actual != w.expected_revision) {
			throw conflict("notification", id.str(), w.expected_revision, actual);
		}
		const auto *existing = notification_for(w.notification.patient_id, w.notification.template_name);
		if (existing && existing->notification_id != id) {
			throw Error(
				ErrorCode::Conflict,
				"notification already exists for patient " + w.notification.patient_id.str(),
				{{"entity", "notification"}, {"existing", existing->notification_id.str()}});
		}
		w.notification.revision = w.expected_revision + 1;
	}

	validate_batch(out);
	seal(out.audit, last_seq() + 1, last_hash());
	return out;
}

void StoreState::apply(const WriteBatch &prepared) {
	for (const auto &w : prepared.sites) {
		sites[w.site.site_id] = w.site;
	}
	for (const auto &w : prepared.accounts) {
		accounts[w.account.account_id] = w.account;
	}
	for (const auto &w : prepared.patients) {
		patients[w.record.patient_id] = w.record;
	}
	for (const auto &w : prepared.notifications) {
		notifications[w.notification.notification_id] = w.notification;
	}
	audit.insert(audit.end(), prepared.audit.begin(), prepared.audit.end());
}

json StoreState::to_json() const {
	json j {
		{"sites", json::array()},
		{"accounts", json::array()},
		{"patients", json::array()},
		{"notifications", json::array()},
		{"audit", audit},
	};
	for (const auto &[_, v] : sites) {
		j["sites"].push_back(v);
	}
	for (const auto &[_, v] : accounts) {
		j["accounts"].push_back(v);
	}
	for (const auto &[_, v] : patients) {
		j["patients"].push_back(v);
	}
	for (const auto &[_, v] : notifications) {
		j["notifications"].push_back(v);
	}
	return j;
}

StoreState StoreState::from_json(const json &j) {
	StoreState s;
	for (const auto &v : j.at("sites")) {
		auto site = v.get<Site>();
		s.sites.emplace(site.site_id, std::move(site));
	}
	for (const auto &v : j.at("accounts")) {
		auto a = v.get<UserAccount>();
		s.accounts.emplace(a.account_id, std::move(a));
	}
	for (const auto &v : j.at("patients")) {
		auto p = v.get<PatientRecord>();
		s.patients.emplace(p.patient_id, std::move(p));
	}
	for (const auto &v : j.at("notifications")) {
		auto n = v.get<Notification>();
		s.notifications.emplace(n.notification_id, std::move(n));
	}
	s.audit = j.at("audit").get<std::vector<AuditEvent>>();
	return s;
}

} // namespace passdcc::store
