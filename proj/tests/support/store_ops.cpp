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

#include "store_ops.hpp"

#include <map>
#include <random>
#include <vector>

#include <passdcc/model/codec.hpp>
#include <passdcc/model/error.hpp>
#include <passdcc/security/crypto.hpp>

#include "world.hpp"

namespace passdcc::fixture {

using nlohmann::json;
using namespace std::chrono_literals;

namespace {

const std::string &digest() {
	static const std::string d = security::PasswordHasher(1000).hash("equivalence-pw1");
	return d;
}

class OpRunner {
public:
	OpRunner(store::StoreDriver &driver, std::uint64_t seed) :
		store_(driver), rng_(seed), now_(fixed_start()) {
	}

	json run(int count) {
		json out = json::array();
		for (int i = 0; i < count; ++i) {
			now_ += 1500ms;
			out.push_back(step());
		}
		return out;
	}

private:
	std::int64_t pick(std::int64_t lo, std::int64_t hi) {
		return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng_);
	}
	template <typename T>
	const T &any(const std::vector<T> &v) {
		return v[static_cast<std::size_t>(pick(0, static_cast<std::int64_t>(v.size()) - 1))];
	}
	std::string next_id(const char *prefix) {
		char buf[32];
		std::snprintf(buf, sizeof(buf), "%s%05d", prefix, ++serial_);
		return buf;
	}

	AuditEvent event(AuditAction action, AuditSubject subject) {
		AuditEvent e;
		e.at = now_;
		e.actor = "ops:" + std::to_string(pick(1, 5));
		e.action = action;
		e.subject = std::move(subject);
		e.detail = {{"n", serial_}, {"tag", pick(0, 1000)}};
		return e;
	}

	template <typename F>
	json attempt(const std::string &op, F &&body) {
		json entry {{"op", op}};
		try {
			entry["result"] = body();
		} catch (const Error &e) {
			entry["error"] = to_string(e.code());
		}
		return entry;
	}

	json step() {
		auto roll = pick(0, 99);
		if (sites_.empty() || roll < 4) {
			return new_site();
		}
		if (roll < 8) {
			return update_site();
		}
		if (roll < 16) {
			return new_account();
		}
		if (roll < 21) {
			return update_account();
		}
		if (patients_.empty() || roll < 33) {
			return new_patient();
		}
		if (roll < 45) {
			return update_patient();
		}
		if (roll < 50) {
			return notification();
		}
		if (roll < 55) {
			return audit_only();
		}
		if (roll < 60) {
			return mixed_batch();
		}
		return read();
	}

	json new_site() {
		Site s;
		s.site_id = SiteId {next_id("S")};
		s.name = "site " + s.site_id.str();
		s.contact_email = "c" + std::to_string(serial_) + "@example.org";
		return attempt("put_site.new", [&] {
			auto stored = store_.put_site(s, 0, {event(AuditAction::AdminChange, AuditSubject::site(s.site_id))});
			sites_.push_back(stored.site_id);
			return json(stored);
		});
	}

	json update_site() {
		auto id = any(sites_);
		return attempt("put_site.update", [&] {
			auto current = store_.get_site(id);
			auto s = *current;
			s.active = !s.active;
			bool stale = pick(0, 4) == 0;
			return json(store_.put_site(s, stale ? s.revision + 1 : s.revision));
		});
	}

	json new_account() {
		UserAccount a;
		a.account_id = AccountId {next_id("A")};
		bool dup = !usernames_.empty() && pick(0, 5) == 0;
		a.username = dup ? any(usernames_) : "user" + std::to_string(serial_);
		a.password_hash = digest();
		a.role = any(std::vector<Role> {Role::Coordinator, Role::Investigator, Role::Researcher, Role::DccAdmin});
		if (a.role != Role::DccAdmin) {
			a.site_id = any(sites_);
		}
		return attempt("put_account.new", [&] {
			auto stored = store_.put_account(a, 0, {event(AuditAction::AdminChange, AuditSubject::account(a.account_id))});
			accounts_.push_back(stored.account_id);
			usernames_.push_back(stored.username);
			return json(stored);
		});
	}

	json update_account() {
		if (accounts_.empty()) {
			return new_account();
		}
		auto id = any(accounts_);
		return attempt("put_account.update", [&] {
			auto a = *store_.get_account(id);
			a.failed_logins += 1;
			a.disabled = a.failed_logins >= 5;
			bool stale = pick(0, 4) == 0;
			return json(store_.put_account(a, stale ? a.revision - 1 : a.revision));
		});
	}

	PatientRecord fresh_patient() {
		PatientRecord p;
		p.patient_id = PatientId {next_id("P")};
		p.site_id = any(sites_);
		p.workflow_state = pick(0, 3) == 0 ? WorkflowState::Ineligible : WorkflowState::SelfScreened;
		p.created_at = now_;
		p.updated_at = now_;
		return p;
	}

	json new_patient() {
		auto p = fresh_patient();
		return attempt("put_patient.new", [&] {
			auto stored = store_.put_patient_cas(p, 0, {event(AuditAction::StateTransition, AuditSubject::patient(p.patient_id))});
			patients_.push_back(stored.patient_id);
			return json(stored);
		});
	}

	json update_patient() {
		auto id = any(patients_);
		return attempt("put_patient.update", [&] {
			auto p = *store_.get_patient(id);
			auto expected = p.state_version;
			switch (pick(0, 5)) {
			case 0:
				expected -= 1;
				break;
			case 1:
				expected += 3;
				break;
			case 2:
				// Sites are immutable once stored.
				p.site_id = any(sites_);
				break;
			default:
				break;
			}
			p.workflow_state = p.workflow_state == WorkflowState::SelfScreened ? WorkflowState::Consulted : WorkflowState::SelfScreened;
			p.updated_at = now_;
			return json(store_.put_patient_cas(p, expected, {event(AuditAction::StateTransition, AuditSubject::patient(id))}));
		});
	}

	json notification() {
		auto patient = any(patients_);
		return attempt("notification", [&] {
			store::WriteBatch batch;
			auto existing = store_.find_notification(patient, NotificationTemplate::EnrollmentSubmitted);
			Notification n;
			if (existing && pick(0, 3) != 0) {
				n = *existing;
				n.status = NotificationStatus::Sent;
				n.attempts += 1;
				n.sent_at = now_;
				batch.notifications.push_back({n, n.revision});
			} else {
				n.notification_id = NotificationId {next_id("N")};
				n.patient_id = patient;
				n.recipient = "site@example.org";
				n.created_at = now_;
				batch.notifications.push_back({n, 0});
			}
			batch.audit.push_back(event(AuditAction::NotifySent, AuditSubject::patient(patient)));
			auto result = store_.commit(batch);
			return json {{"first_seq", result.first_seq}, {"last_seq", result.last_seq}};
		});
	}

	json audit_only() {
		std::vector<AuditEvent> events;
		for (auto n = pick(1, 3); n > 0; --n) {
			events.push_back(event(AuditAction::Read, {SubjectType::None, ""}));
		}
		if (pick(0, 9) == 0) {
			events.back().actor.clear();
		}
		return attempt("append_audit", [&] {
			return json(store_.append_audit(events));
		});
	}

	// A patient, an account and audit events in one batch; one part is
	// sometimes invalid so the whole batch must be rejected.
	json mixed_batch() {
		auto p = fresh_patient();
		UserAccount a;
		a.account_id = AccountId {next_id("A")};
		a.username = "mixed" + std::to_string(serial_);
		a.password_hash = digest();
		a.role = Role::Researcher;
		a.site_id = p.site_id;
		auto flaw = pick(0, 3);
		if (flaw == 0 && !usernames_.empty()) {
			a.username = any(usernames_);
		} else if (flaw == 1) {
			a.password_hash = "plain";
		}
		return attempt("mixed_batch", [&] {
			store::WriteBatch batch;
			p.state_version = 1;
			batch.patients.push_back({p, 0});
			batch.accounts.push_back({a, 0});
			batch.audit.push_back(event(AuditAction::StateTransition, AuditSubject::patient(p.patient_id)));
			batch.audit.push_back(event(AuditAction::AdminChange, AuditSubject::account(a.account_id)));
			auto r = store_.commit(batch);
			patients_.push_back(p.patient_id);
			accounts_.push_back(a.account_id);
			usernames_.push_back(a.username);
			return json {{"first_seq", r.first_seq}, {"last_seq", r.last_seq}};
		});
	}

	json read() {
		switch (pick(0, 9)) {
		case 0:
			return attempt("get_patient", [&] {
				auto id = pick(0, 5) == 0 ? PatientId {"missing"} : any(patients_);
				auto p = store_.get_patient(id);
				return p ? json(*p) : json(nullptr);
			});
		case 1:
			return attempt("list_patients", [&] {
				store::PatientFilter f;
				if (pick(0, 1)) {
					f.site = any(sites_);
				}
				if (pick(0, 1)) {
					f.state = any(std::vector<WorkflowState> {WorkflowState::SelfScreened, WorkflowState::Consulted, WorkflowState::Ineligible, WorkflowState::Enrolled});
				}
				return json(store_.list_patients(f));
			});
		case 2:
			return attempt("get_account_by_username", [&] {
				auto name = usernames_.empty() || pick(0, 4) == 0 ? std::string("nobody") : any(usernames_);
				auto a = store_.get_account_by_username(name);
				return a ? json(*a) : json(nullptr);
			});
		case 3:
			return attempt("list_accounts", [&] { return json(store_.list_accounts()); });
		case 4:
			return attempt("list_sites", [&] { return json(store_.list_sites()); });
		case 5:
			return attempt("read_audit", [&] {
				auto from = pick(0, store_.last_seq() + 2);
				std::optional<std::size_t> limit;
				if (pick(0, 1)) {
					limit = static_cast<std::size_t>(pick(0, 20));
				}
				return json(store_.read_audit(from, limit));
			});
		case 6:
			return attempt("find_notification", [&] {
				auto n = store_.find_notification(any(patients_), NotificationTemplate::EnrollmentSubmitted);
				return n ? json(*n) : json(nullptr);
			});
		case 7:
			return attempt("list_notifications", [&] {
				std::optional<NotificationStatus> status;
				if (pick(0, 2) > 0) {
					status = pick(0, 1) ? NotificationStatus::Sent : NotificationStatus::Pending;
				}
				return json(store_.list_notifications(status));
			});
		case 8:
			return attempt("get_site", [&] {
				auto s = store_.get_site(pick(0, 5) == 0 ? SiteId {"missing"} : any(sites_));
				return s ? json(*s) : json(nullptr);
			});
		default:
			return attempt("last_seq", [&] { return json(store_.last_seq()); });
		}
	}

	store::StoreDriver &store_;
	std::mt19937_64 rng_;
	Timestamp now_;
	int serial_ {0};
	std::vector<SiteId> sites_;
	std::vector<AccountId> accounts_;
	std::vector<std::string> usernames_;
	std::vector<PatientId> patients_;
};

} // namespace

json run_store_ops(store::StoreDriver &driver, std::uint64_t seed, int count) {
	return OpRunner(driver, seed).run(count);
}

json logical_dump(const store::StoreDriver &driver) {
	return {
		{"sites", driver.list_sites()},
		{"accounts", driver.list_accounts()},
		{"patients", driver.list_patients({})},
		{"notifications", driver.list_notifications(std::nullopt)},
		{"audit", driver.read_audit(1, std::nullopt)},
		{"last_seq", driver.last_seq()},
	};
}

} // namespace passdcc::fixture
