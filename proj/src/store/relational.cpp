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

#include <passdcc/store/relational.hpp>

#include <map>
#include <set>

#include <sqlite3.h>

#include <passdcc/model/codec.hpp>
#include <passdcc/store/audit_chain.hpp>
#include <passdcc/store/embedded.hpp>

namespace passdcc::store {

namespace {

constexpr std::string_view kScheme = "sqlite://";

Error sql_error(sqlite3 *db, const std::string &what) {
	return Error(ErrorCode::Io, what + ": " + sqlite3_errmsg(db));
}

class Statement {
public:
	Statement(sqlite3 *db, const char *sql) :
		db_(db) {
		if (sqlite3_prepare_v2(db, sql, -1, &stmt_, nullptr) != SQLITE_OK) {
			throw sql_error(db, std::string("prepare '") + sql + "'");
		}
	}
	~Statement() {
		sqlite3_finalize(stmt_);
	}
	Statement(const Statement &) = delete;
	Statement &operator=(const Statement &) = delete;

	Statement &bind(int index, const std::string &value) {
		check(sqlite3_bind_text(stmt_, index, value.data(), static_cast<int>(value.size()), SQLITE_TRANSIENT));
		return *this;
	}
	Statement &bind(int index, std::int64_t value) {
		check(sqlite3_bind_int64(stmt_, index, value));
		return *this;
	}
	Statement &bind_null(int index) {
		check(sqlite3_bind_null(stmt_, index));
		return *this;
	}

	// True while a row is available.
	bool step() {
		int rc = sqlite3_step(stmt_);
		if (rc == SQLITE_ROW) {
			return true;
		}
		if (rc == SQLITE_DONE) {
			return false;
		}
		throw sql_error(db_, "step");
	}

	std::string text(int col) const {
		const auto *p = sqlite3_column_text(stmt_, col);
		return p ? std::string(reinterpret_cast<const char *>(p), static_cast<std::size_t>(sqlite3_column_bytes(stmt_, col)))
				 : std::string {};
	}
	std::int64_t integer(int col) const {
		return sqlite3_column_int64(stmt_, col);
	}

private:
	void check(int rc) {
		if (rc != SQLITE_OK) {
			throw sql_error(db_, "bind");
		}
	}

	sqlite3 *db_;
	sqlite3_stmt *stmt_ {nullptr};
};

void exec(sqlite3 *db, const std::string &sql) {
	char *err = nullptr;
	if (sqlite3_exec(db, sql.c_str(), nullptr, nullptr, &err) != SQLITE_OK) {
		std::string message = err ? err : "unknown error";
		sqlite3_free(err);
		throw Error(ErrorCode::Io, "sql: " + message);
	}
}

template <typename T>
std::vector<T> docs(Statement &stmt) {
	std::vector<T> out;
	while (stmt.step()) {
		out.push_back(json::parse(stmt.text(0)).get<T>());
	}
	return out;
}

template <typename T>
std::optional<T> one_doc(Statement &stmt) {
	if (!stmt.step()) {
		return std::nullopt;
	}
	return json::parse(stmt.text(0)).get<T>();
}

Error conflict(std::string_view entity, const std::string &id, std::int64_t expected, std::int64_t actual) {
	return Error(
		ErrorCode::Conflict,
		std::string(entity) + " " + id + ": expected version " + std::to_string(expected) + ", stored "
			+ std::to_string(actual),
		{{"entity", entity}, {"id", id}, {"expected", expected}, {"actual", actual}});
}

std::int64_t current_version(sqlite3 *db, const char *sql, const std::string &id) {
	Statement s(db, sql);
	s.bind(1, id);
	return s.step() ? s.integer(0) : 0;
}

void upsert_site(sqlite3 *db, const Site &site) {
	Statement s(db,
		"INSERT INTO sites (site_id, revision, doc) VALUES (?1, ?2, ?3) "
		"ON CONFLICT (site_id) DO UPDATE SET revision = excluded.revision, doc = excluded.doc");
	s.bind(1, site.site_id.str()).bind(2, site.revision).bind(3, json(site).dump());
	s.step();
}

void upsert_account(sqlite3 *db, const UserAccount &a) {
	Statement s(db,
		"INSERT INTO accounts (account_id, username, site_id, revision, doc) VALUES (?1, ?2, ?3, ?4, ?5) "
		"ON CONFLICT (account_id) DO UPDATE SET username = excluded.username, site_id = excluded.site_id, "
		"revision = excluded.revision, doc = excluded.doc");
	s.bind(1, a.account_id.str()).bind(2, a.username);
	if (a.site_id) {
		s.bind(3, a.site_id->str());
	} else {
		s.bind_null(3);
	}
	s.bind(4, a.revision).bind(5, json(a).dump());
	s.step();
}

void upsert_patient(sqlite3 *db, const PatientRecord &p) {
	Statement s(db,
		"INSERT INTO patients (patient_id, site_id, workflow_state, state_version, doc) VALUES (?1, ?2, ?3, ?4, ?5) "
		"ON CONFLICT (patient_id) DO UPDATE SET workflow_state = excluded.workflow_state, "
		"state_version = excluded.state_version, doc = excluded.doc");
	s.bind(1, p.patient_id.str())
		.bind(2, p.site_id.str())
		.bind(3, std::string(to_string(p.workflow_state)))
		.bind(4, p.state_version)
		.bind(5, json(p).dump());
	s.step();
}

void upsert_notification(sqlite3 *db, const Notification &n) {
	Statement s(db,
		"INSERT INTO notifications (notification_id, patient_id, template, status, revision, doc) "
		"VALUES (?1, ?2, ?3, ?4, ?5, ?6) "
		"ON CONFLICT (notification_id) DO UPDATE SET status = excluded.status, "
		"revision = excluded.revision, doc = excluded.doc");
	s.bind(1, n.notification_id.str())
		.bind(2, n.patient_id.str())
		.bind(3, std::string(to_string(n.template_name)))
		.bind(4, std::string(to_string(n.status)))
		.bind(5, n.revision)
		.bind(6, json(n).dump());
	s.step();
}

void insert_audit(sqlite3 *db, const AuditEvent &e) {
	Statement s(db, "INSERT INTO audit_events (seq, hash, doc) VALUES (?1, ?2, ?3)");
	s.bind(1, e.seq).bind(2, e.hash).bind(3, json(e).dump());
	s.step();
}

// Runs `body` inside BEGIN IMMEDIATE ... COMMIT, rolling back on any throw.
template <typename F>
auto transaction(sqlite3 *db, F &&body) {
	exec(db, "BEGIN IMMEDIATE");
	try {
		if constexpr (std::is_void_v<decltype(body())>) {
			body();
			exec(db, "COMMIT");
		} else {
			auto result = body();
			exec(db, "COMMIT");
			return result;
		}
	} catch (...) {
		sqlite3_exec(db, "ROLLBACK", nullptr, nullptr, nullptr);
		throw;
	}
}

} // namespace

RelationalDriver::RelationalDriver(const std::string &url) :
	url_(url) {
	if (url.rfind(kScheme, 0) != 0) {
		throw Error(ErrorCode::Configuration, "relational store URL must start with sqlite://");
	}
	auto path = url.substr(kScheme.size());
	if (path.empty()) {
		throw Error(ErrorCode::Configuration, "relational store URL has no database path");
	}
	if (path != ":memory:") {
		lock_ = std::make_unique<LockFile>(path + ".lock");
	}
	if (sqlite3_open_v2(path.c_str(), &db_, SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE | SQLITE_OPEN_NOMUTEX, nullptr)
		!= SQLITE_OK) {
		std::string message = db_ ? sqlite3_errmsg(db_) : "out of memory";
		sqlite3_close(db_);
		throw Error(ErrorCode::Io, "cannot open " + path + ": " + message);
	}
	sqlite3_busy_timeout(db_, 5000);
	exec(db_, "PRAGMA journal_mode=WAL; PRAGMA synchronous=FULL; PRAGMA foreign_keys=ON;");
	exec(db_, relational_schema());
}

RelationalDriver::~RelationalDriver() {
	sqlite3_close(db_);
}

CommitResult RelationalDriver::commit(const WriteBatch &batch) {
	std::lock_guard lock(mutex_);
	return transaction(db_, [&] {
		WriteBatch out = batch;
		std::set<std::string> seen;

		for (auto &w : out.sites) {
			if (!seen.insert("s:" + w.site.site_id.str()).second) {
				throw Error(ErrorCode::ContractViolation, "site written twice in one batch");
			}
			auto actual = current_version(db_, "SELECT revision FROM sites WHERE site_id = ?1", w.site.site_id.str());
			if (actual != w.expected_revision) {
				throw conflict("site", w.site.site_id.str(), w.expected_revision, actual);
			}
			w.site.revision = w.expected_revision + 1;
		}

		std::map<std::string, std::string> batch_usernames;
		for (auto &w : out.accounts) {
			const auto &id = w.account.account_id.str();
			if (!seen.insert("a:" + id).second) {
				throw Error(ErrorCode::ContractViolation, "account written twice in one batch");
			}
			auto actual = current_version(db_, "SELECT revision FROM accounts WHERE account_id = ?1", id);
			if (actual != w.expected_revision) {
				throw conflict("account", id, w.expected_revision, actual);
			}
			Statement holder(db_, "SELECT account_id FROM accounts WHERE username = ?1");
			holder.bind(1, w.account.username);
			bool taken = holder.step() && holder.text(0) != id;
			auto in_batch = batch_usernames.find(w.account.username);
			if (taken || (in_batch != batch_usernames.end() && in_batch->second != id)) {
				throw Error(
					ErrorCode::Conflict,
					"username '" + w.account.username + "' is already taken",
					{{"entity", "account"}, {"username", w.account.username}});
			}
			batch_usernames[w.account.username] = id;
			w.account.revision = w.expected_revision + 1;
		}

		for (auto &w : out.patients) {
			const auto &id = w.record.patient_id.str();
			if (!seen.insert("p:" + id).second) {
				throw Error(ErrorCode::ContractViolation, "patient written twice in one batch");
			}
			Statement cur(db_, "SELECT state_version, site_id FROM patients WHERE patient_id = ?1");
			cur.bind(1, id);
			std::int64_t actual = 0;
			std::optional<std::string> site;
			if (cur.step()) {
				actual = cur.integer(0);
				site = cur.text(1);
			}
			if (actual != w.expected_version) {
				throw conflict("patient", id, w.expected_version, actual);
			}
			if (site && *site != w.record.site_id.str()) {
				throw Error(ErrorCode::ContractViolation, "patient " + id + ": owning site is immutable");
			}
			w.record.state_version = w.expected_version + 1;
		}

		for (auto &w : out.notifications) {
			const auto &id = w.notification.notification_id.str();
			if (!seen.insert("n:" + id).second) {
				throw Error(ErrorCode::ContractViolation, "notification written twice in one batch");
			}
			auto actual = current_version(db_, "SELECT revision FROM notifications WHERE notification_id = ?1", id);
			if (actual != w.expected_revision) {
				throw conflict("notification", id, w.expected_revision, actual);
			}
			Statement existing(db_, "SELECT notification_id FROM notifications WHERE patient_id = ?1 AND template = ?2");
			existing.bind(1, w.notification.patient_id.str())
				.bind(2, std::string(to_string(w.notification.template_name)));
			if (existing.step() && existing.text(0) != id) {
				throw Error(
					ErrorCode::Conflict,
					"notification already exists for patient " + w.notification.patient_id.str(),
					{{"entity", "notification"}, {"existing", existing.text(0)}});
			}
			w.notification.revision = w.expected_revision + 1;
		}

		validate_batch(out);

		std::int64_t last = 0;
		std::string prev = kGenesisHash;
		{
			Statement tail(db_, "SELECT seq, hash FROM audit_events ORDER BY seq DESC LIMIT 1");
			if (tail.step()) {
				last = tail.integer(0);
				prev = tail.text(1);
			}
		}
		seal(out.audit, last + 1, prev);

		for (const auto &w : out.sites) {
			upsert_site(db_, w.site);
		}
		for (const auto &w : out.accounts) {
			upsert_account(db_, w.account);
		}
		for (const auto &w : out.patients) {
			upsert_patient(db_, w.record);
		}
		for (const auto &w : out.notifications) {
			upsert_notification(db_, w.notification);
		}
		for (const auto &e : out.audit) {
			insert_audit(db_, e);
		}
		CommitResult result;
		if (!out.audit.empty()) {
			result.first_seq = out.audit.front().seq;
			result.last_seq = out.audit.back().seq;
		}
		return result;
	});
}

std::optional<PatientRecord> RelationalDriver::get_patient(const PatientId &id) const {
	std::lock_guard lock(mutex_);
	Statement s(db_, "SELECT doc FROM patients WHERE patient_id = ?1");
	s.bind(1, id.str());
	return one_doc<PatientRecord>(s);
}

std::vector<PatientRecord> RelationalDriver::list_patients(const PatientFilter &filter) const {
	std::lock_guard lock(mutex_);
	Statement s(db_,
		"SELECT doc FROM patients WHERE (?1 IS NULL OR site_id = ?1) AND (?2 IS NULL OR workflow_state = ?2) "
		"ORDER BY patient_id");
	if (filter.site) {
		s.bind(1, filter.site->str());
	} else {
		s.bind_null(1);
	}
	if (filter.state) {
		s.bind(2, std::string(to_string(*filter.state)));
	} else {
		s.bind_null(2);
	}
	return docs<PatientRecord>(s);
}

std::optional<UserAccount> RelationalDriver::get_account(const AccountId &id) const {
	std::lock_guard lock(mutex_);
	Statement s(db_, "SELECT doc FROM accounts WHERE account_id = ?1");
	s.bind(1, id.str());
	return one_doc<UserAccount>(s);
}

std::optional<UserAccount> RelationalDriver::get_account_by_username(std::string_view username) const {
	std::lock_guard lock(mutex_);
	Statement s(db_, "SELECT doc FROM accounts WHERE username = ?1");
	s.bind(1, std::string(username));
	return one_doc<UserAccount>(s);
}

std::vector<UserAccount> RelationalDriver::list_accounts() const {
	std::lock_guard lock(mutex_);
	Statement s(db_, "SELECT doc FROM accounts ORDER BY account_id");
	return docs<UserAccount>(s);
}

std::optional<Site> RelationalDriver::get_site(const SiteId &id) const {
	std::lock_guard lock(mutex_);
	Statement s(db_, "SELECT doc FROM sites WHERE site_id = ?1");
	s.bind(1, id.str());
	return one_doc<Site>(s);
}

std::vector<Site> RelationalDriver::list_sites() const {
	std::lock_guard lock(mutex_);
	Statement s(db_, "SELECT doc FROM sites ORDER BY site_id");
	return docs<Site>(s);
}

std::optional<Notification> RelationalDriver::get_notification(const NotificationId &id) const {
	std::lock_guard lock(mutex_);
	Statement s(db_, "SELECT doc FROM notifications WHERE notification_id = ?1");
	s.bind(1, id.str());
	return one_doc<Notification>(s);
}

std::optional<Notification> RelationalDriver::find_notification(const PatientId &patient, NotificationTemplate tmpl) const {
	std::lock_guard lock(mutex_);
	Statement s(db_, "SELECT doc FROM notifications WHERE patient_id = ?1 AND template = ?2");
	s.bind(1, patient.str()).bind(2, std::string(to_string(tmpl)));
	return one_doc<Notification>(s);
}

std::vector<Notification> RelationalDriver::list_notifications(std::optional<NotificationStatus> status) const {
	std::lock_guard lock(mutex_);
	Statement s(db_, "SELECT doc FROM notifications WHERE (?1 IS NULL OR status = ?1) ORDER BY notification_id");
	if (status) {
		s.bind(1, std::string(to_string(*status)));
	} else {
		s.bind_null(1);
	}
	return docs<Notification>(s);
}

std::vector<AuditEvent> RelationalDriver::read_audit(std::int64_t from_seq, std::optional<std::size_t> limit) const {
	std::lock_guard lock(mutex_);
	Statement s(db_, "SELECT doc FROM audit_events WHERE seq >= ?1 ORDER BY seq LIMIT ?2");
	s.bind(1, from_seq).bind(2, limit ? static_cast<std::int64_t>(*limit) : std::int64_t {-1});
	return docs<AuditEvent>(s);
}

std::int64_t RelationalDriver::last_seq() const {
	std::lock_guard lock(mutex_);
	Statement s(db_, "SELECT COALESCE(MAX(seq), 0) FROM audit_events");
	s.step();
	return s.integer(0);
}

void RelationalDriver::import_state(const StoreState &state) {
	std::lock_guard lock(mutex_);
	transaction(db_, [&] {
		Statement count(db_,
			"SELECT (SELECT COUNT(*) FROM sites) + (SELECT COUNT(*) FROM accounts) + "
			"(SELECT COUNT(*) FROM patients) + (SELECT COUNT(*) FROM notifications) + "
			"(SELECT COUNT(*) FROM audit_events)");
		count.step();
		if (count.integer(0) != 0) {
			throw Error(ErrorCode::Precondition, "import requires an empty store");
		}
		for (const auto &[_, v] : state.sites) {
			upsert_site(db_, v);
		}
		for (const auto &[_, v] : state.accounts) {
			upsert_account(db_, v);
		}
		for (const auto &[_, v] : state.patients) {
			upsert_patient(db_, v);
		}
		for (const auto &[_, v] : state.notifications) {
			upsert_notification(db_, v);
		}
		for (const auto &e : state.audit) {
			insert_audit(db_, e);
		}
	});
}

json RelationalDriver::health() const {
	std::lock_guard lock(mutex_);
	Statement s(db_, "SELECT version FROM schema_version LIMIT 1");
	std::int64_t version = s.step() ? s.integer(0) : 0;
	return {
		{"driver", "RELATIONAL"},
		{"status", "ok"},
		{"engine", std::string("sqlite ") + sqlite3_libversion()},
		{"schema_version", version},
	};
}

void RelationalDriver::execute(const std::string &sql) {
	std::lock_guard lock(mutex_);
	exec(db_, sql);
}

} // namespace passdcc::store
