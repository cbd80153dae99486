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

#include <passdcc/store/embedded.hpp>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <passdcc/model/codec.hpp>
#include <passdcc/store/audit_chain.hpp>
#include <passdcc/store/wal.hpp>

namespace passdcc::store {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kWalName = "wal.log";
constexpr std::string_view kSnapshotPrefix = "snapshot-";
constexpr std::string_view kSnapshotSuffix = ".json";

Error io_error(const std::string &what) {
	return Error(ErrorCode::Io, what + ": " + std::strerror(errno));
}

void write_all(int fd, const char *data, std::size_t len) {
	while (len > 0) {
		auto n = ::write(fd, data, len);
		if (n < 0) {
			if (errno == EINTR) {
				continue;
			}
			throw io_error("write failed");
		}
		data += n;
		len -= static_cast<std::size_t>(n);
	}
}

void fsync_dir(const fs::path &dir) {
	int fd = ::open(dir.c_str(), O_RDONLY | O_DIRECTORY);
	if (fd >= 0) {
		::fsync(fd);
		::close(fd);
	}
}

struct SnapshotFile {
	fs::path path;
	std::int64_t as_of_seq {0};
	std::int64_t as_of_lsn {0};
	std::uint64_t wal_offset {0};
	json state;
};

std::optional<SnapshotFile> read_snapshot(const fs::path &path) {
	std::ifstream in(path);
	if (!in) {
		return std::nullopt;
	}
	try {
		json doc = json::parse(in);
		SnapshotFile s;
		s.path = path;
		s.as_of_seq = doc.at("as_of_seq").get<std::int64_t>();
		s.as_of_lsn = doc.at("as_of_lsn").get<std::int64_t>();
		s.wal_offset = doc.at("wal_offset").get<std::uint64_t>();
		s.state = std::move(doc.at("state"));
		return s;
	} catch (const std::exception &) {
		return std::nullopt;
	}
}

// Intact snapshots, newest log position first.
std::vector<SnapshotFile> list_snapshots(const fs::path &dir) {
	std::vector<SnapshotFile> out;
	for (const auto &entry : fs::directory_iterator(dir)) {
		auto name = entry.path().filename().string();
		if (name.rfind(kSnapshotPrefix, 0) != 0 || name.size() <= kSnapshotSuffix.size()
			|| name.compare(name.size() - kSnapshotSuffix.size(), kSnapshotSuffix.size(), kSnapshotSuffix) != 0) {
			continue;
		}
		if (auto snap = read_snapshot(entry.path())) {
			out.push_back(std::move(*snap));
		}
	}
	std::sort(out.begin(), out.end(), [](const auto &a, const auto &b) {
		return a.as_of_lsn > b.as_of_lsn;
	});
	return out;
}

struct LogEntry {
	std::int64_t lsn {0};
	std::optional<WriteBatch> batch;
	std::optional<StoreState> import;
};

std::optional<LogEntry> decode_entry(const std::string &payload) {
	try {
		json doc = json::parse(payload);
		LogEntry e;
		e.lsn = doc.at("lsn").get<std::int64_t>();
		if (doc.contains("import")) {
			e.import = StoreState::from_json(doc["import"]);
		} else {
			e.batch = batch_from_json(doc.at("batch"));
		}
		return e;
	} catch (const std::exception &) {
		return std::nullopt;
	}
}

void apply_entry(StoreState &state, const LogEntry &e) {
	if (e.import) {
		state = *e.import;
	} else {
		state.apply(*e.batch);
	}
}

} // namespace

LockFile::LockFile(const fs::path &path) {
	if (path.has_parent_path()) {
		fs::create_directories(path.parent_path());
	}
	fd_ = ::open(path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
	if (fd_ < 0) {
		throw io_error("cannot open " + path.string());
	}
	if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
		::close(fd_);
		fd_ = -1;
		throw Error(ErrorCode::Conflict, "store lock " + path.string() + " is held by another process");
	}
}

LockFile::~LockFile() {
	if (fd_ >= 0) {
		::flock(fd_, LOCK_UN);
		::close(fd_);
	}
}

EmbeddedDriver::EmbeddedDriver(fs::path dir, EmbeddedOptions options) :
	dir_(std::move(dir)),
	options_(std::move(options)),
	lock_(dir_ / "LOCK") {
	recover();
}

EmbeddedDriver::~EmbeddedDriver() {
	try {
		close();
	} catch (const std::exception &e) {
		std::cerr << "embedded store: shutdown snapshot failed: " << e.what() << "\n";
	}
	if (wal_fd_ >= 0) {
		::close(wal_fd_);
	}
}

void EmbeddedDriver::recover() {
	for (const auto &entry : fs::directory_iterator(dir_)) {
		if (entry.path().extension() == ".tmp") {
			fs::remove(entry.path());
		}
	}
	auto wal_path = dir_ / kWalName;
	auto snapshots = list_snapshots(dir_);

	std::uint64_t start = 0;
	if (!snapshots.empty()) {
		const auto &snap = snapshots.front();
		state_ = StoreState::from_json(snap.state);
		lsn_ = snap.as_of_lsn;
		start = snap.wal_offset;
		recovery_.snapshot_lsn = snap.as_of_lsn;
	}

	auto result = wal::scan(wal_path, start);
	bool fallback = false;
	if (!result.records.empty()) {
		auto first = decode_entry(result.records.front().payload);
		fallback = !first || first->lsn != lsn_ + 1;
	} else if (start > result.file_size) {
		fallback = true;
	}
	if (fallback) {
		result = wal::scan(wal_path, 0);
	}

	std::uint64_t good_end = fallback ? 0 : start;
	for (const auto &rec : result.records) {
		auto entry = decode_entry(rec.payload);
		if (!entry) {
			break;
		}
		if (entry->lsn <= lsn_) {
			good_end = rec.end;
			continue;
		}
		if (entry->lsn != lsn_ + 1) {
			break;
		}
		apply_entry(state_, *entry);
		lsn_ = entry->lsn;
		good_end = rec.end;
		++recovery_.replayed;
	}
	if (good_end < result.file_size) {
		recovery_.truncated_bytes = result.file_size - good_end;
		fs::resize_file(wal_path, good_end);
	}
	wal_size_ = good_end;
	since_snapshot_ = recovery_.replayed;

	wal_fd_ = ::open(wal_path.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
	if (wal_fd_ < 0) {
		throw io_error("cannot open " + wal_path.string());
	}
}

void EmbeddedDriver::crash_point(CrashPoint point) const {
	if (options_.crash_hook) {
		options_.crash_hook(point);
	}
}

void EmbeddedDriver::append(const std::string &payload) {
	auto framed = wal::frame(payload);
	try {
		if (options_.crash_hook) {
			auto half = framed.size() / 2;
			write_all(wal_fd_, framed.data(), half);
			crash_point(CrashPoint::MidWalRecord);
			write_all(wal_fd_, framed.data() + half, framed.size() - half);
		} else {
			write_all(wal_fd_, framed.data(), framed.size());
		}
		if (options_.sync && ::fdatasync(wal_fd_) != 0) {
			throw io_error("fdatasync failed");
		}
	} catch (...) {
		// Nothing of a failed append may survive to be replayed.
		if (::ftruncate(wal_fd_, static_cast<off_t>(wal_size_)) != 0) {
			std::cerr << "embedded store: cannot roll back torn append\n";
		}
		throw;
	}
	wal_size_ += framed.size();
}

CommitResult EmbeddedDriver::commit(const WriteBatch &batch) {
	std::unique_lock lock(mutex_);
	if (closed_) {
		throw Error(ErrorCode::Io, "store is closed");
	}
	auto prepared = state_.prepare(batch);
	auto lsn = lsn_ + 1;
	json payload {{"lsn", lsn}, {"batch", batch_json(prepared)}};
	crash_point(CrashPoint::BeforeWalAppend);
	append(payload.dump());
	crash_point(CrashPoint::AfterWalAppend);
	state_.apply(prepared);
	lsn_ = lsn;
	crash_point(CrashPoint::AfterApply);

	if (++since_snapshot_ >= static_cast<std::int64_t>(options_.snapshot_every)) {
		try {
			write_snapshot();
		} catch (const Error &e) {
			// The commit is durable in the log; retry the snapshot next time.
			std::cerr << "embedded store: snapshot failed: " << e.what() << "\n";
		}
	}
	CommitResult result;
	if (!prepared.audit.empty()) {
		result.first_seq = prepared.audit.front().seq;
		result.last_seq = prepared.audit.back().seq;
	}
	return result;
}

void EmbeddedDriver::write_snapshot() {
	json doc {
		{"format", 1},
		{"as_of_seq", state_.last_seq()},
		{"as_of_lsn", lsn_},
		{"wal_offset", wal_size_},
		{"state", state_.to_json()},
	};
	auto text = doc.dump();
	auto name = std::string(kSnapshotPrefix) + std::to_string(state_.last_seq()) + std::string(kSnapshotSuffix);
	auto final_path = dir_ / name;
	auto tmp_path = dir_ / (name + ".tmp");

	int fd = ::open(tmp_path.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
	if (fd < 0) {
		throw io_error("cannot create " + tmp_path.string());
	}
	try {
		auto half = text.size() / 2;
		write_all(fd, text.data(), half);
		crash_point(CrashPoint::MidSnapshot);
		write_all(fd, text.data() + half, text.size() - half);
		if (options_.sync && ::fsync(fd) != 0) {
			throw io_error("fsync failed");
		}
	} catch (...) {
		::close(fd);
		fs::remove(tmp_path);
		throw;
	}
	::close(fd);
	crash_point(CrashPoint::BeforeSnapshotRename);
	fs::rename(tmp_path, final_path);
	if (options_.sync) {
		fsync_dir(dir_);
	}
	since_snapshot_ = 0;

	auto snapshots = list_snapshots(dir_);
	for (std::size_t i = 2; i < snapshots.size(); ++i) {
		fs::remove(snapshots[i].path);
	}
}

void EmbeddedDriver::snapshot_now() {
	std::unique_lock lock(mutex_);
	write_snapshot();
}

void EmbeddedDriver::close() {
	std::unique_lock lock(mutex_);
	if (closed_) {
		return;
	}
	closed_ = true;
	if (since_snapshot_ > 0) {
		write_snapshot();
	}
}

std::optional<PatientRecord> EmbeddedDriver::get_patient(const PatientId &id) const {
	std::shared_lock lock(mutex_);
	auto it = state_.patients.find(id);
	if (it == state_.patients.end()) {
		return std::nullopt;
	}
	return it->second;
}

std::vector<PatientRecord> EmbeddedDriver::list_patients(const PatientFilter &filter) const {
	std::shared_lock lock(mutex_);
	std::vector<PatientRecord> out;
	for (const auto &[_, p] : state_.patients) {
		if ((!filter.site || p.site_id == *filter.site) && (!filter.state || p.workflow_state == *filter.state)) {
			out.push_back(p);
		}
	}
	return out;
}

std::optional<UserAccount> EmbeddedDriver::get_account(const AccountId &id) const {
	std::shared_lock lock(mutex_);
	auto it = state_.accounts.find(id);
	if (it == state_.accounts.end()) {
		return std::nullopt;
	}
	return it->second;
}

std::optional<UserAccount> EmbeddedDriver::get_account_by_username(std::string_view username) const {
	std::shared_lock lock(mutex_);
	const auto *a = state_.account_by_username(username);
	if (!a) {
		return std::nullopt;
	}
	return *a;
}

std::vector<UserAccount> EmbeddedDriver::list_accounts() const {
	std::shared_lock lock(mutex_);
	std::vector<UserAccount> out;
	for (const auto &[_, a] : state_.accounts) {
		out.push_back(a);
	}
	return out;
}

std::optional<Site> EmbeddedDriver::get_site(const SiteId &id) const {
	std::shared_lock lock(mutex_);
	auto it = state_.sites.find(id);
	if (it == state_.sites.end()) {
		return std::nullopt;
	}
	return it->second;
}

std::vector<Site> EmbeddedDriver::list_sites() const {
	std::shared_lock lock(mutex_);
	std::vector<Site> out;
	for (const auto &[_, s] : state_.sites) {
		out.push_back(s);
	}
	return out;
}

std::optional<Notification> EmbeddedDriver::get_notification(const NotificationId &id) const {
	std::shared_lock lock(mutex_);
	auto it = state_.notifications.find(id);
	if (it == state_.notifications.end()) {
		return std::nullopt;
	}
	return it->second;
}

std::optional<Notification> EmbeddedDriver::find_notification(const PatientId &patient, NotificationTemplate tmpl) const {
	std::shared_lock lock(mutex_);
	const auto *n = state_.notification_for(patient, tmpl);
	if (!n) {
		return std::nullopt;
	}
	return *n;
}

std::vector<Notification> EmbeddedDriver::list_notifications(std::optional<NotificationStatus> status) const {
	std::shared_lock lock(mutex_);
	std::vector<Notification> out;
	for (const auto &[_, n] : state_.notifications) {
		if (!status || n.status == *status) {
			out.push_back(n);
		}
	}
	return out;
}

std::vector<AuditEvent> EmbeddedDriver::read_audit(std::int64_t from_seq, std::optional<std::size_t> limit) const {
	std::shared_lock lock(mutex_);
	std::vector<AuditEvent> out;
	auto begin = static_cast<std::size_t>(std::max<std::int64_t>(from_seq, 1) - 1);
	for (auto i = begin; i < state_.audit.size(); ++i) {
		if (limit && out.size() >= *limit) {
			break;
		}
		out.push_back(state_.audit[i]);
	}
	return out;
}

std::int64_t EmbeddedDriver::last_seq() const {
	std::shared_lock lock(mutex_);
	return state_.last_seq();
}

void EmbeddedDriver::import_state(const StoreState &state) {
	std::unique_lock lock(mutex_);
	if (lsn_ != 0 || !(state_ == StoreState {})) {
		throw Error(ErrorCode::Precondition, "import requires an empty store");
	}
	json payload {{"lsn", 1}, {"import", state.to_json()}};
	append(payload.dump());
	state_ = state;
	lsn_ = 1;
	write_snapshot();
}

json EmbeddedDriver::health() const {
	std::shared_lock lock(mutex_);
	return {
		{"driver", "EMBEDDED"},
		{"status", closed_ ? "closed" : "ok"},
		{"data_dir", dir_.string()},
		{"lsn", lsn_},
		{"last_seq", state_.last_seq()},
	};
}

StoreState EmbeddedDriver::state() const {
	std::shared_lock lock(mutex_);
	return state_;
}

json VerifyReport::to_json() const {
	json j {
		{"ok", ok},
		{"wal_records", wal_records},
		{"audit_events", audit_events},
		{"snapshots_checked", snapshots_checked},
		{"torn_tail", torn_tail},
	};
	if (divergent_seq) {
		j["divergent_seq"] = *divergent_seq;
	}
	if (!problem.empty()) {
		j["problem"] = problem;
	}
	return j;
}

StoreState replay_wal(const fs::path &dir) {
	StoreState state;
	auto result = wal::scan(dir / kWalName);
	std::int64_t lsn = 0;
	for (const auto &rec : result.records) {
		auto entry = decode_entry(rec.payload);
		if (!entry || entry->lsn != lsn + 1) {
			break;
		}
		apply_entry(state, *entry);
		lsn = entry->lsn;
	}
	return state;
}

VerifyReport verify_embedded(const fs::path &dir) {
	if (!fs::exists(dir / kWalName)) {
		return {false, std::nullopt, "no wal.log in " + dir.string()};
	}
	LockFile lock(dir / "LOCK");
	VerifyReport report;
	auto result = wal::scan(dir / kWalName);
	report.torn_tail = result.torn_tail;

	std::map<std::int64_t, SnapshotFile> snapshots;
	for (auto &s : list_snapshots(dir)) {
		snapshots.emplace(s.as_of_lsn, std::move(s));
	}

	auto fail = [&report](std::optional<std::int64_t> seq, std::string problem) {
		report.ok = false;
		report.divergent_seq = seq;
		report.problem = std::move(problem);
		return report;
	};

	auto compare = [&](const StoreState &replayed, const SnapshotFile &snap) -> std::optional<std::string> {
		++report.snapshots_checked;
		StoreState stored;
		try {
			stored = StoreState::from_json(snap.state);
		} catch (const std::exception &e) {
			return std::string("unreadable snapshot: ") + e.what();
		}
		if (stored == replayed) {
			return std::nullopt;
		}
		std::int64_t seq = snap.as_of_seq;
		auto n = std::min(stored.audit.size(), replayed.audit.size());
		for (std::size_t i = 0; i < n; ++i) {
			if (!(stored.audit[i] == replayed.audit[i])) {
				seq = static_cast<std::int64_t>(i) + 1;
				break;
			}
		}
		report.divergent_seq = seq;
		return "snapshot " + snap.path.filename().string() + " differs from log replay";
	};

	StoreState state;
	std::int64_t lsn = 0;
	if (auto it = snapshots.find(0); it != snapshots.end()) {
		if (auto problem = compare(state, it->second)) {
			return fail(report.divergent_seq, *problem);
		}
	}
	for (const auto &rec : result.records) {
		auto entry = decode_entry(rec.payload);
		if (!entry) {
			return fail(state.last_seq() + 1, "undecodable log record at offset " + std::to_string(rec.offset));
		}
		if (entry->lsn != lsn + 1) {
			return fail(state.last_seq() + 1, "log sequence gap at lsn " + std::to_string(entry->lsn));
		}
		apply_entry(state, *entry);
		lsn = entry->lsn;
		++report.wal_records;
		if (auto it = snapshots.find(lsn); it != snapshots.end()) {
			if (auto problem = compare(state, it->second)) {
				return fail(report.divergent_seq, *problem);
			}
		}
	}
	if (!snapshots.empty() && snapshots.rbegin()->first > lsn) {
		return fail(snapshots.rbegin()->second.as_of_seq, "snapshot is ahead of the log");
	}
	report.audit_events = static_cast<std::int64_t>(state.audit.size());
	auto chain = verify_chain(state.audit);
	if (!chain.ok) {
		return fail(chain.first_bad_seq, "audit hash chain broken: " + chain.problem);
	}
	return report;
}

} // namespace passdcc::store
