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
#include <filesystem>
#include <functional>
#include <optional>
#include <shared_mutex>
#include <string>

#include <passdcc/store/driver.hpp>
#include <passdcc/store/state.hpp>

namespace passdcc::store {

// Points at which tests may simulate a process crash.
enum class CrashPoint {
	BeforeWalAppend,
	MidWalRecord,
	AfterWalAppend,
	AfterApply,
	MidSnapshot,
	BeforeSnapshotRename,
};

using CrashHook = std::function<void(CrashPoint)>;

struct EmbeddedOptions {
	std::size_t snapshot_every {1000};  // WAL records between snapshots
	bool sync {true};                   // fdatasync after each append
	CrashHook crash_hook;
};

struct RecoveryReport {
	std::optional<std::int64_t> snapshot_lsn;
	std::int64_t replayed {0};
	std::uint64_t truncated_bytes {0};
};

// Exclusive advisory lock on a lock file, held for the object's lifetime.
// Keeps a service and an offline admin tool from writing the same store.
class LockFile {
public:
	explicit LockFile(const std::filesystem::path &path);
	~LockFile();
	LockFile(const LockFile &) = delete;
	LockFile &operator=(const LockFile &) = delete;

private:
	int fd_ {-1};
};

// Single-node file-backed driver: write-ahead log plus periodic snapshot.
// Layout of the data directory:
//   LOCK                  advisory lock file
//   wal.log               every committed batch, in commit order
//   snapshot-<seq>.json   full state as of audit seq <seq>
class EmbeddedDriver final : public StoreDriver {
public:
	explicit EmbeddedDriver(std::filesystem::path dir, EmbeddedOptions options = {});
	~EmbeddedDriver() override;

	std::string_view kind() const override {
		return "EMBEDDED";
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
	void close() override;

	void snapshot_now();
	const RecoveryReport &recovery() const {
		return recovery_;
	}
	StoreState state() const;

private:
	void recover();
	void append(const std::string &payload);
	void write_snapshot();
	void crash_point(CrashPoint point) const;

	std::filesystem::path dir_;
	EmbeddedOptions options_;
	LockFile lock_;
	mutable std::shared_mutex mutex_;
	StoreState state_;
	int wal_fd_ {-1};
	std::uint64_t wal_size_ {0};
	std::int64_t lsn_ {0};
	std::int64_t since_snapshot_ {0};
	RecoveryReport recovery_;
	bool closed_ {false};
};

struct VerifyReport {
	bool ok {true};
	std::optional<std::int64_t> divergent_seq;
	std::string problem;
	std::int64_t wal_records {0};
	std::int64_t audit_events {0};
	std::int64_t snapshots_checked {0};
	bool torn_tail {false};

	nlohmann::json to_json() const;
};

// Offline integrity check: replays the whole log, compares each snapshot
// with the replayed state at the snapshot's position, and verifies the
// audit hash chain. Takes the directory lock.
VerifyReport verify_embedded(const std::filesystem::path &dir);

// Replays the log from scratch (ignoring snapshots).
StoreState replay_wal(const std::filesystem::path &dir);

} // namespace passdcc::store
