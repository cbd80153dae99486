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

#include <chrono>
#include <string>

#include <json.hpp>

#include <passdcc/model/ids.hpp>
#include <passdcc/model/types.hpp>
#include <passdcc/notify/transport.hpp>
#include <passdcc/store/driver.hpp>

namespace passdcc::notify {

inline constexpr std::string_view kNotifierActor = "system:notifier";

struct OutboxConfig {
	int max_attempts {10};
	std::chrono::milliseconds base_backoff {std::chrono::seconds(30)};
	std::chrono::milliseconds max_backoff {std::chrono::minutes(15)};
	// How long a drain owns a claimed row before others may take it over.
	std::chrono::milliseconds lease {std::chrono::minutes(2)};
};

// Delay before the next attempt once `attempts` have failed.
std::chrono::milliseconds backoff_after(std::int64_t attempts, const OutboxConfig &config);

// Adds the PENDING row for (patient, template) to `batch`. The batch must
// carry the write that moves that patient to ENROLLED, otherwise
// Error(ContractViolation). When the store already holds a row for the
// pair, nothing is added and that row is returned.
Notification enqueue(
	store::WriteBatch &batch,
	const store::StoreDriver &store,
	const PatientId &patient,
	const std::string &recipient,
	NotificationTemplate tmpl,
	IdGenerator &ids,
	Timestamp now);

struct DrainReport {
	int attempted {0};
	int sent {0};
	int retrying {0};
	int failed {0};
	int lost_claims {0};  // rows another drain claimed first

	nlohmann::json to_json() const;
};

// Delivers due PENDING rows. A row is claimed by a CAS write that stamps
// claimed_until before the transport sees it, so concurrent drains never
// both deliver the same row.
class Outbox {
public:
	Outbox(store::StoreDriver &store, const Clock &clock, OutboxConfig config = {});

	DrainReport drain(Transport &transport);

	const OutboxConfig &config() const {
		return config_;
	}

private:
	bool claim(Notification &row, Timestamp now);
	void settle(Notification row, Transport &transport, DrainReport &report);

	store::StoreDriver &store_;
	const Clock &clock_;
	OutboxConfig config_;
};

} // namespace passdcc::notify
