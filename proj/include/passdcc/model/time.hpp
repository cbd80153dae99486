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

#include <atomic>
#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace passdcc {

// UTC, millisecond precision.
using Timestamp = std::chrono::time_point<std::chrono::system_clock, std::chrono::milliseconds>;

std::string format_rfc3339(Timestamp t);

// Accepts "Z" or a numeric offset and any number of fractional digits
// (truncated to milliseconds). Returns nullopt on malformed text.
std::optional<Timestamp> parse_rfc3339(std::string_view text);

// Calendar date as used by CRF date fields ("YYYY-MM-DD").
bool is_valid_date(std::string_view text);

// "YYYY-MM" of the timestamp; used by de-identified export.
std::string month_of(Timestamp t);

class Clock {
public:
	virtual ~Clock() = default;
	virtual Timestamp now() const = 0;
};

class SystemClock final : public Clock {
public:
	Timestamp now() const override;
};

// Test clock. Starts at the given instant and only moves when told to.
class ManualClock final : public Clock {
public:
	explicit ManualClock(Timestamp start);

	Timestamp now() const override;
	void advance(std::chrono::milliseconds by);
	void set(Timestamp t);

private:
	std::atomic<std::int64_t> millis_;
};

} // namespace passdcc
