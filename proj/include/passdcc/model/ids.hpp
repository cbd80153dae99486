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

#include <compare>
#include <cstdint>
#include <functional>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <utility>

#include <passdcc/model/time.hpp>

namespace passdcc {

// Opaque identifier. The tag keeps a PatientId from being passed where a
// SiteId is expected; the value is an ULID-style string.
template <typename Tag>
class Id {
public:
	Id() = default;
	explicit Id(std::string value) :
		value_(std::move(value)) {
	}

	const std::string &str() const noexcept {
		return value_;
	}
	bool empty() const noexcept {
		return value_.empty();
	}

	auto operator<=>(const Id &) const = default;

private:
	std::string value_;
};

struct SiteTag {};
struct PatientTag {};
struct AccountTag {};
struct AssessmentTag {};
struct SpecimenTag {};
struct NotificationTag {};

using SiteId = Id<SiteTag>;
using PatientId = Id<PatientTag>;
using AccountId = Id<AccountTag>;
using AssessmentId = Id<AssessmentTag>;
using SpecimenId = Id<SpecimenTag>;
using NotificationId = Id<NotificationTag>;

class IdGenerator {
public:
	virtual ~IdGenerator() = default;
	virtual std::string next() = 0;

	template <typename IdT>
	IdT make() {
		return IdT {next()};
	}
};

// 26-character Crockford base32: 48-bit millisecond timestamp followed by
// 80 random bits. Ids minted within the same millisecond increment the
// random part, so the sequence stays strictly increasing.
class UlidGenerator final : public IdGenerator {
public:
	explicit UlidGenerator(const Clock &clock, std::optional<std::uint64_t> seed = std::nullopt);

	std::string next() override;

private:
	const Clock &clock_;
	std::mutex mutex_;
	std::mt19937_64 rng_;
	std::int64_t last_millis_ {-1};
	std::uint16_t rand_hi_ {0};
	std::uint64_t rand_lo_ {0};
};

bool is_ulid(std::string_view text);

} // namespace passdcc

template <typename Tag>
struct std::hash<passdcc::Id<Tag>> {
	std::size_t operator()(const passdcc::Id<Tag> &id) const noexcept {
		return std::hash<std::string> {}(id.str());
	}
};
