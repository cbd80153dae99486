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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <passdcc/model/types.hpp>

namespace passdcc::store {

inline const std::string kGenesisHash(64, '0');

// SHA-256 over the canonical encoding of every field except `hash`.
std::string event_digest(const AuditEvent &event);

// Assigns seq = next_seq, next_seq + 1, ... and links each event to its
// predecessor, starting from `prev_hash`.
void seal(std::vector<AuditEvent> &events, std::int64_t next_seq, std::string prev_hash);

struct ChainReport {
	bool ok {true};
	std::optional<std::int64_t> first_bad_seq;
	std::string problem;
};

// Checks gap-free seq from 1, prev_hash links and each event's own hash.
ChainReport verify_chain(const std::vector<AuditEvent> &events);

} // namespace passdcc::store
