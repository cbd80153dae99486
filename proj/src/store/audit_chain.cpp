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

#include <passdcc/store/audit_chain.hpp>

#include <passdcc/model/codec.hpp>
#include <passdcc/security/crypto.hpp>

namespace passdcc::store {

std::string event_digest(const AuditEvent &event) {
	json j = event;
	j.erase("hash");
	// nlohmann objects are key-sorted, so dump() is canonical.
	return security::sha256_hex(j.dump());
}

void seal(std::vector<AuditEvent> &events, std::int64_t next_seq, std::string prev_hash) {
	for (auto &e : events) {
		e.seq = next_seq++;
		e.prev_hash = prev_hash;
		e.hash = event_digest(e);
		prev_hash = e.hash;
	}
}

ChainReport verify_chain(const std::vector<AuditEvent> &events) {
	std::string prev = kGenesisHash;
	std::int64_t expected_seq = 1;
	for (const auto &e : events) {
		if (e.seq != expected_seq) {
			return {false, expected_seq, "sequence gap: expected " + std::to_string(expected_seq) + ", found " + std::to_string(e.seq)};
		}
		if (e.prev_hash != prev) {
			return {false, e.seq, "prev_hash does not match predecessor"};
		}
		if (event_digest(e) != e.hash) {
			return {false, e.seq, "event content does not match its hash"};
		}
		prev = e.hash;
		++expected_seq;
	}
	return {};
}

} // namespace passdcc::store
