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
#include <map>
#include <mutex>
#include <optional>
#include <string>

#include <passdcc/model/ids.hpp>
#include <passdcc/model/time.hpp>

namespace passdcc::api {

struct Session {
	std::string token;
	AccountId account_id;
	Timestamp created_at {};
	Timestamp expires_at {};
};

// Server-side sessions keyed by a 256-bit random token. Expiry is idle
// time: every successful lookup pushes expires_at forward by the TTL.
class SessionStore {
public:
	SessionStore(const Clock &clock, std::chrono::milliseconds idle_ttl);

	Session create(const AccountId &account);
	std::optional<Session> touch(const std::string &token);
	void revoke(const std::string &token);
	void revoke_account(const AccountId &account, const std::string &except_token = {});
	std::size_t size() const;

	std::chrono::milliseconds idle_ttl() const {
		return ttl_;
	}

private:
	const Clock &clock_;
	std::chrono::milliseconds ttl_;
	mutable std::mutex mutex_;
	std::map<std::string, Session> sessions_;
};

} // namespace passdcc::api
