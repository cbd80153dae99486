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

#include <passdcc/api/session.hpp>

#include <passdcc/security/crypto.hpp>

namespace passdcc::api {

SessionStore::SessionStore(const Clock &clock, std::chrono::milliseconds idle_ttl) :
	clock_(clock), ttl_(idle_ttl) {
}

Session SessionStore::create(const AccountId &account) {
	auto now = clock_.now();
	Session s {security::random_token(32), account, now, now + ttl_};
	std::lock_guard lock(mutex_);
	// Opportunistic sweep so abandoned sessions do not accumulate.
	std::erase_if(sessions_, [&](const auto &entry) { return entry.second.expires_at <= now; });
	sessions_.emplace(s.token, s);
	return s;
}

std::optional<Session> SessionStore::touch(const std::string &token) {
	auto now = clock_.now();
	std::lock_guard lock(mutex_);
	auto it = sessions_.find(token);
	if (it == sessions_.end()) {
		return std::nullopt;
	}
	if (it->second.expires_at <= now) {
		sessions_.erase(it);
		return std::nullopt;
	}
	it->second.expires_at = now + ttl_;
	return it->second;
}

void SessionStore::revoke(const std::string &token) {
	std::lock_guard lock(mutex_);
	sessions_.erase(token);
}

void SessionStore::revoke_account(const AccountId &account, const std::string &except_token) {
	std::lock_guard lock(mutex_);
	std::erase_if(sessions_, [&](const auto &entry) {
		return entry.second.account_id == account && entry.first != except_token;
	});
}

std::size_t SessionStore::size() const {
	std::lock_guard lock(mutex_);
	return sessions_.size();
}

} // namespace passdcc::api
