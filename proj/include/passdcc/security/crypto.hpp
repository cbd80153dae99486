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

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace passdcc::security {

std::string sha256_hex(std::string_view data);

// Hex encoding of `bytes` bytes from the OS CSPRNG.
std::string random_token(std::size_t bytes = 32);

// Temporary passwords handed to patients. Alphabet avoids 0/O/1/l/I.
std::string random_password(std::size_t length = 16);

// Reason the password is unacceptable, or nullopt.
std::optional<std::string> check_password_policy(std::string_view password);

// PBKDF2-HMAC-SHA256, encoded as "pbkdf2-sha256$<iterations>$<salt>$<key>".
class PasswordHasher {
public:
	explicit PasswordHasher(int iterations = 120000);

	std::string hash(std::string_view password) const;
	bool verify(std::string_view password, const std::string &encoded) const;

	int iterations() const {
		return iterations_;
	}

private:
	int iterations_;
};

} // namespace passdcc::security
