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

#include <passdcc/security/crypto.hpp>

#include <array>
#include <stdexcept>
#include <vector>

#include <openssl/crypto.h>
#include <openssl/evp.h>
#include <openssl/rand.h>
#include <openssl/sha.h>

#include <passdcc/model/error.hpp>

namespace passdcc::security {

namespace {

std::string to_hex(const unsigned char *data, std::size_t len) {
	static constexpr char kHex[] = "0123456789abcdef";
	std::string out(len * 2, '0');
	for (std::size_t i = 0; i < len; ++i) {
		out[2 * i] = kHex[data[i] >> 4];
		out[2 * i + 1] = kHex[data[i] & 15];
	}
	return out;
}

std::optional<std::vector<unsigned char>> from_hex(std::string_view hex) {
	if (hex.size() % 2 != 0) {
		return std::nullopt;
	}
	auto nibble = [](char c) -> int {
		if (c >= '0' && c <= '9') {
			return c - '0';
		}
		if (c >= 'a' && c <= 'f') {
			return c - 'a' + 10;
		}
		return -1;
	};
	std::vector<unsigned char> out(hex.size() / 2);
	for (std::size_t i = 0; i < out.size(); ++i) {
		int hi = nibble(hex[2 * i]);
		int lo = nibble(hex[2 * i + 1]);
		if (hi < 0 || lo < 0) {
			return std::nullopt;
		}
		out[i] = static_cast<unsigned char>(hi << 4 | lo);
	}
	return out;
}

void fill_random(unsigned char *buf, std::size_t len) {
	if (RAND_bytes(buf, static_cast<int>(len)) != 1) {
		throw Error(ErrorCode::Io, "CSPRNG unavailable");
	}
}

std::vector<unsigned char> derive(std::string_view password, const std::vector<unsigned char> &salt, int iterations) {
	std::vector<unsigned char> key(32);
	if (PKCS5_PBKDF2_HMAC(
			password.data(),
			static_cast<int>(password.size()),
			salt.data(),
			static_cast<int>(salt.size()),
			iterations,
			EVP_sha256(),
			static_cast<int>(key.size()),
			key.data())
		!= 1) {
		throw Error(ErrorCode::Io, "PBKDF2 failed");
	}
	return key;
}

} // namespace

std::string sha256_hex(std::string_view data) {
	std::array<unsigned char, SHA256_DIGEST_LENGTH> digest {};
	SHA256(reinterpret_cast<const unsigned char *>(data.data()), data.size(), digest.data());
	return to_hex(digest.data(), digest.size());
}

std::string random_token(std::size_t bytes) {
	std::vector<unsigned char> buf(bytes);
	fill_random(buf.data(), buf.size());
	return to_hex(buf.data(), buf.size());
}

std::string random_password(std::size_t length) {
	static constexpr std::string_view kAlphabet =
		"ABCDEFGHJKMNPQRSTUVWXYZabcdefghjkmnpqrstuvwxyz23456789";
	std::string out;
	out.reserve(length);
	// Rejection sampling keeps the distribution uniform over the alphabet.
	while (out.size() < length) {
		unsigned char b;
		fill_random(&b, 1);
		if (b < 256 - 256 % kAlphabet.size()) {
			out.push_back(kAlphabet[b % kAlphabet.size()]);
		}
	}
	// Guarantee the policy's letter + digit mix.
	out[0] = kAlphabet[out[0] % 46];
	out[length - 1] = "23456789"[static_cast<unsigned char>(out[length - 1]) % 8];
	return out;
}

std::optional<std::string> check_password_policy(std::string_view password) {
	if (password.size() < 10) {
		return "password must be at least 10 characters";
	}
	if (password.size() > 256) {
		return "password must be at most 256 characters";
	}
	bool letter = false;
	bool digit = false;
	for (char c : password) {
		letter = letter || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
		digit = digit || (c >= '0' && c <= '9');
	}
	if (!letter || !digit) {
		return "password must contain letters and digits";
	}
	return std::nullopt;
}

PasswordHasher::PasswordHasher(int iterations) :
	iterations_(iterations) {
	if (iterations < 1) {
		throw Error(ErrorCode::Configuration, "PBKDF2 iterations must be positive");
	}
}

std::string PasswordHasher::hash(std::string_view password) const {
	std::vector<unsigned char> salt(16);
	fill_random(salt.data(), salt.size());
	auto key = derive(password, salt, iterations_);
	return "pbkdf2-sha256$" + std::to_string(iterations_) + "$" + to_hex(salt.data(), salt.size())
		   + "$" + to_hex(key.data(), key.size());
}

bool PasswordHasher::verify(std::string_view password, const std::string &encoded) const {
	constexpr std::string_view kPrefix = "pbkdf2-sha256$";
	if (encoded.rfind(kPrefix, 0) != 0) {
		return false;
	}
	auto rest = std::string_view(encoded).substr(kPrefix.size());
	auto p1 = rest.find('$');
	auto p2 = rest.find('$', p1 == std::string_view::npos ? p1 : p1 + 1);
	if (p1 == std::string_view::npos || p2 == std::string_view::npos) {
		return false;
	}
	int iterations = 0;
	try {
		iterations = std::stoi(std::string(rest.substr(0, p1)));
	} catch (const std::exception &) {
		return false;
	}
	auto salt = from_hex(rest.substr(p1 + 1, p2 - p1 - 1));
	auto expected = from_hex(rest.substr(p2 + 1));
	if (iterations < 1 || !salt || !expected || expected->size() != 32) {
		return false;
	}
	auto key = derive(password, *salt, iterations);
	return CRYPTO_memcmp(key.data(), expected->data(), key.size()) == 0;
}

} // namespace passdcc::security
