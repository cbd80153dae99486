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

#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include <passdcc/model/types.hpp>

namespace passdcc::notify {

// Delivers one notification. Failures throw Error(Io); the outbox keeps
// the row and retries.
class Transport {
public:
	virtual ~Transport() = default;
	virtual std::string_view name() const = 0;
	virtual void send(const Notification &notification, Timestamp sent_at) = 0;
};

// Appends one JSON object per delivery:
// {"notification_id","recipient","template","patient_id","sent_at"}.
class LogSinkTransport final : public Transport {
public:
	explicit LogSinkTransport(std::filesystem::path path);

	std::string_view name() const override {
		return "log-sink";
	}
	void send(const Notification &notification, Timestamp sent_at) override;

	const std::filesystem::path &path() const {
		return path_;
	}

private:
	std::filesystem::path path_;
	std::mutex mutex_;
};

struct SmtpSettings {
	std::string url;  // smtp://host:port or smtps://host:port
	std::string username;
	std::string password;
	std::string from;
	bool require_tls {true};

	// PASSDCC_SMTP_URL, PASSDCC_SMTP_USER, PASSDCC_SMTP_PASSWORD,
	// PASSDCC_SMTP_FROM, PASSDCC_SMTP_REQUIRE_TLS. nullopt when no URL.
	static std::optional<SmtpSettings> from_env();
};

class SmtpTransport final : public Transport {
public:
	explicit SmtpTransport(SmtpSettings settings);

	std::string_view name() const override {
		return "smtp";
	}
	void send(const Notification &notification, Timestamp sent_at) override;

	// RFC 5322 message text; exposed for tests.
	std::string render(const Notification &notification, Timestamp sent_at) const;

private:
	SmtpSettings settings_;
};

} // namespace passdcc::notify
