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

#include <passdcc/notify/transport.hpp>

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <ctime>
#include <fstream>

#include <curl/curl.h>

#include <passdcc/model/codec.hpp>
#include <passdcc/model/error.hpp>
#include <passdcc/security/crypto.hpp>

namespace passdcc::notify {

LogSinkTransport::LogSinkTransport(std::filesystem::path path) :
	path_(std::move(path)) {
	if (path_.has_parent_path()) {
		std::filesystem::create_directories(path_.parent_path());
	}
}

void LogSinkTransport::send(const Notification &n, Timestamp sent_at) {
	json line = {
		{"notification_id", n.notification_id.str()},
		{"recipient", n.recipient},
		{"template", to_string(n.template_name)},
		{"patient_id", n.patient_id.str()},
		{"sent_at", format_rfc3339(sent_at)},
	};
	std::lock_guard lock(mutex_);
	std::ofstream out(path_, std::ios::app);
	out << line.dump() << '\n';
	out.flush();
	if (!out) {
		throw Error(ErrorCode::Io, "cannot append to " + path_.string());
	}
}

std::optional<SmtpSettings> SmtpSettings::from_env() {
	auto env = [](const char *name) -> std::string {
		const char *v = std::getenv(name);
		return v ? v : "";
	};
	SmtpSettings s;
	s.url = env("PASSDCC_SMTP_URL");
	if (s.url.empty()) {
		return std::nullopt;
	}
	s.username = env("PASSDCC_SMTP_USER");
	s.password = env("PASSDCC_SMTP_PASSWORD");
	s.from = env("PASSDCC_SMTP_FROM");
	if (s.from.empty()) {
		s.from = "pass-dcc@localhost";
	}
	s.require_tls = env("PASSDCC_SMTP_REQUIRE_TLS") != "0";
	return s;
}

SmtpTransport::SmtpTransport(SmtpSettings settings) :
	settings_(std::move(settings)) {
	static const bool initialized = [] {
		return curl_global_init(CURL_GLOBAL_DEFAULT) == CURLE_OK;
	}();
	if (!initialized) {
		throw Error(ErrorCode::Configuration, "libcurl initialization failed");
	}
	if (settings_.url.rfind("smtp://", 0) != 0 && settings_.url.rfind("smtps://", 0) != 0) {
		throw Error(ErrorCode::Configuration, "SMTP URL must start with smtp:// or smtps://");
	}
}

namespace {

std::string rfc5322_date(Timestamp t) {
	std::time_t secs = std::chrono::duration_cast<std::chrono::seconds>(t.time_since_epoch()).count();
	std::tm tm {};
	gmtime_r(&secs, &tm);
	char buf[64];
	std::strftime(buf, sizeof(buf), "%a, %d %b %Y %H:%M:%S +0000", &tm);
	return buf;
}

} // namespace

std::string SmtpTransport::render(const Notification &n, Timestamp sent_at) const {
	std::string body;
	body += "Date: " + rfc5322_date(sent_at) + "\r\n";
	body += "From: " + settings_.from + "\r\n";
	body += "To: " + n.recipient + "\r\n";
	body += "Message-ID: <" + n.notification_id.str() + "@pass-dcc>\r\n";
	body += "Subject: Enrollment submitted\r\n";
	body += "\r\n";
	body += "A patient at your site has submitted enrollment.\r\n";
	body += "Reference: " + n.patient_id.str() + "\r\n";
	body += "Sign in to the study portal to review the baseline data.\r\n";
	return body;
}

namespace {

struct Upload {
	const std::string *text;
	std::size_t offset {0};
};

std::size_t read_chunk(char *buffer, std::size_t size, std::size_t count, void *user) {
	auto *upload = static_cast<Upload *>(user);
	std::size_t room = size * count;
	std::size_t left = upload->text->size() - upload->offset;
	std::size_t n = std::min(room, left);
	std::memcpy(buffer, upload->text->data() + upload->offset, n);
	upload->offset += n;
	return n;
}

} // namespace

void SmtpTransport::send(const Notification &n, Timestamp sent_at) {
	std::string message = render(n, sent_at);
	Upload upload {&message};

	CURL *curl = curl_easy_init();
	if (!curl) {
		throw Error(ErrorCode::Io, "curl_easy_init failed");
	}
	curl_slist *recipients = curl_slist_append(nullptr, ("<" + n.recipient + ">").c_str());
	std::string from = "<" + settings_.from + ">";
	curl_easy_setopt(curl, CURLOPT_URL, settings_.url.c_str());
	if (!settings_.username.empty()) {
		curl_easy_setopt(curl, CURLOPT_USERNAME, settings_.username.c_str());
		curl_easy_setopt(curl, CURLOPT_PASSWORD, settings_.password.c_str());
	}
	if (settings_.require_tls) {
		curl_easy_setopt(curl, CURLOPT_USE_SSL, static_cast<long>(CURLUSESSL_ALL));
	}
	curl_easy_setopt(curl, CURLOPT_MAIL_FROM, from.c_str());
	curl_easy_setopt(curl, CURLOPT_MAIL_RCPT, recipients);
	curl_easy_setopt(curl, CURLOPT_READFUNCTION, read_chunk);
	curl_easy_setopt(curl, CURLOPT_READDATA, &upload);
	curl_easy_setopt(curl, CURLOPT_UPLOAD, 1L);
	curl_easy_setopt(curl, CURLOPT_TIMEOUT, 30L);
	curl_easy_setopt(curl, CURLOPT_NOSIGNAL, 1L);
	CURLcode rc = curl_easy_perform(curl);
	curl_slist_free_all(recipients);
	curl_easy_cleanup(curl);
	if (rc != CURLE_OK) {
		throw Error(ErrorCode::Io, std::string("SMTP delivery failed: ") + curl_easy_strerror(rc));
	}
}

} // namespace passdcc::notify
