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

#include <passdcc/api/server.hpp>

#include <algorithm>
#include <cctype>

#include <httplib.h>

#include <passdcc/model/error.hpp>

namespace passdcc::api {

bool is_loopback(const std::string &host) {
	return host == "127.0.0.1" || host == "::1" || host == "localhost" || host.rfind("127.", 0) == 0;
}

void check_listen_policy(const ServerOptions &options) {
	if (options.behind_tls_proxy) {
		return;
	}
	if (!options.allow_insecure_local) {
		throw Error(
			ErrorCode::Configuration,
			"refusing to serve plaintext HTTP: pass --behind-tls-proxy when TLS terminates at a reverse proxy, "
			"or --allow-insecure-local for a loopback-only development server");
	}
	if (!is_loopback(options.host)) {
		throw Error(ErrorCode::Configuration, "--allow-insecure-local only binds loopback addresses, not " + options.host);
	}
}

HttpServer::HttpServer(Portal &portal, ServerOptions options) :
	portal_(portal), options_(std::move(options)), server_(std::make_unique<httplib::Server>()) {
	check_listen_policy(options_);
	install();
}

HttpServer::~HttpServer() {
	stop();
}

void HttpServer::install() {
	auto handler = [this](const httplib::Request &in, httplib::Response &out) {
		Request request;
		request.method = in.method;
		request.path = in.path;
		for (const auto &[k, v] : in.params) {
			request.query.emplace(k, v);
		}
		for (const auto &[k, v] : in.headers) {
			std::string key = k;
			std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) { return std::tolower(c); });
			request.headers[key] = v;
		}
		request.body = in.body;
		request.remote_addr = in.remote_addr;

		Response response = portal_.handle(request);
		out.status = response.status;
		for (const auto &[k, v] : response.headers) {
			out.set_header(k, v);
		}
		out.set_content(response.body.is_null() ? "" : response.body.dump(), "application/json");
	};
	server_->Get(".*", handler);
	server_->Post(".*", handler);
	server_->Put(".*", handler);
	server_->Delete(".*", handler);
	server_->Patch(".*", handler);
	server_->set_payload_max_length(1 << 20);
}

int HttpServer::start() {
	if (options_.port == 0) {
		port_ = server_->bind_to_any_port(options_.host);
	} else {
		port_ = server_->bind_to_port(options_.host, options_.port) ? options_.port : -1;
	}
	if (port_ < 0) {
		throw Error(ErrorCode::Io, "cannot bind " + options_.host + ":" + std::to_string(options_.port));
	}
	listener_ = std::thread([this] { server_->listen_after_bind(); });
	drainer_ = std::thread([this] {
		auto next = std::chrono::steady_clock::now();
		while (!stopping_) {
			if (std::chrono::steady_clock::now() >= next) {
				try {
					portal_.drain_notifications();
				} catch (const std::exception &) {
					// Retried on the next tick.
				}
				next = std::chrono::steady_clock::now() + options_.drain_interval;
			}
			std::this_thread::sleep_for(std::chrono::milliseconds(50));
		}
	});
	server_->wait_until_ready();
	return port_;
}

void HttpServer::run() {
	if (!listener_.joinable()) {
		start();
	}
	listener_.join();
	stop();
}

void HttpServer::stop() {
	stopping_ = true;
	if (server_) {
		server_->stop();
	}
	if (listener_.joinable()) {
		listener_.join();
	}
	if (drainer_.joinable()) {
		drainer_.join();
	}
}

} // namespace passdcc::api
