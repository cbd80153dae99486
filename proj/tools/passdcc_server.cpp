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

#include <csignal>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include <passdcc/api/portal.hpp>
#include <passdcc/api/server.hpp>
#include <passdcc/app/runtime.hpp>
#include <passdcc/model/codec.hpp>
#include <passdcc/notify/transport.hpp>

namespace {

volatile std::sig_atomic_t g_stop = 0;

void on_signal(int) {
	g_stop = 1;
}

} // namespace

int main(int argc, char **argv) {
	using namespace passdcc;

	app::RuntimeOptions runtime;
	api::ServerOptions server;
	api::PortalOptions portal;
	std::string notify_log = "passdcc-notifications.jsonl";
	int session_minutes = 30;
	int drain_seconds = 5;

	CLI::App cli {"pass-dcc portal API server"};
	cli.add_option("--host", server.host, "Listen address")->capture_default_str();
	cli.add_option("--port", server.port, "Listen port")->capture_default_str();
	cli.add_option("--store", runtime.store_url, "Store URL (default: PASSDCC_STORE_URL)");
	cli.add_option("--rules", runtime.rules_path, "Eligibility rule set");
	cli.add_option("--capabilities", runtime.capabilities_path, "Capability matrix");
	cli.add_option("--forms", runtime.forms_path, "Form schemas");
	cli.add_option("--session-ttl-minutes", session_minutes, "Idle session expiry")->check(CLI::PositiveNumber)->capture_default_str();
	cli.add_option("--notify-log", notify_log, "Log-sink file used when PASSDCC_SMTP_URL is unset")->capture_default_str();
	cli.add_option("--drain-seconds", drain_seconds, "Outbox drain period")->check(CLI::PositiveNumber)->capture_default_str();
	cli.add_flag("--allow-insecure-local", server.allow_insecure_local, "Serve plaintext HTTP on a loopback address");
	cli.add_flag("--behind-tls-proxy", server.behind_tls_proxy, "TLS is terminated by a reverse proxy in front of this service");
	CLI11_PARSE(cli, argc, argv);

	try {
		api::check_listen_policy(server);
		portal.session_ttl = std::chrono::minutes(session_minutes);
		server.drain_interval = std::chrono::seconds(drain_seconds);

		app::Runtime rt(runtime);
		std::unique_ptr<notify::Transport> transport;
		if (auto smtp = notify::SmtpSettings::from_env()) {
			transport = std::make_unique<notify::SmtpTransport>(*smtp);
		} else {
			transport = std::make_unique<notify::LogSinkTransport>(notify_log);
		}
		api::Portal api(rt.context(), transport.get(), portal);
		api::HttpServer http(api, server);
		std::signal(SIGINT, on_signal);
		std::signal(SIGTERM, on_signal);
		int port = http.start();
		std::cerr << json {{"event", "listening"}, {"host", server.host}, {"port", port}, {"store", rt.store().kind()}, {"transport", transport->name()}}.dump()
				  << std::endl;
		while (!g_stop) {
			std::this_thread::sleep_for(std::chrono::milliseconds(100));
		}
		http.stop();
		rt.store().close();
	} catch (const Error &e) {
		std::cerr << json {{"error", to_string(e.code())}, {"message", e.what()}}.dump() << std::endl;
		return 1;
	}
	return 0;
}
