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

#include <passdcc/app/runtime.hpp>

#include <cstdlib>
#include <filesystem>

#include <passdcc/model/error.hpp>

#ifndef PASSDCC_CONFIG_DIR
#define PASSDCC_CONFIG_DIR "config"
#endif

namespace passdcc::app {

std::string default_config_dir() {
	if (const char *dir = std::getenv("PASSDCC_CONFIG_DIR"); dir && *dir) {
		return dir;
	}
	return PASSDCC_CONFIG_DIR;
}

void RuntimeOptions::apply_defaults() {
	auto dir = std::filesystem::path(default_config_dir());
	if (store_url.empty()) {
		if (const char *url = std::getenv("PASSDCC_STORE_URL"); url && *url) {
			store_url = url;
		}
	}
	if (store_url.empty()) {
		throw Error(ErrorCode::Configuration, "no store configured: pass --store or set PASSDCC_STORE_URL");
	}
	if (rules_path.empty()) {
		rules_path = (dir / "eligibility.default.json").string();
	}
	if (capabilities_path.empty()) {
		capabilities_path = (dir / "capabilities.default.json").string();
	}
	if (forms_path.empty()) {
		forms_path = (dir / "forms.default.json").string();
	}
	if (service.export_salt.empty()) {
		if (const char *salt = std::getenv("PASSDCC_EXPORT_SALT"); salt && *salt) {
			service.export_salt = salt;
		} else {
			service.export_salt = security::random_token(16);
		}
	}
}

Runtime::Runtime(RuntimeOptions options) :
	options_([&] {
		options.apply_defaults();
		return std::move(options);
	}()),
	eligibility_(eligibility::load_config_file(options_.rules_path)),
	policy_(access::CapabilityMatrix::load_file(options_.capabilities_path)),
	forms_(FormCatalog::load_file(options_.forms_path)),
	ids_(clock_),
	hasher_(options_.hash_iterations),
	store_(store::open_store(options_.store_url)) {
}

workflow::ServiceContext Runtime::context() {
	return workflow::ServiceContext {*store_, policy_, eligibility_, forms_, clock_, ids_, hasher_, options_.service};
}

} // namespace passdcc::app
