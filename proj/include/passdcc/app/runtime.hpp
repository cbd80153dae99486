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

#include <memory>
#include <optional>
#include <string>

#include <passdcc/access/policy.hpp>
#include <passdcc/eligibility/rules.hpp>
#include <passdcc/model/forms.hpp>
#include <passdcc/security/crypto.hpp>
#include <passdcc/store/driver.hpp>
#include <passdcc/workflow/context.hpp>

namespace passdcc::app {

// Where configuration comes from when no flag names it: the
// PASSDCC_CONFIG_DIR environment variable, else the directory compiled in
// at build time.
std::string default_config_dir();

struct RuntimeOptions {
	std::string store_url;
	std::string rules_path;
	std::string capabilities_path;
	std::string forms_path;
	int hash_iterations {120000};
	workflow::ServiceOptions service {};

	// Fills empty fields from PASSDCC_STORE_URL, PASSDCC_EXPORT_SALT and
	// default_config_dir().
	void apply_defaults();
};

// Loaded configuration plus an open store: everything a ServiceContext
// refers to, with owned lifetimes.
class Runtime {
public:
	explicit Runtime(RuntimeOptions options);

	workflow::ServiceContext context();
	store::StoreDriver &store() {
		return *store_;
	}
	const RuntimeOptions &options() const {
		return options_;
	}

private:
	RuntimeOptions options_;
	eligibility::EligibilityConfig eligibility_;
	access::Policy policy_;
	FormCatalog forms_;
	SystemClock clock_;
	UlidGenerator ids_;
	security::PasswordHasher hasher_;
	std::unique_ptr<store::StoreDriver> store_;
};

} // namespace passdcc::app
