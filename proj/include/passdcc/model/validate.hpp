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

#include <string>
#include <vector>

#include <passdcc/model/forms.hpp>
#include <passdcc/model/types.hpp>

namespace passdcc {

struct Violation {
	std::string field;
	std::string rule;

	bool operator==(const Violation &) const = default;
};

using Violations = std::vector<Violation>;

// Each overload reports every invariant of the type that the value
// breaks. An empty result means the value is well formed. None of them
// throw on well-typed input.
Violations validate(const Site &site);
Violations validate(const CriterionInputs &inputs);
Violations validate(const EligibilityAssessment &assessment);
Violations validate(const CaseReportForm &form, const FormSchema &schema);
Violations validate(const BiospecimenRecord &specimen);
Violations validate(const UserAccount &account);
// Forms are checked against `catalog` when one is given.
Violations validate(const PatientRecord &record, const FormCatalog *catalog = nullptr);
Violations validate(const AuditEvent &event);
Violations validate(const Notification &notification);

nlohmann::json violations_json(const Violations &violations);

} // namespace passdcc
