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
#include <string_view>

#include <json.hpp>

#include <passdcc/model/forms.hpp>
#include <passdcc/model/types.hpp>

namespace passdcc::access {

// Research export view of one patient. Drops account links, assessor and
// collector ids, free-text fields and notes; replaces the patient id with
// a salted digest; coarsens every timestamp and date field to "YYYY-MM".
nlohmann::json deidentify(const PatientRecord &record, const FormCatalog &catalog, std::string_view salt);

std::string pseudonym(const PatientId &patient, std::string_view salt);

} // namespace passdcc::access
