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

#include "matrix.hpp"

#include <passdcc/model/codec.hpp>
#include <passdcc/workflow/machine.hpp>

namespace passdcc::fixture {

using workflow::Op;
using workflow::Outcome;

namespace {

struct Subject {
	PatientHandle handle;
	std::string username;
};

Subject prepare(World &w, const Cast &cast, WorkflowState state, int serial) {
	Subject s;
	s.username = "mx" + std::to_string(serial) + "." + cast.site.name;
	if (state == WorkflowState::Withdrawn) {
		s.handle = w.patient_in(cast, WorkflowState::EnrollmentInProgress, s.username);
		s.handle.record = w.enrollment.withdraw(cast.coordinator, s.handle.record.patient_id, "matrix");
	} else {
		s.handle = w.patient_in(cast, state, s.username);
	}
	if (state == WorkflowState::EnrollmentInProgress) {
		s.handle.record = w.fill_forms(cast.coordinator, s.handle.record.patient_id);
	}
	return s;
}

std::size_t transitions(World &w) {
	std::size_t n = 0;
	for (const auto &e : w.store->read_audit(1, std::nullopt)) {
		n += e.action == AuditAction::StateTransition;
	}
	return n;
}

} // namespace

MatrixReport run_workflow_matrix(World &w) {
	MatrixReport report;
	auto cast = w.cast("matrix");
	int serial = 0;

	const std::vector<Op> ops {
		Op::RecordConsultation,
		Op::PhysicianValidate,
		Op::IssueCredentials,
		Op::PatientFirstLogin,
		Op::WriteForm,
		Op::SubmitEnrollment,
		Op::Withdraw,
		Op::RegisterSpecimen,
	};

	// Registration is the only operation without a source state.
	for (auto [inputs, expected] : {std::pair {eligible_inputs(), WorkflowState::SelfScreened}, std::pair {ineligible_inputs(), WorkflowState::Ineligible}}) {
		++report.cells;
		auto record = w.enrollment.register_prospect(cast.coordinator, cast.site.site_id, inputs);
		if (record.workflow_state == expected && workflow::find_transition(std::nullopt, Op::RegisterProspect, expected == WorkflowState::Ineligible ? Outcome::Ineligible : Outcome::Eligible)) {
			++report.allowed;
		} else {
			report.problems.push_back("register_prospect produced " + std::string(to_string(record.workflow_state)));
		}
	}

	for (auto state : all_values<WorkflowState>()) {
		for (auto op : ops) {
			++report.cells;
			auto subject = prepare(w, cast, state, ++serial);
			const auto id = subject.handle.record.patient_id;
			auto before = *w.store->get_patient(id);
			auto audit_before = transitions(w);
			auto outcome = op == Op::PhysicianValidate ? Outcome::Eligible : Outcome::Default;
			const auto *row = workflow::find_transition(state, op, outcome);
			std::string cell = std::string(to_string(state)) + " x " + std::string(to_string(op));

			std::optional<ErrorCode> error;
			try {
				switch (op) {
				case Op::RecordConsultation:
					w.enrollment.record_consultation(cast.coordinator, id);
					break;
				case Op::PhysicianValidate:
					w.enrollment.physician_validate(cast.investigator, id, eligible_inputs());
					break;
				case Op::IssueCredentials:
					w.enrollment.issue_credentials(cast.coordinator, id, "fresh" + std::to_string(serial) + ".matrix");
					break;
				case Op::PatientFirstLogin: {
					auto account = w.store->get_account_by_username(subject.username);
					if (!account) {
						throw Error(ErrorCode::Precondition, "no patient account in this state");
					}
					// A fresh temporary password lets the first login be
					// attempted from every state that has an account.
					auto temp = w.admin.reset_password(w.root, subject.username).temporary_password;
					w.enrollment.patient_first_login(subject.username, temp, "Rotated-Passw0rd");
					break;
				}
				case Op::WriteForm:
					w.enrollment.write_form(cast.coordinator, id, FormName::Dre, {{"finding", "NON_PALPABLE"}});
					break;
				case Op::SubmitEnrollment: {
					auto account = subject.handle.account ? w.fresh(*subject.handle.account) : cast.coordinator;
					account.must_change_password = false;
					w.enrollment.submit_enrollment(account, id);
					break;
				}
				case Op::Withdraw:
					w.enrollment.withdraw(cast.coordinator, id, "matrix");
					break;
				case Op::RegisterSpecimen:
					w.enrollment.register_specimen(cast.coordinator, id, SpecimenKind::Urine);
					break;
				default:
					break;
				}
			} catch (const Error &e) {
				error = e.code();
			}

			auto after = *w.store->get_patient(id);
			if (row) {
				if (error) {
					report.problems.push_back(cell + ": whitelisted but failed with " + std::string(to_string(*error)));
				} else if (after.workflow_state != row->to) {
					report.problems.push_back(cell + ": reached " + std::string(to_string(after.workflow_state)));
				} else {
					++report.allowed;
				}
			} else {
				if (!error) {
					report.problems.push_back(cell + ": not whitelisted but succeeded");
				} else if (!(after == before) || transitions(w) != audit_before) {
					report.problems.push_back(cell + ": rejected but record or audit changed");
				} else {
					++report.rejected;
				}
			}
		}
	}
	return report;
}

} // namespace passdcc::fixture
