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

#include <passdcc/workflow/service.hpp>

#include <algorithm>
#include <regex>

#include <passdcc/eligibility/engine.hpp>
#include <passdcc/model/codec.hpp>
#include <passdcc/model/validate.hpp>
#include <passdcc/notify/outbox.hpp>

namespace passdcc::workflow {

using access::Action;
using access::Subject;

namespace {

bool valid_username(const std::string &username) {
	static const std::regex pattern("[A-Za-z0-9][A-Za-z0-9._@-]{2,63}");
	return std::regex_match(username, pattern);
}

Error validation_error(const std::string &message, const Violations &violations) {
	return Error(ErrorCode::Validation, message, {{"violations", violations_json(violations)}});
}

} // namespace

EnrollmentService::EnrollmentService(ServiceContext ctx) :
	ctx_(std::move(ctx)) {
}

PatientRecord EnrollmentService::load(const PatientId &patient) const {
	auto record = ctx_.store.get_patient(patient);
	if (!record) {
		throw Error(ErrorCode::NotFound, "patient not found", {{"patient_id", patient.str()}});
	}
	return *record;
}

void EnrollmentService::check_version(const PatientRecord &record, const std::optional<std::int64_t> &expected) const {
	if (expected && *expected != record.state_version) {
		throw Error(
			ErrorCode::Conflict,
			"patient " + record.patient_id.str() + " is at version " + std::to_string(record.state_version),
			{{"entity", "patient"}, {"id", record.patient_id.str()}, {"expected", *expected}, {"actual", record.state_version}});
	}
}

void EnrollmentService::check_role(const UserAccount &actor, const std::optional<WorkflowState> &from, Op op, Outcome outcome) const {
	const auto *t = find_transition(from, op, outcome);
	if (t && !role_may(actor.role, *t)) {
		throw Error(
			ErrorCode::Authorization,
			std::string(to_string(actor.role)) + " may not perform " + std::string(to_string(op)),
			{{"reason", access::reason::kNotPermitted}, {"action", to_string(op)}, {"subject", "patient"}});
	}
}

EligibilityAssessment EnrollmentService::assess(const CriterionInputs &inputs, AssessmentKind kind, std::optional<AccountId> assessor) {
	auto violations = validate(inputs);
	if (!violations.empty()) {
		throw validation_error("invalid criterion inputs", violations);
	}
	return eligibility::evaluate(
		inputs,
		ctx_.eligibility.rules_for(kind),
		kind,
		std::move(assessor),
		{ctx_.ids.make<AssessmentId>(), ctx_.clock.now()});
}

AuditEvent EnrollmentService::transition_event(const UserAccount &actor, std::optional<WorkflowState> from, const PatientRecord &after, Op op) const {
	return ctx_.event(
		actor_id(actor),
		AuditAction::StateTransition,
		AuditSubject::patient(after.patient_id),
		{
			{"from", from ? json(to_string(*from)) : json(nullptr)},
			{"to", to_string(after.workflow_state)},
			{"op", to_string(op)},
			{"state_version", after.state_version},
		});
}

SelfCheckResult EnrollmentService::self_check(const CriterionInputs &inputs) {
	SelfCheckResult out;
	out.assessment = assess(inputs, AssessmentKind::SelfScreen, std::nullopt);
	out.failed = eligibility::failed_rules(out.assessment, ctx_.eligibility.self_screen);
	out.next_steps = ctx_.eligibility.next_steps.for_overall(out.assessment.overall);
	ctx_.store.append_audit({ctx_.event(
		std::string(kAnonymousActor),
		AuditAction::SelfCheck,
		{},
		{{"overall", to_string(out.assessment.overall)}, {"ruleset_version", out.assessment.ruleset_version}})});
	return out;
}

PatientRecord EnrollmentService::register_prospect(
	const UserAccount &actor,
	const SiteId &site_id,
	const CriterionInputs &self_screen,
	AssessmentKind kind) {
	ctx_.require(actor, Action::RegisterProspect, Subject::of_site(site_id), AuditSubject::site(site_id));
	if (kind != AssessmentKind::SelfScreen) {
		throw Error(ErrorCode::Precondition, "registration takes a SELF_SCREEN assessment");
	}
	auto site = ctx_.store.get_site(site_id);
	if (!site) {
		throw Error(ErrorCode::NotFound, "site not found", {{"site_id", site_id.str()}});
	}
	if (!site->active) {
		throw Error(ErrorCode::Precondition, "site " + site_id.str() + " is deactivated");
	}
	auto assessment = assess(self_screen, AssessmentKind::SelfScreen, std::nullopt);
	auto outcome = assessment.overall == Overall::Eligible ? Outcome::Eligible : Outcome::Ineligible;
	check_role(actor, std::nullopt, Op::RegisterProspect, outcome);

	auto now = ctx_.clock.now();
	PatientRecord record;
	record.patient_id = ctx_.ids.make<PatientId>();
	record.site_id = site_id;
	record.workflow_state = next_state(std::nullopt, Op::RegisterProspect, outcome);
	record.created_at = now;
	record.updated_at = now;
	record.assessments.push_back(std::move(assessment));
	for (const auto &[name, _] : ctx_.forms.schemas()) {
		CaseReportForm form;
		form.form_name = name;
		form.status = FormStatus::Empty;
		record.forms.emplace(name, std::move(form));
	}
	record.state_version = 1;
	return ctx_.store.put_patient_cas(record, 0, {transition_event(actor, std::nullopt, record, Op::RegisterProspect)});
}

PatientRecord EnrollmentService::record_consultation(const UserAccount &actor, const PatientId &patient, std::optional<std::int64_t> expected) {
	return ctx_.retrying(expected, [&] {
		auto record = load(patient);
		ctx_.require(actor, Action::RecordConsultation, Subject::of_patient(record), AuditSubject::patient(patient));
		check_version(record, expected);
		auto from = record.workflow_state;
		auto to = next_state(from, Op::RecordConsultation);
		check_role(actor, from, Op::RecordConsultation, Outcome::Default);
		auto version = record.state_version;
		record.workflow_state = to;
		record.updated_at = ctx_.clock.now();
		record.state_version = version + 1;
		return ctx_.store.put_patient_cas(record, version, {transition_event(actor, from, record, Op::RecordConsultation)});
	});
}

PatientRecord EnrollmentService::physician_validate(
	const UserAccount &actor,
	const PatientId &patient,
	const CriterionInputs &inputs,
	AssessmentKind kind,
	std::optional<std::int64_t> expected) {
	return ctx_.retrying(expected, [&] {
		auto record = load(patient);
		ctx_.require(actor, Action::PhysicianValidate, Subject::of_patient(record), AuditSubject::patient(patient));
		check_version(record, expected);
		if (kind != AssessmentKind::PhysicianValidation) {
			throw Error(ErrorCode::Precondition, "physician validation takes a PHYSICIAN_VALIDATION assessment");
		}
		auto from = record.workflow_state;
		auto sources = allowed_sources(Op::PhysicianValidate);
		if (std::find(sources.begin(), sources.end(), from) == sources.end()) {
			next_state(from, Op::PhysicianValidate);  // throws the transition error
		}
		auto assessment = assess(inputs, AssessmentKind::PhysicianValidation, actor.account_id);
		auto outcome = assessment.overall == Overall::Eligible ? Outcome::Eligible : Outcome::Ineligible;
		check_role(actor, from, Op::PhysicianValidate, outcome);
		auto version = record.state_version;
		record.workflow_state = next_state(from, Op::PhysicianValidate, outcome);
		record.assessments.push_back(std::move(assessment));
		record.updated_at = ctx_.clock.now();
		record.state_version = version + 1;
		return ctx_.store.put_patient_cas(record, version, {transition_event(actor, from, record, Op::PhysicianValidate)});
	});
}

IssuedCredentials EnrollmentService::issue_credentials(
	const UserAccount &actor,
	const PatientId &patient,
	const std::string &username,
	std::optional<std::int64_t> expected) {
	return ctx_.retrying(expected, [&] {
		auto record = load(patient);
		ctx_.require(actor, Action::IssueCredentials, Subject::of_patient(record), AuditSubject::patient(patient));
		check_version(record, expected);
		auto from = record.workflow_state;
		auto to = next_state(from, Op::IssueCredentials);
		check_role(actor, from, Op::IssueCredentials, Outcome::Default);
		if (!valid_username(username)) {
			throw validation_error("invalid username", {{"username", "3-64 characters from [A-Za-z0-9._@-]"}});
		}
		if (ctx_.store.get_account_by_username(username)) {
			throw Error(ErrorCode::Conflict, "username '" + username + "' is already taken", {{"entity", "account"}, {"username", username}});
		}

		IssuedCredentials out;
		out.temporary_password = security::random_password();
		auto &account = out.account;
		account.account_id = ctx_.ids.make<AccountId>();
		account.username = username;
		account.password_hash = ctx_.hasher.hash(out.temporary_password);
		account.must_change_password = true;
		account.role = Role::Patient;
		account.site_id = record.site_id;
		account.patient_id = record.patient_id;
		account.revision = 1;

		auto version = record.state_version;
		record.workflow_state = to;
		record.account_id = account.account_id;
		record.updated_at = ctx_.clock.now();
		record.state_version = version + 1;

		store::WriteBatch batch;
		batch.patients.push_back({record, version});
		batch.accounts.push_back({account, 0});
		batch.audit.push_back(transition_event(actor, from, record, Op::IssueCredentials));
		batch.audit.push_back(ctx_.event(
			actor_id(actor),
			AuditAction::CredentialIssued,
			AuditSubject::patient(patient),
			{{"account_id", account.account_id.str()}, {"username", username}}));
		ctx_.store.commit(batch);
		out.record = record;
		return out;
	});
}

void EnrollmentService::login_failed(UserAccount account, const std::string &why) {
	for (int attempt = 0;; ++attempt) {
		auto version = account.revision;
		account.failed_logins += 1;
		bool locking = !account.disabled && account.failed_logins >= ctx_.options.lockout_threshold;
		if (locking) {
			account.disabled = true;
		}
		store::WriteBatch batch;
		batch.accounts.push_back({account, version});
		batch.audit.push_back(ctx_.event(
			std::string(kAnonymousActor),
			AuditAction::LoginFailed,
			AuditSubject::account(account.account_id),
			{{"reason", why}, {"failed_logins", account.failed_logins}, {"locked", account.disabled}}));
		try {
			ctx_.store.commit(batch);
		} catch (const Error &e) {
			if (!is_cas_conflict(e) || attempt >= ctx_.options.conflict_retries) {
				throw;
			}
			auto fresh = ctx_.store.get_account(account.account_id);
			if (!fresh) {
				throw;
			}
			account = *fresh;
			continue;
		}
		if (account.disabled) {
			throw Error(ErrorCode::Locked, "account is locked", {{"failed_logins", account.failed_logins}});
		}
		throw Error(ErrorCode::AuthFailure, "invalid username or password");
	}
}

UserAccount EnrollmentService::authenticate(const std::string &username, const std::string &password) {
	auto account = ctx_.store.get_account_by_username(username);
	if (!account) {
		// Same cost as a real check so timing does not reveal usernames.
		static const std::string decoy = ctx_.hasher.hash("decoy-password-0");
		ctx_.hasher.verify(password, decoy);
		ctx_.store.append_audit({ctx_.event(std::string(kAnonymousActor), AuditAction::LoginFailed, {}, {{"reason", "unknown_user"}})});
		throw Error(ErrorCode::AuthFailure, "invalid username or password");
	}
	if (account->disabled) {
		ctx_.store.append_audit({ctx_.event(
			std::string(kAnonymousActor),
			AuditAction::LoginFailed,
			AuditSubject::account(account->account_id),
			{{"reason", "locked"}})});
		throw Error(ErrorCode::Locked, "account is locked");
	}
	if (!ctx_.hasher.verify(password, account->password_hash)) {
		login_failed(*account, "bad_password");
	}
	store::WriteBatch batch;
	if (account->failed_logins != 0) {
		auto version = account->revision;
		account->failed_logins = 0;
		account->revision = version + 1;
		batch.accounts.push_back({*account, version});
	}
	batch.audit.push_back(ctx_.event(actor_id(*account), AuditAction::Login, AuditSubject::account(account->account_id)));
	ctx_.store.commit(batch);
	return *account;
}

UserAccount EnrollmentService::change_password(const AccountId &account_id, const std::string &current, const std::string &replacement) {
	return ctx_.retrying(std::nullopt, [&] {
		auto account = ctx_.store.get_account(account_id);
		if (!account) {
			throw Error(ErrorCode::NotFound, "account not found");
		}
		if (account->disabled) {
			throw Error(ErrorCode::Locked, "account is locked");
		}
		if (!ctx_.hasher.verify(current, account->password_hash)) {
			login_failed(*account, "bad_current_password");
		}
		if (auto problem = security::check_password_policy(replacement)) {
			throw validation_error("new password rejected", {{"new_password", *problem}});
		}
		if (replacement == current) {
			throw validation_error("new password rejected", {{"new_password", "must differ from the current password"}});
		}

		auto version = account->revision;
		account->password_hash = ctx_.hasher.hash(replacement);
		account->must_change_password = false;
		account->failed_logins = 0;
		account->revision = version + 1;

		store::WriteBatch batch;
		batch.accounts.push_back({*account, version});
		batch.audit.push_back(ctx_.event(actor_id(*account), AuditAction::PasswordChanged, AuditSubject::account(account_id)));
		if (account->role == Role::Patient && account->patient_id) {
			auto record = ctx_.store.get_patient(*account->patient_id);
			if (record && record->workflow_state == WorkflowState::Credentialed) {
				auto from = record->workflow_state;
				auto pv = record->state_version;
				record->workflow_state = next_state(from, Op::PatientFirstLogin);
				record->updated_at = ctx_.clock.now();
				record->state_version = pv + 1;
				batch.patients.push_back({*record, pv});
				batch.audit.push_back(transition_event(*account, from, *record, Op::PatientFirstLogin));
			}
		}
		ctx_.store.commit(batch);
		return *account;
	});
}

UserAccount EnrollmentService::patient_first_login(const std::string &username, const std::string &temporary, const std::string &replacement) {
	auto account = authenticate(username, temporary);
	if (!account.must_change_password) {
		throw Error(ErrorCode::Precondition, "the temporary password was already rotated");
	}
	if (account.role == Role::Patient && account.patient_id) {
		// First login is a workflow step of its own; later rotations go
		// through change_password with a session.
		next_state(load(*account.patient_id).workflow_state, Op::PatientFirstLogin);
	}
	return change_password(account.account_id, temporary, replacement);
}

FormWriteResult EnrollmentService::write_form(
	const UserAccount &actor,
	const PatientId &patient,
	FormName form_name,
	const nlohmann::json &fields,
	std::optional<std::int64_t> expected) {
	return ctx_.retrying(expected, [&] {
		auto record = load(patient);
		ctx_.require(actor, Action::WriteForm, Subject::of_patient(record), AuditSubject::patient(patient));
		check_version(record, expected);
		auto from = record.workflow_state;
		next_state(from, Op::WriteForm);
		check_role(actor, from, Op::WriteForm, Outcome::Default);
		if (!fields.is_object()) {
			throw validation_error("fields must be a JSON object", {{"fields", "object expected"}});
		}

		const auto &schema = ctx_.forms.schema(form_name);
		auto &form = record.forms[form_name];
		form.form_name = form_name;
		Violations violations;
		std::vector<std::string> changed;
		for (const auto &[name, value] : fields.items()) {
			const auto *spec = schema.find(name);
			if (!spec) {
				violations.push_back({name, "unknown field"});
				continue;
			}
			if (value.is_null()) {
				if (form.fields.erase(name) > 0) {
					changed.push_back(name);
				}
				continue;
			}
			auto coerced = coerce_field(*spec, value);
			if (!coerced) {
				violations.push_back({name, std::string("expected ") + std::string(to_string(spec->type))});
				continue;
			}
			if (auto problem = check_field(*spec, *coerced)) {
				violations.push_back({name, *problem});
				continue;
			}
			auto &slot = form.fields[name];
			if (slot != *coerced) {
				changed.push_back(name);
			}
			slot = *coerced;
		}
		if (!violations.empty()) {
			throw validation_error("form " + std::string(to_string(form_name)) + " rejected", violations);
		}
		auto now = ctx_.clock.now();
		form.status = compute_status(form.fields, schema);
		form.last_edited_by = actor.account_id;
		form.last_edited_at = now;

		auto version = record.state_version;
		record.updated_at = now;
		record.state_version = version + 1;
		auto stored = ctx_.store.put_patient_cas(
			record,
			version,
			{ctx_.event(
				actor_id(actor),
				AuditAction::FormWrite,
				AuditSubject::patient(patient),
				{{"form", to_string(form_name)}, {"fields", changed}, {"status", to_string(form.status)}})});
		return FormWriteResult {stored.forms.at(form_name), stored.state_version};
	});
}

PatientRecord EnrollmentService::submit_enrollment(const UserAccount &actor, const PatientId &patient, std::optional<std::int64_t> expected) {
	return ctx_.retrying(expected, [&] {
		auto record = load(patient);
		ctx_.require(actor, Action::SubmitEnrollment, Subject::of_patient(record), AuditSubject::patient(patient));
		check_version(record, expected);
		auto from = record.workflow_state;
		auto to = next_state(from, Op::SubmitEnrollment);
		check_role(actor, from, Op::SubmitEnrollment, Outcome::Default);

		json incomplete = json::array();
		for (const auto &[name, _] : ctx_.forms.schemas()) {
			auto it = record.forms.find(name);
			if (it == record.forms.end() || it->second.status != FormStatus::Complete) {
				incomplete.push_back(to_string(name));
			}
		}
		if (!incomplete.empty()) {
			throw Error(ErrorCode::Submission, "incomplete forms: " + incomplete.dump(), {{"incomplete_forms", incomplete}});
		}
		auto site = ctx_.store.get_site(record.site_id);
		if (!site) {
			throw Error(ErrorCode::Precondition, "owning site is missing");
		}

		auto now = ctx_.clock.now();
		auto version = record.state_version;
		record.workflow_state = to;
		record.baseline = BaselineSnapshot {now, record.forms};
		record.updated_at = now;
		record.state_version = version + 1;

		store::WriteBatch batch;
		batch.patients.push_back({record, version});
		batch.audit.push_back(transition_event(actor, from, record, Op::SubmitEnrollment));
		notify::enqueue(batch, ctx_.store, patient, site->contact_email, NotificationTemplate::EnrollmentSubmitted, ctx_.ids, now);
		ctx_.store.commit(batch);
		return record;
	});
}

PatientRecord EnrollmentService::withdraw(
	const UserAccount &actor,
	const PatientId &patient,
	const std::string &reason,
	std::optional<std::int64_t> expected) {
	return ctx_.retrying(expected, [&] {
		auto record = load(patient);
		ctx_.require(actor, Action::Withdraw, Subject::of_patient(record), AuditSubject::patient(patient));
		check_version(record, expected);
		auto from = record.workflow_state;
		auto to = next_state(from, Op::Withdraw);
		check_role(actor, from, Op::Withdraw, Outcome::Default);
		if (reason.find_first_not_of(" \t\r\n") == std::string::npos) {
			throw validation_error("withdrawal needs a reason", {{"reason", "required"}});
		}
		auto version = record.state_version;
		record.workflow_state = to;
		record.updated_at = ctx_.clock.now();
		record.state_version = version + 1;
		auto event = transition_event(actor, from, record, Op::Withdraw);
		event.detail["reason"] = reason;
		return ctx_.store.put_patient_cas(record, version, {event});
	});
}

BiospecimenRecord EnrollmentService::register_specimen(
	const UserAccount &actor,
	const PatientId &patient,
	SpecimenKind kind,
	std::optional<Timestamp> collected_at,
	std::optional<std::string> notes) {
	return ctx_.retrying(std::nullopt, [&] {
		auto record = load(patient);
		ctx_.require(actor, Action::RegisterSpecimen, Subject::of_patient(record), AuditSubject::patient(patient));
		auto from = record.workflow_state;
		next_state(from, Op::RegisterSpecimen);
		check_role(actor, from, Op::RegisterSpecimen, Outcome::Default);

		auto now = ctx_.clock.now();
		BiospecimenRecord specimen;
		specimen.specimen_id = ctx_.ids.make<SpecimenId>();
		specimen.patient_id = patient;
		specimen.kind = kind;
		specimen.collected_at = collected_at.value_or(now);
		specimen.collected_by = actor.account_id;
		specimen.notes = std::move(notes);
		auto problems = validate(specimen);
		if (!problems.empty()) {
			throw validation_error("invalid specimen", problems);
		}

		auto version = record.state_version;
		record.specimens.push_back(specimen);
		record.updated_at = now;
		record.state_version = version + 1;
		ctx_.store.put_patient_cas(
			record,
			version,
			{ctx_.event(
				actor_id(actor),
				AuditAction::SpecimenRegistered,
				AuditSubject::patient(patient),
				{{"specimen_id", specimen.specimen_id.str()}, {"kind", to_string(kind)}})});
		return specimen;
	});
}

PatientRecord EnrollmentService::read_patient(const UserAccount &actor, const PatientId &patient) {
	auto record = load(patient);
	auto decision = ctx_.require(actor, Action::ReadPatient, Subject::of_patient(record), AuditSubject::patient(patient));
	ctx_.store.append_audit({ctx_.event(
		actor_id(actor),
		AuditAction::Read,
		AuditSubject::patient(patient),
		{{"op", "read_patient"}, {"cross_site", decision.cross_site}})});
	return record;
}

std::vector<PatientRecord> EnrollmentService::list_patients(
	const UserAccount &actor,
	const std::optional<SiteId> &site,
	const std::optional<WorkflowState> &state) {
	Subject subject {site ? site : actor.site_id, std::nullopt};
	auto decision = ctx_.require(actor, Action::ListPatients, subject, site ? AuditSubject::site(*site) : AuditSubject {});
	store::PatientFilter filter {site, state};
	if (decision.scope != access::Scope::AllSites) {
		filter.site = actor.site_id;
	}
	auto rows = ctx_.store.list_patients(filter);
	std::erase_if(rows, [&](const PatientRecord &r) {
		return !ctx_.policy.authorize(actor, Action::ListPatients, Subject::of_patient(r)).allowed;
	});
	ctx_.store.append_audit({ctx_.event(
		actor_id(actor),
		AuditAction::Read,
		site ? AuditSubject::site(*site) : AuditSubject {},
		{{"op", "list_patients"}, {"count", rows.size()}, {"state", state ? json(to_string(*state)) : json(nullptr)}})});
	return rows;
}

std::map<PatientId, WorkflowState> replay_states(const std::vector<AuditEvent> &events) {
	std::map<PatientId, WorkflowState> out;
	for (const auto &e : events) {
		if (e.action != AuditAction::StateTransition || e.subject.type != SubjectType::Patient) {
			continue;
		}
		auto to = enum_from_string<WorkflowState>(e.detail.value("to", ""));
		if (!to) {
			throw Error(ErrorCode::Integrity, "STATE_TRANSITION event " + std::to_string(e.seq) + " has no target state");
		}
		out[PatientId {e.subject.id}] = *to;
	}
	return out;
}

} // namespace passdcc::workflow
