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

#include <regex>
#include <set>

#include <gtest/gtest.h>
#include <httplib.h>

#include <passdcc/api/server.hpp>
#include <passdcc/model/codec.hpp>

#include "api.hpp"
#include "world.hpp"

using namespace passdcc;
using namespace passdcc::api;
using nlohmann::json;

namespace {

// Forwards to a real driver and remembers every batch it committed.
class CountingDriver final : public store::StoreDriver {
public:
	explicit CountingDriver(std::unique_ptr<store::StoreDriver> inner) : inner_(std::move(inner)) {
	}

	std::string_view kind() const override {
		return inner_->kind();
	}
	store::CommitResult commit(const store::WriteBatch &batch) override {
		auto r = inner_->commit(batch);
		std::lock_guard lock(mutex_);
		batches_.push_back(batch);
		return r;
	}
	std::optional<PatientRecord> get_patient(const PatientId &id) const override {
		return inner_->get_patient(id);
	}
	std::vector<PatientRecord> list_patients(const store::PatientFilter &filter) const override {
		return inner_->list_patients(filter);
	}
	std::optional<UserAccount> get_account(const AccountId &id) const override {
		return inner_->get_account(id);
	}
	std::optional<UserAccount> get_account_by_username(std::string_view username) const override {
		return inner_->get_account_by_username(username);
	}
	std::vector<UserAccount> list_accounts() const override {
		return inner_->list_accounts();
	}
	std::optional<Site> get_site(const SiteId &id) const override {
		return inner_->get_site(id);
	}
	std::vector<Site> list_sites() const override {
		return inner_->list_sites();
	}
	std::optional<Notification> get_notification(const NotificationId &id) const override {
		return inner_->get_notification(id);
	}
	std::optional<Notification> find_notification(const PatientId &patient, NotificationTemplate tmpl) const override {
		return inner_->find_notification(patient, tmpl);
	}
	std::vector<Notification> list_notifications(std::optional<NotificationStatus> status) const override {
		return inner_->list_notifications(status);
	}
	std::vector<AuditEvent> read_audit(std::int64_t from_seq, std::optional<std::size_t> limit) const override {
		return inner_->read_audit(from_seq, limit);
	}
	std::int64_t last_seq() const override {
		return inner_->last_seq();
	}
	void import_state(const store::StoreState &state) override {
		inner_->import_state(state);
	}
	json health() const override {
		return inner_->health();
	}

	std::vector<store::WriteBatch> take() {
		std::lock_guard lock(mutex_);
		return std::exchange(batches_, {});
	}

private:
	std::unique_ptr<store::StoreDriver> inner_;
	std::mutex mutex_;
	std::vector<store::WriteBatch> batches_;
};

class ApiTest : public ::testing::Test {
protected:
	explicit ApiTest(PortalOptions options = {}) :
		portal_(w_.context(), &transport_, options),
		client_(portal_) {
		a_ = w_.cast("alpha");
		b_ = w_.cast("beta");
		coord_a_ = client_.login(a_.coordinator.username, fixture::kStaffPassword);
		coord_b_ = client_.login(b_.coordinator.username, fixture::kStaffPassword);
		root_ = client_.login(w_.root.username, fixture::kRootPassword);
	}

	std::size_t patients() {
		return w_.store->list_patients({}).size();
	}

	fixture::World w_;
	fixture::RecordingTransport transport_;
	Portal portal_;
	fixture::ApiClient client_;
	fixture::Cast a_;
	fixture::Cast b_;
	std::string coord_a_;
	std::string coord_b_;
	std::string root_;
};

json self_check_body() {
	return fixture::eligible_inputs();
}

} // namespace

TEST_F(ApiTest, SelfCheckAllPassing) {
	auto before = patients();
	auto r = client_.call("POST", "/api/v1/eligibility/self-check", self_check_body());
	ASSERT_EQ(r.status, 200) << fixture::describe(r);
	EXPECT_EQ(r.body["overall"], "ELIGIBLE");
	EXPECT_EQ(r.body["failed"], json::array());
	EXPECT_EQ(r.body["verdicts"].size(), 5u);
	EXPECT_EQ(patients(), before);
	auto last = w_.store->read_audit(w_.store->last_seq()).at(0);
	EXPECT_EQ(last.action, AuditAction::SelfCheck);
	EXPECT_EQ(last.actor, kAnonymousActor);
}

TEST_F(ApiTest, SelfCheckPalpable) {
	auto body = self_check_body();
	body["dre_palpable"] = true;
	auto r = client_.call("POST", "/api/v1/eligibility/self-check", body);
	ASSERT_EQ(r.status, 200);
	EXPECT_EQ(r.body["overall"], "INELIGIBLE");
	EXPECT_EQ(r.body["failed"], json::array({"non_palpable_dre"}));
}

TEST_F(ApiTest, SelfCheckMalformed) {
	auto r = client_.raw("POST", "/api/v1/eligibility/self-check", "{not json");
	EXPECT_EQ(r.status, 422);
	auto partial = client_.call("POST", "/api/v1/eligibility/self-check", {{"dre_palpable", "no"}, {"gleason_score", 6}});
	ASSERT_EQ(partial.status, 422);
	std::set<std::string> fields;
	for (const auto &v : partial.body["detail"]["violations"]) {
		fields.insert(v["field"]);
	}
	EXPECT_EQ(fields, (std::set<std::string> {"dre_palpable", "histology_aggressive", "positive_cores", "total_cores", "psa_ng_ml"}));
	auto range = self_check_body();
	range["positive_cores"] = 20;
	EXPECT_EQ(client_.call("POST", "/api/v1/eligibility/self-check", range).status, 422);
	auto extra = self_check_body();
	extra["favourite_colour"] = "blue";
	EXPECT_EQ(client_.call("POST", "/api/v1/eligibility/self-check", extra).status, 422);
}

TEST_F(ApiTest, TemporaryPasswordOpensOnlyRotation) {
	auto issued = client_.call("POST", "/api/v1/users", {{"username", "alpha.newcoord"}, {"role", "COORDINATOR"}, {"site_id", a_.site.site_id}}, root_);
	ASSERT_EQ(issued.status, 201) << fixture::describe(issued);
	std::string temp = issued.body["temporary_password"];
	auto login = client_.call("POST", "/api/v1/auth/login", {{"username", "alpha.newcoord"}, {"password", temp}});
	ASSERT_EQ(login.status, 200);
	EXPECT_EQ(login.body["must_change_password"], true);
	std::string token = login.body["token"];

	EXPECT_EQ(client_.call("GET", "/api/v1/me", nullptr, token).status, 200);
	for (const auto &path : {"/api/v1/patients", "/api/v1/sites", "/api/v1/export"}) {
		auto r = client_.call("GET", path, nullptr, token);
		EXPECT_EQ(r.status, 403) << path;
		EXPECT_EQ(r.body["detail"]["reason"], "password_change_required");
	}
	EXPECT_EQ(client_.call("POST", "/api/v1/patients", {{"site_id", a_.site.site_id}, {"self_screen", self_check_body()}}, token).status, 403);

	auto rotated = client_.call("POST", "/api/v1/auth/password", {{"current_password", temp}, {"new_password", "Rotated-Passw0rd"}}, token);
	ASSERT_EQ(rotated.status, 200) << fixture::describe(rotated);
	EXPECT_EQ(rotated.body["must_change_password"], false);
	EXPECT_EQ(client_.call("GET", "/api/v1/patients", nullptr, token).status, 200);
	EXPECT_EQ(client_.call("POST", "/api/v1/auth/login", {{"username", "alpha.newcoord"}, {"password", temp}}).status, 401);
}

TEST_F(ApiTest, FifthBadLoginLocks) {
	auto bad = json {{"username", a_.investigator.username}, {"password", "not-the-password-1"}};
	for (int i = 0; i < 4; ++i) {
		EXPECT_EQ(client_.call("POST", "/api/v1/auth/login", bad).status, 401);
	}
	EXPECT_EQ(client_.call("POST", "/api/v1/auth/login", bad).status, 423);
	EXPECT_EQ(client_.call("POST", "/api/v1/auth/login", {{"username", a_.investigator.username}, {"password", fixture::kStaffPassword}}).status, 423);
	auto reset = client_.call("POST", "/api/v1/users/" + a_.investigator.username + "/password-reset", json::object(), coord_a_);
	ASSERT_EQ(reset.status, 200);
	EXPECT_EQ(client_.call("POST", "/api/v1/auth/login", {{"username", a_.investigator.username}, {"password", reset.body["temporary_password"]}}).status, 200);
}

TEST_F(ApiTest, LoginFailuresAreAudited) {
	client_.call("POST", "/api/v1/auth/login", {{"username", "nobody"}, {"password", "whatever-pass1"}});
	auto last = w_.store->read_audit(w_.store->last_seq()).at(0);
	EXPECT_EQ(last.action, AuditAction::LoginFailed);
}

TEST_F(ApiTest, CrossSiteReadLooksLikeMissing) {
	auto p = w_.patient_in(a_, WorkflowState::SelfScreened).record;
	auto own = client_.call("GET", "/api/v1/patients/" + p.patient_id.str(), nullptr, coord_a_);
	ASSERT_EQ(own.status, 200);
	EXPECT_EQ(own.body["patient_id"], p.patient_id.str());

	auto foreign = client_.call("GET", "/api/v1/patients/" + p.patient_id.str(), nullptr, coord_b_);
	auto missing_id = w_.ids.make<PatientId>();
	auto missing = client_.call("GET", "/api/v1/patients/" + missing_id.str(), nullptr, coord_b_);
	EXPECT_EQ(foreign.status, 404);
	EXPECT_EQ(missing.status, 404);
	auto scrub = [](std::string text, const std::string &id) {
		return std::regex_replace(text, std::regex(id), "<id>");
	};
	EXPECT_EQ(scrub(foreign.body.dump(), p.patient_id.str()), scrub(missing.body.dump(), missing_id.str()));
	EXPECT_EQ(foreign.headers, missing.headers);

	// Writes are hidden the same way.
	auto write = client_.call("PUT", "/api/v1/patients/" + p.patient_id.str() + "/forms/DRE", {{"fields", {{"finding", "PALPABLE"}}}}, coord_b_);
	EXPECT_EQ(write.status, 404);
	EXPECT_EQ(client_.call("POST", "/api/v1/patients/" + p.patient_id.str() + "/consultation", json::object(), coord_b_).status, 404);
	EXPECT_EQ(w_.store->get_patient(p.patient_id)->workflow_state, WorkflowState::SelfScreened);
}

TEST_F(ApiTest, PatientSeesOnlyOwnRecord) {
	auto mine = w_.patient_in(a_, WorkflowState::EnrollmentInProgress);
	auto other = w_.patient_in(a_, WorkflowState::EnrollmentInProgress);
	auto token = client_.login(mine.account->username, fixture::kPatientPassword);
	EXPECT_EQ(client_.call("GET", "/api/v1/patients/" + mine.record.patient_id.str(), nullptr, token).status, 200);
	EXPECT_EQ(client_.call("GET", "/api/v1/patients/" + other.record.patient_id.str(), nullptr, token).status, 404);
	EXPECT_EQ(client_.call("GET", "/api/v1/patients", nullptr, token).status, 403);
}

TEST_F(ApiTest, ListIsOwnSiteOnly) {
	using S = WorkflowState;
	for (auto s : {S::SelfScreened, S::Consulted, S::Enrolled, S::Enrolled, S::Ineligible}) {
		w_.patient_in(a_, s);
		w_.patient_in(b_, s);
	}
	auto all = w_.store->list_patients({});
	for (std::optional<S> state : {std::optional<S> {}, std::optional<S> {S::Enrolled}, std::optional<S> {S::Withdrawn}}) {
		std::set<std::string> oracle;
		for (const auto &p : all) {
			if (p.site_id == a_.site.site_id && (!state || p.workflow_state == *state)) {
				oracle.insert(p.patient_id.str());
			}
		}
		std::string target = "/api/v1/patients";
		if (state) {
			target += "?state=" + std::string(to_string(*state));
		}
		auto r = client_.call("GET", target, nullptr, coord_a_);
		ASSERT_EQ(r.status, 200);
		std::set<std::string> got;
		for (const auto &row : r.body["patients"]) {
			got.insert(row["patient_id"]);
		}
		EXPECT_EQ(got, oracle) << target;
	}
	EXPECT_EQ(client_.call("GET", "/api/v1/patients?site=" + b_.site.site_id.str(), nullptr, coord_a_).status, 403);
	auto admin = client_.call("GET", "/api/v1/patients?site=" + b_.site.site_id.str(), nullptr, root_);
	EXPECT_EQ(admin.body["patients"].size(), 5u);
	EXPECT_EQ(client_.call("GET", "/api/v1/patients?state=BOGUS", nullptr, coord_a_).status, 422);
}

TEST_F(ApiTest, ResearcherExportIsDeidentified) {
	w_.patient_in(a_, WorkflowState::Enrolled);
	w_.patient_in(b_, WorkflowState::Enrolled);
	auto token = client_.login(a_.researcher.username, fixture::kStaffPassword);
	auto r = client_.call("GET", "/api/v1/export", nullptr, token);
	ASSERT_EQ(r.status, 200) << fixture::describe(r);
	ASSERT_EQ(r.body["records"].size(), 2u);
	for (const auto &row : r.body["records"]) {
		EXPECT_FALSE(row.contains("patient_id"));
		EXPECT_FALSE(row.contains("account_id"));
	}
	for (const auto &a : w_.store->list_accounts()) {
		EXPECT_EQ(r.body.dump().find(a.account_id.str()), std::string::npos);
	}
	for (const auto &p : w_.store->list_patients({})) {
		EXPECT_EQ(r.body.dump().find(p.patient_id.str()), std::string::npos);
	}
	EXPECT_EQ(client_.call("GET", "/api/v1/export", nullptr, coord_a_).status, 403);
	EXPECT_EQ(client_.call("GET", "/api/v1/export", nullptr, root_).body["records"].size(), 2u);
}

TEST_F(ApiTest, IncompleteEnrollmentIs422) {
	auto h = w_.patient_in(a_, WorkflowState::EnrollmentInProgress);
	auto token = client_.login(h.account->username, fixture::kPatientPassword);
	auto r = client_.call("POST", "/api/v1/patients/" + h.record.patient_id.str() + "/enrollment", json::object(), token);
	EXPECT_EQ(r.status, 422);
	EXPECT_EQ(r.body["detail"]["incomplete_forms"], json::array({"DEMOGRAPHICS", "PSA_HISTORY", "BIOPSY", "DRE"}));
	EXPECT_TRUE(w_.store->list_notifications(std::nullopt).empty());
}

TEST_F(ApiTest, StaleVersionIs409) {
	auto p = w_.patient_in(a_, WorkflowState::SelfScreened).record;
	auto r = client_.call("POST", "/api/v1/patients/" + p.patient_id.str() + "/consultation", {{"expected_version", p.state_version + 5}}, coord_a_);
	EXPECT_EQ(r.status, 409);
	auto ok = client_.call("POST", "/api/v1/patients/" + p.patient_id.str() + "/consultation", {{"expected_version", p.state_version}}, coord_a_);
	EXPECT_EQ(ok.status, 200);
	EXPECT_EQ(client_.call("POST", "/api/v1/patients/" + p.patient_id.str() + "/consultation", json::object(), coord_a_).status, 409);
}

TEST_F(ApiTest, IdempotencyKeyReplays) {
	auto body = json {{"site_id", a_.site.site_id}, {"self_screen", self_check_body()}};
	std::map<std::string, std::string> key {{"idempotency-key", "reg-0001"}};
	auto first = client_.call("POST", "/api/v1/patients", body, coord_a_, key);
	ASSERT_EQ(first.status, 201);
	auto before = w_.store->last_seq();
	auto second = client_.call("POST", "/api/v1/patients", body, coord_a_, key);
	EXPECT_EQ(second.status, 201);
	EXPECT_EQ(second.body, first.body);
	EXPECT_EQ(second.headers["Idempotent-Replayed"], "true");
	EXPECT_EQ(patients(), 1u);
	EXPECT_EQ(w_.store->last_seq(), before);

	body["self_screen"]["gleason_score"] = 7;
	auto mismatch = client_.call("POST", "/api/v1/patients", body, coord_a_, key);
	EXPECT_EQ(mismatch.status, 422);
	EXPECT_EQ(patients(), 1u);
	// Keys are per caller.
	auto other = client_.call("POST", "/api/v1/patients", {{"site_id", b_.site.site_id}, {"self_screen", self_check_body()}}, coord_b_, key);
	EXPECT_EQ(other.status, 201);
	EXPECT_EQ(patients(), 2u);
}

TEST_F(ApiTest, ManifestMatchesRoutes) {
	auto r = client_.call("GET", "/api/v1/spec");
	ASSERT_EQ(r.status, 200);
	auto routes = r.body["routes"];
	EXPECT_EQ(routes.size(), 26u);
	std::set<std::pair<std::string, std::string>> seen;
	for (const auto &route : routes) {
		std::string method = route["method"];
		std::string path = std::regex_replace(route["path"].get<std::string>(), std::regex("\\{[a-z]+\\}"), "x");
		EXPECT_TRUE(seen.insert({method, route["path"]}).second);
		// Every advertised route is dispatched: it may reject the probe,
		// but never as an unknown path or method.
		auto probe = client_.call(method, path, method == "GET" ? json(nullptr) : json::object(), root_);
		EXPECT_NE(probe.status, 405) << method << " " << path;
		if (probe.status == 404) {
			EXPECT_NE(probe.body["message"].get<std::string>().rfind("no route", 0), 0u) << method << " " << path << " " << probe.body.dump();
		}
	}
	EXPECT_EQ(client_.call("GET", "/api/v1/nothing-here").status, 404);
	EXPECT_EQ(client_.call("DELETE", "/api/v1/sites", nullptr, root_).status, 405);
	EXPECT_EQ(client_.call("PUT", "/api/v1/eligibility/self-check", json::object()).status, 405);
}

TEST_F(ApiTest, SessionsExpireWhenIdle) {
	auto token = client_.login(a_.investigator.username, fixture::kStaffPassword);
	for (int i = 0; i < 3; ++i) {
		w_.clock.advance(std::chrono::minutes(29));
		EXPECT_EQ(client_.call("GET", "/api/v1/me", nullptr, token).status, 200);
	}
	w_.clock.advance(std::chrono::minutes(31));
	EXPECT_EQ(client_.call("GET", "/api/v1/me", nullptr, token).status, 401);
	EXPECT_EQ(client_.call("GET", "/api/v1/me", nullptr, "made-up-token").status, 401);
	EXPECT_EQ(client_.call("GET", "/api/v1/me").status, 401);
}

TEST_F(ApiTest, LogoutRevokes) {
	auto token = client_.login(a_.investigator.username, fixture::kStaffPassword);
	EXPECT_EQ(client_.call("POST", "/api/v1/auth/logout", json::object(), token).status, 200);
	EXPECT_EQ(client_.call("GET", "/api/v1/me", nullptr, token).status, 401);
}

TEST_F(ApiTest, DisableRevokesSessions) {
	auto token = client_.login(a_.investigator.username, fixture::kStaffPassword);
	EXPECT_EQ(client_.call("POST", "/api/v1/users/" + a_.investigator.username + "/disable", json::object(), coord_b_).status, 403);
	EXPECT_EQ(client_.call("POST", "/api/v1/users/" + a_.investigator.username + "/disable", json::object(), coord_a_).status, 200);
	EXPECT_EQ(client_.call("GET", "/api/v1/me", nullptr, token).status, 401);
}

TEST_F(ApiTest, AdminRoutes) {
	EXPECT_EQ(client_.call("GET", "/api/v1/sites", nullptr, coord_a_).status, 403);
	EXPECT_EQ(client_.call("GET", "/api/v1/audit", nullptr, coord_a_).status, 403);
	auto audit = client_.call("GET", "/api/v1/audit?from=1&limit=5", nullptr, root_);
	ASSERT_EQ(audit.status, 200);
	EXPECT_EQ(audit.body["events"].size(), 5u);
	EXPECT_EQ(audit.body["next"], 6);
	EXPECT_EQ(client_.call("GET", "/api/v1/audit?from=abc", nullptr, root_).status, 422);
	auto site = client_.call("POST", "/api/v1/sites", {{"name", "gamma"}, {"contact_email", "not-an-email"}}, root_);
	EXPECT_EQ(site.status, 422);
	EXPECT_EQ(client_.call("GET", "/healthz").body["status"], "ok");
}

TEST_F(ApiTest, EndToEndScenario) {
	auto report = fixture::run_enrollment_scenario(w_, portal_, client_, transport_);
	for (const auto &p : report.problems) {
		ADD_FAILURE() << p;
	}
	EXPECT_EQ(report.final_state, WorkflowState::Enrolled);
	EXPECT_EQ(report.delivered, 1u);
	EXPECT_EQ(report.trail, fixture::expected_enrollment_trail());
}

TEST_F(ApiTest, ResponsesNeverCarryPasswordMaterial) {
	auto report = fixture::run_enrollment_scenario(w_, portal_, client_, transport_);
	ASSERT_TRUE(report.problems.empty());
	auto reset = client_.call("POST", "/api/v1/users/" + a_.researcher.username + "/password-reset", json::object(), root_);
	client_.call("GET", "/api/v1/audit?limit=1000", nullptr, root_);
	client_.call("GET", "/api/v1/patients", nullptr, root_);
	client_.call("GET", "/api/v1/me", nullptr, root_);

	// Issued passwords are handed out exactly once, in the issuing reply.
	std::vector<std::string> issued;
	for (const auto &text : client_.transcript()) {
		auto body = json::parse(text);
		if (body.contains("temporary_password")) {
			issued.push_back(body["temporary_password"]);
		}
	}
	ASSERT_EQ(issued.size(), 4u);
	for (const auto &pw : issued) {
		int hits = 0;
		for (const auto &text : client_.transcript()) {
			hits += text.find(pw) != std::string::npos;
		}
		EXPECT_EQ(hits, 1) << pw;
	}
	for (const auto &text : client_.transcript()) {
		EXPECT_EQ(text.find("password_hash"), std::string::npos);
		EXPECT_EQ(text.find("pbkdf2"), std::string::npos);
		for (const char *pw : {fixture::kStaffPassword, fixture::kPatientPassword, fixture::kRootPassword}) {
			EXPECT_EQ(text.find(pw), std::string::npos);
		}
	}
}

namespace {

class BijectionTest : public ::testing::Test {
protected:
	BijectionTest() :
		counter_(new CountingDriver(store::open_store("sqlite://:memory:"))),
		w_(std::unique_ptr<store::StoreDriver>(counter_)),
		portal_(w_.context(), &transport_, no_drain()),
		client_(portal_) {
	}
	static PortalOptions no_drain() {
		PortalOptions o;
		o.drain_after_submit = false;
		return o;
	}

	CountingDriver *counter_;
	fixture::World w_;
	fixture::RecordingTransport transport_;
	Portal portal_;
	fixture::ApiClient client_;
};

bool writes_entities(const store::WriteBatch &b) {
	return !b.patients.empty() || !b.accounts.empty() || !b.sites.empty() || !b.notifications.empty();
}

} // namespace

TEST_F(BijectionTest, EverySuccessfulMutationIsOneAuditedWrite) {
	auto a = w_.cast("alpha");
	auto b = w_.cast("beta");
	auto p = w_.patient_in(a, WorkflowState::EnrollmentInProgress);
	auto q = w_.patient_in(a, WorkflowState::SelfScreened);
	counter_->take();

	auto coord = client_.login(a.coordinator.username, fixture::kStaffPassword);
	auto other = client_.login(b.coordinator.username, fixture::kStaffPassword);
	auto patient = client_.login(p.account->username, fixture::kPatientPassword);
	counter_->take();

	struct Call {
		std::string method, target, token;
		json body;
	};
	const std::string pp = "/api/v1/patients/" + p.record.patient_id.str();
	const std::string qp = "/api/v1/patients/" + q.record.patient_id.str();
	std::vector<Call> calls = {
		{"POST", "/api/v1/eligibility/self-check", "", fixture::eligible_inputs()},
		{"POST", "/api/v1/eligibility/self-check", "", json::object()},
		{"POST", "/api/v1/auth/login", "", {{"username", a.investigator.username}, {"password", fixture::kStaffPassword}}},
		{"POST", "/api/v1/auth/login", "", {{"username", a.investigator.username}, {"password", "wrong-Passw0rd"}}},
		{"POST", "/api/v1/patients", coord, {{"site_id", a.site.site_id}, {"self_screen", fixture::eligible_inputs()}}},
		{"POST", "/api/v1/patients", other, {{"site_id", a.site.site_id}, {"self_screen", fixture::eligible_inputs()}}},
		{"POST", qp + "/consultation", coord, json::object()},
		{"POST", qp + "/consultation", coord, json::object()},
		{"POST", qp + "/consultation", other, json::object()},
		{"PUT", pp + "/forms/DRE", patient, {{"fields", {{"finding", "NON_PALPABLE"}}}}},
		{"PUT", pp + "/forms/DRE", patient, {{"fields", {{"finding", "SQUISHY"}}}}},
		{"PUT", pp + "/forms/DRE", other, {{"fields", {{"finding", "PALPABLE"}}}}},
		{"POST", pp + "/enrollment", patient, json::object()},
		{"POST", "/api/v1/users/" + a.researcher.username + "/password-reset", coord, json::object()},
		{"POST", "/api/v1/users/" + a.researcher.username + "/password-reset", other, json::object()},
		{"POST", qp + "/withdrawal", coord, {{"reason", "changed mind"}}},
		{"POST", "/api/v1/auth/logout", other, json::object()},
	};
	for (const auto &schema : w_.forms.schemas()) {
		calls.push_back({"PUT", pp + "/forms/" + std::string(to_string(schema.first)), patient, {{"fields", fixture::complete_fields(schema.second)}}});
	}
	calls.push_back({"POST", pp + "/enrollment", patient, json::object()});
	calls.push_back({"POST", pp + "/specimens", coord, {{"kind", "URINE"}}});
	calls.push_back({"POST", pp + "/specimens", coord, {{"kind", "BLOOD"}}});

	int successes = 0;
	for (const auto &c : calls) {
		auto r = client_.call(c.method, c.target, c.body, c.token);
		auto batches = counter_->take();
		std::string what = c.method + " " + c.target + " -> " + std::to_string(r.status);
		if (r.status / 100 == 2) {
			++successes;
			ASSERT_EQ(batches.size(), 1u) << what;
			EXPECT_FALSE(batches[0].audit.empty()) << what;
		} else {
			// Refusals may be audited but never change an entity.
			EXPECT_LE(batches.size(), 1u) << what;
			for (const auto &batch : batches) {
				EXPECT_FALSE(writes_entities(batch) && batch.audit.front().action != AuditAction::LoginFailed) << what;
			}
		}
	}
	EXPECT_EQ(successes, 14);
}

TEST(ListenPolicy, PlaintextNeedsAcknowledgement) {
	ServerOptions o;
	o.host = "127.0.0.1";
	EXPECT_THROW(check_listen_policy(o), Error);
	o.allow_insecure_local = true;
	EXPECT_NO_THROW(check_listen_policy(o));
	o.host = "0.0.0.0";
	EXPECT_THROW(check_listen_policy(o), Error);
	o.allow_insecure_local = false;
	o.behind_tls_proxy = true;
	EXPECT_NO_THROW(check_listen_policy(o));
	EXPECT_TRUE(is_loopback("::1"));
	EXPECT_TRUE(is_loopback("localhost"));
	EXPECT_FALSE(is_loopback("10.0.0.1"));
}

TEST(StatusMapping, ErrorCodes) {
	EXPECT_EQ(status_for(ErrorCode::Validation), 422);
	EXPECT_EQ(status_for(ErrorCode::Submission), 422);
	EXPECT_EQ(status_for(ErrorCode::Conflict), 409);
	EXPECT_EQ(status_for(ErrorCode::Transition), 409);
	EXPECT_EQ(status_for(ErrorCode::Authorization), 403);
	EXPECT_EQ(status_for(ErrorCode::AuthFailure), 401);
	EXPECT_EQ(status_for(ErrorCode::Locked), 423);
	EXPECT_EQ(status_for(ErrorCode::NotFound), 404);
}

TEST(HttpServer, ServesOverLoopback) {
	fixture::World w;
	fixture::RecordingTransport transport;
	Portal portal(w.context(), &transport);
	ServerOptions o;
	o.port = 0;
	o.allow_insecure_local = true;
	HttpServer server(portal, o);
	int port = server.start();
	ASSERT_GT(port, 0);
	httplib::Client client("127.0.0.1", port);
	auto health = client.Get("/healthz");
	ASSERT_TRUE(health);
	EXPECT_EQ(health->status, 200);
	EXPECT_EQ(health->get_header_value("Cache-Control"), "no-store");
	auto check = client.Post("/api/v1/eligibility/self-check?x=1", json(fixture::eligible_inputs()).dump(), "application/json");
	ASSERT_TRUE(check);
	EXPECT_EQ(check->status, 200);
	EXPECT_EQ(json::parse(check->body)["overall"], "ELIGIBLE");
	auto login = client.Post("/api/v1/auth/login", json({{"username", "root"}, {"password", fixture::kRootPassword}}).dump(), "application/json");
	ASSERT_TRUE(login);
	std::string token = json::parse(login->body)["token"];
	httplib::Headers auth {{"Authorization", "Bearer " + token}};
	auto sites = client.Get("/api/v1/sites", auth);
	ASSERT_TRUE(sites);
	EXPECT_EQ(sites->status, 200);
	EXPECT_EQ(client.Get("/api/v1/sites")->status, 401);
	server.stop();
}

TEST(IsolationFuzz, SmallRun) {
	auto report = fixture::run_isolation_fuzz(3, 1500, 5);
	for (const auto &leak : report.leaks) {
		ADD_FAILURE() << leak;
	}
	EXPECT_GE(report.calls, 1500u);
	EXPECT_EQ(report.roles.size(), 5u);
	EXPECT_GT(report.checked_reads, 100u);
	EXPECT_GT(report.statuses[200], 100u);
	EXPECT_GT(report.statuses[404], 10u);
}
