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

#include <random>
#include <set>

#include <gtest/gtest.h>

#include <passdcc/model/codec.hpp>
#include <passdcc/model/forms.hpp>
#include <passdcc/model/validate.hpp>

#include "world.hpp"

using namespace passdcc;
using nlohmann::json;

namespace {

// Random domain values for the round-trip property.
class Gen {
public:
	explicit Gen(std::uint64_t seed) :
		rng_(seed), clock_(fixture::fixed_start()), ids_(clock_, seed) {
	}

	std::int64_t integer(std::int64_t lo, std::int64_t hi) {
		return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng_);
	}
	double real(double lo, double hi) {
		return std::uniform_real_distribution<double>(lo, hi)(rng_);
	}
	bool coin() {
		return integer(0, 1) == 1;
	}
	std::string text() {
		static const std::vector<std::string> alphabet {"a", "b", "X", "Z", " ", "0", "9", "_", "-", "\"", "\\", "/", "\n", "\t", "\xc3\xa9", "\xe2\x82\xac"};
		std::string s;
		for (auto n = integer(0, 12); n > 0; --n) {
			s += alphabet[static_cast<std::size_t>(integer(0, static_cast<std::int64_t>(alphabet.size()) - 1))];
		}
		return s;
	}
	Timestamp when() {
		return fixture::fixed_start() + std::chrono::milliseconds(integer(-1'000'000'000'000, 1'000'000'000'000));
	}
	template <typename E>
	E pick() {
		auto all = all_values<E>();
		return all[static_cast<std::size_t>(integer(0, static_cast<std::int64_t>(all.size()) - 1))];
	}
	template <typename IdT>
	IdT id() {
		return ids_.make<IdT>();
	}
	template <typename T>
	std::optional<T> maybe(T value) {
		return coin() ? std::optional<T>(std::move(value)) : std::nullopt;
	}

	CriterionInputs inputs() {
		return {coin(), coin(), integer(2, 10), real(0, 40), integer(0, 20), integer(1, 30)};
	}
	EligibilityAssessment assessment() {
		EligibilityAssessment a;
		a.assessment_id = id<AssessmentId>();
		a.kind = pick<AssessmentKind>();
		a.inputs = inputs();
		for (auto n = integer(1, 5); n > 0; --n) {
			a.verdicts[text()] = pick<Verdict>();
		}
		a.overall = pick<Overall>();
		a.assessed_at = when();
		a.assessor = maybe(id<AccountId>());
		a.ruleset_version = text();
		return a;
	}
	FieldValue field() {
		switch (integer(0, 2)) {
		case 0:
			return text();
		case 1:
			return integer(-100000, 100000);
		default:
			return real(-1e6, 1e6);
		}
	}
	CaseReportForm form(FormName name) {
		CaseReportForm f;
		f.form_name = name;
		for (auto n = integer(0, 4); n > 0; --n) {
			f.fields["f" + std::to_string(integer(0, 99))] = field();
		}
		f.status = pick<FormStatus>();
		f.last_edited_by = maybe(id<AccountId>());
		f.last_edited_at = maybe(when());
		return f;
	}
	PatientRecord patient() {
		PatientRecord p;
		p.patient_id = id<PatientId>();
		p.site_id = id<SiteId>();
		p.workflow_state = pick<WorkflowState>();
		p.state_version = integer(1, 1000);
		p.created_at = when();
		p.updated_at = when();
		p.account_id = maybe(id<AccountId>());
		for (auto n = integer(0, 2); n > 0; --n) {
			p.assessments.push_back(assessment());
		}
		for (auto name : all_values<FormName>()) {
			if (coin()) {
				p.forms[name] = form(name);
			}
		}
		for (auto n = integer(0, 2); n > 0; --n) {
			p.specimens.push_back({id<SpecimenId>(), p.patient_id, pick<SpecimenKind>(), when(), id<AccountId>(), maybe(text())});
		}
		if (coin()) {
			p.baseline = BaselineSnapshot {when(), p.forms};
		}
		return p;
	}
	UserAccount account() {
		return {id<AccountId>(), text(), text(), coin(), pick<Role>(), maybe(id<SiteId>()), maybe(id<PatientId>()), coin(), integer(0, 9), integer(0, 50)};
	}
	Site site() {
		return {id<SiteId>(), text(), text(), coin(), integer(0, 50)};
	}
	AuditEvent audit() {
		AuditEvent e;
		e.seq = integer(1, 1'000'000);
		e.at = when();
		e.actor = text();
		e.action = pick<AuditAction>();
		e.subject = {pick<SubjectType>(), text()};
		e.detail = {{"k", text()}, {"n", integer(0, 10)}, {"nested", {{"a", json::array({1, 2})}}}};
		e.prev_hash = text();
		e.hash = text();
		return e;
	}
	Notification notification() {
		Notification n;
		n.notification_id = id<NotificationId>();
		n.patient_id = id<PatientId>();
		n.recipient = text();
		n.status = pick<NotificationStatus>();
		n.attempts = integer(0, 10);
		n.created_at = when();
		n.sent_at = maybe(when());
		n.next_attempt_at = maybe(when());
		n.claimed_until = maybe(when());
		n.last_error = maybe(text());
		n.revision = integer(0, 20);
		return n;
	}

private:
	std::mt19937_64 rng_;
	ManualClock clock_;
	UlidGenerator ids_;
};

template <typename T>
T round_trip(const T &value) {
	return decode<T>(json::parse(encode(value)));
}

bool has_rule(const Violations &v, const std::string &rule) {
	for (const auto &x : v) {
		if (x.rule == rule) {
			return true;
		}
	}
	return false;
}

} // namespace

TEST(Codec, RoundTripIsIdentityForGeneratedValues) {
	Gen gen(20260302);
	for (int i = 0; i < 300; ++i) {
		auto p = gen.patient();
		ASSERT_EQ(round_trip(p), p) << encode(p);
		auto a = gen.account();
		ASSERT_EQ(round_trip(a), a);
		auto s = gen.site();
		ASSERT_EQ(round_trip(s), s);
		auto e = gen.audit();
		ASSERT_EQ(round_trip(e), e);
		auto n = gen.notification();
		ASSERT_EQ(round_trip(n), n);
		auto in = gen.inputs();
		ASSERT_EQ(round_trip(in), in);
	}
}

TEST(Codec, EnumsUseWireNames) {
	EXPECT_EQ(json(WorkflowState::EnrollmentInProgress), "ENROLLMENT_IN_PROGRESS");
	EXPECT_EQ(json(Role::DccAdmin), "DCC_ADMIN");
	EXPECT_EQ(decode<FormName>(json("PSA_HISTORY")), FormName::PsaHistory);
	try {
		decode<WorkflowState>(json("ALMOST_ENROLLED"));
		FAIL() << "unknown state accepted";
	} catch (const Error &e) {
		EXPECT_EQ(e.code(), ErrorCode::Validation);
	}
}

TEST(Codec, MalformedDocumentIsValidationError) {
	try {
		decode<PatientRecord>(json {{"patient_id", 7}});
		FAIL();
	} catch (const Error &e) {
		EXPECT_EQ(e.code(), ErrorCode::Validation);
	}
}

TEST(Codec, PublicViewOmitsPasswordHash) {
	UserAccount a;
	a.account_id = AccountId {"A1"};
	a.username = "u";
	a.password_hash = "pbkdf2$secret";
	auto view = public_view(a);
	EXPECT_FALSE(view.contains("password_hash"));
	EXPECT_EQ(view.dump().find("secret"), std::string::npos);
}

TEST(Time, Rfc3339RoundTripsAndNormalizesOffsets) {
	auto t = parse_rfc3339("2026-03-02T09:00:00.123Z");
	ASSERT_TRUE(t);
	EXPECT_EQ(format_rfc3339(*t), "2026-03-02T09:00:00.123Z");
	auto shifted = parse_rfc3339("2026-03-02T10:30:00.123+01:30");
	ASSERT_TRUE(shifted);
	EXPECT_EQ(*shifted, *t);
	EXPECT_EQ(month_of(*t), "2026-03");
}

TEST(Time, RejectsMalformedTimestampsAndDates) {
	for (const char *bad : {"2026-02-30T00:00:00Z", "2026-03-02 09:00:00Z", "2026-03-02T09:00:00", "2026-03-02T25:00:00Z", "", "x"}) {
		EXPECT_FALSE(parse_rfc3339(bad)) << bad;
	}
	EXPECT_TRUE(is_valid_date("2024-02-29"));
	EXPECT_FALSE(is_valid_date("2023-02-29"));
	EXPECT_FALSE(is_valid_date("2023-2-28"));
}

TEST(Ids, UlidsAreUniqueSortableAndWellFormed) {
	ManualClock clock(fixture::fixed_start());
	UlidGenerator gen(clock, 3);
	std::set<std::string> seen;
	std::string last;
	for (int i = 0; i < 5000; ++i) {
		if (i % 100 == 0) {
			clock.advance(std::chrono::milliseconds(1));
		}
		auto id = gen.next();
		ASSERT_TRUE(is_ulid(id)) << id;
		ASSERT_GT(id, last);
		ASSERT_TRUE(seen.insert(id).second);
		last = id;
	}
	EXPECT_FALSE(is_ulid("not-a-ulid"));
}

TEST(Validate, PositiveCoresAboveTotalIsViolation) {
	CriterionInputs in {false, false, 6, 4.0, 3, 2};
	EXPECT_TRUE(has_rule(validate(in), "positive_cores <= total_cores"));
	EXPECT_TRUE(validate(fixture::eligible_inputs()).empty());
}

TEST(Validate, StaffAccountNeedsSite) {
	UserAccount a;
	a.account_id = AccountId {"A1"};
	a.username = "coord";
	a.password_hash = security::PasswordHasher(1000).hash("whatever-pass1");
	a.role = Role::Coordinator;
	EXPECT_TRUE(has_rule(validate(a), "site_id required"));
	a.site_id = SiteId {"S1"};
	EXPECT_TRUE(validate(a).empty());
}

TEST(Validate, WellFormedPatientRecordIsOk) {
	fixture::World w;
	auto cast = w.cast("alpha");
	for (auto s : {WorkflowState::SelfScreened, WorkflowState::Credentialed, WorkflowState::Enrolled}) {
		auto h = w.patient_in(cast, s);
		EXPECT_TRUE(validate(h.record, &w.forms).empty()) << violations_json(validate(h.record, &w.forms)).dump();
	}
}

TEST(Validate, PatientInvariants) {
	PatientRecord p;
	p.patient_id = PatientId {"P"};
	p.site_id = SiteId {"S"};
	p.state_version = 0;
	p.workflow_state = WorkflowState::Credentialed;
	p.created_at = fixture::fixed_start();
	p.updated_at = p.created_at - std::chrono::seconds(1);
	auto v = validate(p);
	EXPECT_TRUE(has_rule(v, "state_version >= 1"));
	EXPECT_TRUE(has_rule(v, "updated_at >= created_at"));
	EXPECT_TRUE(has_rule(v, "account_id required once CREDENTIALED"));
}

TEST(Forms, StatusFollowsRequiredFields) {
	auto catalog = FormCatalog::load_file(fixture::config_file("forms.default.json"));
	const auto &demo = catalog.schema(FormName::Demographics);
	std::map<std::string, FieldValue> fields;
	EXPECT_EQ(compute_status(fields, demo), FormStatus::Empty);
	fields["date_of_birth"] = std::string("1955-04-01");
	EXPECT_EQ(compute_status(fields, demo), FormStatus::InProgress);
	auto complete = fixture::complete_fields(demo);
	for (auto it = complete.begin(); it != complete.end(); ++it) {
		fields[it.key()] = decode<FieldValue>(it.value());
	}
	EXPECT_EQ(compute_status(fields, demo), FormStatus::Complete);
	fields["date_of_birth"] = std::string("1955-13-01");
	EXPECT_EQ(compute_status(fields, demo), FormStatus::InProgress);
}

TEST(Forms, CatalogRejectsBadSchemas) {
	EXPECT_THROW(FormCatalog::load(R"({"forms": {}})"), Error);
	EXPECT_THROW(FormCatalog::load(R"({"forms": {"DEMOGRAPHICS": {"fields": [{"name": "x", "type": "COLOR"}]}}})"), Error);
	EXPECT_THROW(FormCatalog::load("not json"), Error);
}
