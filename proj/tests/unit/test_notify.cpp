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

#include <cstdlib>
#include <fstream>
#include <thread>

#include <gtest/gtest.h>

#include <passdcc/model/codec.hpp>
#include <passdcc/notify/outbox.hpp>
#include <passdcc/notify/transport.hpp>

#include "world.hpp"

using namespace passdcc;
using namespace passdcc::notify;
using namespace std::chrono_literals;

namespace {

class OutboxTest : public ::testing::Test {
protected:
	void SetUp() override {
		cast_ = w_.cast("alpha");
		patient_ = w_.patient_in(cast_, WorkflowState::Enrolled).record;
	}

	Notification row() {
		return *w_.store->find_notification(patient_.patient_id, NotificationTemplate::EnrollmentSubmitted);
	}

	std::vector<AuditEvent> sent_events() {
		std::vector<AuditEvent> out;
		for (auto &e : w_.store->read_audit(1, std::nullopt)) {
			if (e.action == AuditAction::NotifySent) {
				out.push_back(e);
			}
		}
		return out;
	}

	fixture::World w_;
	fixture::Cast cast_;
	PatientRecord patient_;
	Outbox outbox_ {*w_.store, w_.clock};
};

store::WriteBatch enrolled_batch(const PatientId &id) {
	store::WriteBatch batch;
	PatientRecord p;
	p.patient_id = id;
	p.workflow_state = WorkflowState::Enrolled;
	batch.patients.push_back({p, 0});
	return batch;
}

} // namespace

TEST_F(OutboxTest, SubmitEnqueuesOnePendingRow) {
	auto n = row();
	EXPECT_EQ(n.status, NotificationStatus::Pending);
	EXPECT_EQ(n.attempts, 0);
	EXPECT_EQ(n.recipient, cast_.site.contact_email);
	EXPECT_EQ(w_.store->list_notifications(std::nullopt).size(), 1u);
}

TEST_F(OutboxTest, SecondEnqueueReturnsSameRow) {
	auto batch = enrolled_batch(patient_.patient_id);
	auto again = enqueue(batch, *w_.store, patient_.patient_id, "x@y.org", NotificationTemplate::EnrollmentSubmitted, w_.ids, w_.clock.now());
	EXPECT_EQ(again.notification_id, row().notification_id);
	EXPECT_TRUE(batch.notifications.empty());

	auto fresh = enrolled_batch(PatientId {"other"});
	auto a = enqueue(fresh, *w_.store, PatientId {"other"}, "x@y.org", NotificationTemplate::EnrollmentSubmitted, w_.ids, w_.clock.now());
	auto b = enqueue(fresh, *w_.store, PatientId {"other"}, "x@y.org", NotificationTemplate::EnrollmentSubmitted, w_.ids, w_.clock.now());
	EXPECT_EQ(a.notification_id, b.notification_id);
	EXPECT_EQ(fresh.notifications.size(), 1u);
}

TEST_F(OutboxTest, EnqueueOutsideTransitionIsContractViolation) {
	store::WriteBatch batch;
	try {
		enqueue(batch, *w_.store, PatientId {"p"}, "x@y.org", NotificationTemplate::EnrollmentSubmitted, w_.ids, w_.clock.now());
		FAIL();
	} catch (const Error &e) {
		EXPECT_EQ(e.code(), ErrorCode::ContractViolation);
	}
	auto other = enrolled_batch(PatientId {"q"});
	EXPECT_THROW(enqueue(other, *w_.store, PatientId {"p"}, "x@y.org", NotificationTemplate::EnrollmentSubmitted, w_.ids, w_.clock.now()), Error);
}

TEST_F(OutboxTest, HealthyTransportSendsAndAudits) {
	fixture::RecordingTransport transport;
	auto report = outbox_.drain(transport);
	EXPECT_EQ(report.attempted, 1);
	EXPECT_EQ(report.sent, 1);
	auto n = row();
	EXPECT_EQ(n.status, NotificationStatus::Sent);
	EXPECT_EQ(n.attempts, 1);
	EXPECT_EQ(n.sent_at, w_.clock.now());
	EXPECT_FALSE(n.claimed_until);
	ASSERT_EQ(transport.sent().size(), 1u);
	auto events = sent_events();
	ASSERT_EQ(events.size(), 1u);
	EXPECT_EQ(events[0].actor, kNotifierActor);
	EXPECT_EQ(events[0].subject, AuditSubject::patient(patient_.patient_id));
	EXPECT_EQ(events[0].detail["notification_id"], n.notification_id.str());
	EXPECT_EQ(events[0].detail["transport"], "recording");
}

TEST_F(OutboxTest, TransportDownForTwoDrainsThenUp) {
	fixture::FlakyTransport transport(2);
	auto first = outbox_.drain(transport);
	EXPECT_EQ(first.retrying, 1);
	EXPECT_EQ(row().attempts, 1);
	EXPECT_EQ(row().next_attempt_at, w_.clock.now() + 30s);
	EXPECT_TRUE(row().last_error);

	// Not yet due.
	EXPECT_EQ(outbox_.drain(transport).attempted, 0);

	w_.clock.advance(30s);
	EXPECT_EQ(outbox_.drain(transport).retrying, 1);
	EXPECT_EQ(row().next_attempt_at, w_.clock.now() + 60s);
	w_.clock.advance(60s);
	EXPECT_EQ(outbox_.drain(transport).sent, 1);

	auto n = row();
	EXPECT_EQ(n.status, NotificationStatus::Sent);
	EXPECT_EQ(n.attempts, 3);
	EXPECT_EQ(transport.calls(), 3);
	EXPECT_EQ(sent_events().size(), 1u);
	EXPECT_EQ(sent_events()[0].detail["attempts"], 3);
}

TEST_F(OutboxTest, SentRowIsUntouchedAfterwards) {
	fixture::RecordingTransport transport;
	outbox_.drain(transport);
	auto sent = row();
	for (int i = 0; i < 3; ++i) {
		w_.clock.advance(1h);
		EXPECT_EQ(outbox_.drain(transport).attempted, 0);
	}
	EXPECT_EQ(row(), sent);
	EXPECT_EQ(transport.sent().size(), 1u);
}

TEST_F(OutboxTest, FailsAfterMaxAttempts) {
	fixture::FlakyTransport transport(1000);
	for (int i = 0; i < 12; ++i) {
		outbox_.drain(transport);
		w_.clock.advance(1h);
	}
	auto n = row();
	EXPECT_EQ(n.status, NotificationStatus::Failed);
	EXPECT_EQ(n.attempts, 10);
	EXPECT_EQ(transport.calls(), 10);
	EXPECT_TRUE(sent_events().empty());
}

TEST_F(OutboxTest, ExpiredLeaseCanBeTakenOver) {
	auto n = row();
	n.claimed_until = w_.clock.now() + 2min;
	store::WriteBatch b;
	b.notifications.push_back({n, n.revision});
	w_.store->commit(b);
	fixture::RecordingTransport transport;
	EXPECT_EQ(outbox_.drain(transport).attempted, 0);
	w_.clock.advance(3min);
	EXPECT_EQ(outbox_.drain(transport).sent, 1);
}

TEST_F(OutboxTest, ConcurrentDrainsDeliverOnce) {
	for (int i = 0; i < 20; ++i) {
		w_.patient_in(cast_, WorkflowState::Enrolled);
	}
	fixture::RecordingTransport transport;
	std::vector<std::thread> threads;
	std::atomic<int> sent {0};
	for (int t = 0; t < 6; ++t) {
		threads.emplace_back([&] {
			Outbox mine(*w_.store, w_.clock);
			sent += mine.drain(transport).sent;
		});
	}
	for (auto &t : threads) {
		t.join();
	}
	EXPECT_EQ(sent.load(), 21);
	EXPECT_EQ(transport.sent().size(), 21u);
	EXPECT_EQ(sent_events().size(), 21u);
	EXPECT_EQ(w_.store->list_notifications(NotificationStatus::Sent).size(), 21u);
}

TEST(Backoff, DoublesFromBaseAndCaps) {
	OutboxConfig c;
	EXPECT_EQ(backoff_after(0, c), 0ms);
	EXPECT_EQ(backoff_after(1, c), 30s);
	EXPECT_EQ(backoff_after(2, c), 60s);
	EXPECT_EQ(backoff_after(5, c), 480s);
	EXPECT_EQ(backoff_after(6, c), 15min);
	EXPECT_EQ(backoff_after(9, c), 15min);
}

TEST(LogSink, AppendsOneJsonLinePerNotification) {
	fixture::TempDir dir("sink");
	LogSinkTransport sink(dir / "out.jsonl");
	Notification n;
	n.notification_id = NotificationId {"N1"};
	n.patient_id = PatientId {"P1"};
	n.recipient = "c@x.org";
	sink.send(n, fixture::fixed_start());
	n.notification_id = NotificationId {"N2"};
	sink.send(n, fixture::fixed_start());
	std::ifstream in(dir / "out.jsonl");
	std::string line;
	std::vector<nlohmann::json> lines;
	while (std::getline(in, line)) {
		lines.push_back(nlohmann::json::parse(line));
	}
	ASSERT_EQ(lines.size(), 2u);
	EXPECT_EQ(lines[0]["notification_id"], "N1");
	EXPECT_EQ(lines[0]["recipient"], "c@x.org");
	EXPECT_EQ(lines[0]["template"], "ENROLLMENT_SUBMITTED");
	EXPECT_EQ(lines[0]["patient_id"], "P1");
	EXPECT_EQ(lines[0]["sent_at"], "2026-03-02T09:00:00.000Z");
}

TEST(LogSink, UnwritablePathThrows) {
	fixture::TempDir dir("sink");
	LogSinkTransport sink(dir / "out.jsonl");
	std::filesystem::create_directories(dir / "out.jsonl");
	Notification n;
	try {
		sink.send(n, fixture::fixed_start());
		FAIL();
	} catch (const Error &e) {
		EXPECT_EQ(e.code(), ErrorCode::Io);
	}
}

TEST(Smtp, RendersHeadersAndBody) {
	SmtpTransport smtp({"smtp://localhost:2525", "", "", "dcc@example.org", false});
	Notification n;
	n.notification_id = NotificationId {"N1"};
	n.patient_id = PatientId {"P1"};
	n.recipient = "coord@site.org";
	auto text = smtp.render(n, fixture::fixed_start());
	EXPECT_NE(text.find("Date: Mon, 02 Mar 2026 09:00:00 +0000\r\n"), std::string::npos);
	EXPECT_NE(text.find("From: dcc@example.org\r\n"), std::string::npos);
	EXPECT_NE(text.find("To: coord@site.org\r\n"), std::string::npos);
	EXPECT_NE(text.find("\r\n\r\n"), std::string::npos);
	EXPECT_NE(text.find("P1"), std::string::npos);
}

TEST(Smtp, UnreachableServerIsIoError) {
	SmtpTransport smtp({"smtp://127.0.0.1:1", "", "", "dcc@example.org", false});
	Notification n;
	n.notification_id = NotificationId {"N1"};
	n.recipient = "coord@site.org";
	try {
		smtp.send(n, fixture::fixed_start());
		FAIL();
	} catch (const Error &e) {
		EXPECT_EQ(e.code(), ErrorCode::Io);
	}
}

TEST(Smtp, SettingsFromEnvironment) {
	::unsetenv("PASSDCC_SMTP_URL");
	EXPECT_FALSE(SmtpSettings::from_env());
	::setenv("PASSDCC_SMTP_URL", "smtps://mail:465", 1);
	::setenv("PASSDCC_SMTP_FROM", "dcc@x.org", 1);
	::setenv("PASSDCC_SMTP_REQUIRE_TLS", "0", 1);
	auto s = SmtpSettings::from_env();
	ASSERT_TRUE(s);
	EXPECT_EQ(s->url, "smtps://mail:465");
	EXPECT_EQ(s->from, "dcc@x.org");
	EXPECT_FALSE(s->require_tls);
	::unsetenv("PASSDCC_SMTP_URL");
	::unsetenv("PASSDCC_SMTP_FROM");
	::unsetenv("PASSDCC_SMTP_REQUIRE_TLS");
}
