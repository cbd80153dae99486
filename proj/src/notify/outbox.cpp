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

#include <passdcc/notify/outbox.hpp>

#include <algorithm>

#include <passdcc/model/error.hpp>

namespace passdcc::notify {

std::chrono::milliseconds backoff_after(std::int64_t attempts, const OutboxConfig &config) {
	if (attempts <= 0) {
		return std::chrono::milliseconds(0);
	}
	auto delay = config.base_backoff;
	for (std::int64_t i = 1; i < attempts && delay < config.max_backoff; ++i) {
		delay *= 2;
	}
	return std::min(delay, config.max_backoff);
}

Notification enqueue(
	store::WriteBatch &batch,
	const store::StoreDriver &store,
	const PatientId &patient,
	const std::string &recipient,
	NotificationTemplate tmpl,
	IdGenerator &ids,
	Timestamp now) {
	bool in_transition = std::any_of(batch.patients.begin(), batch.patients.end(), [&](const auto &w) {
		return w.record.patient_id == patient && w.record.workflow_state == WorkflowState::Enrolled;
	});
	if (!in_transition) {
		throw Error(
			ErrorCode::ContractViolation,
			"notification enqueued outside the enrollment transition of patient " + patient.str());
	}
	for (const auto &w : batch.notifications) {
		if (w.notification.patient_id == patient && w.notification.template_name == tmpl) {
			return w.notification;
		}
	}
	if (auto existing = store.find_notification(patient, tmpl)) {
		return *existing;
	}
	if (recipient.find('@') == std::string::npos) {
		throw Error(ErrorCode::Precondition, "notification recipient is not an email address");
	}
	Notification n;
	n.notification_id = ids.make<NotificationId>();
	n.patient_id = patient;
	n.recipient = recipient;
	n.template_name = tmpl;
	n.status = NotificationStatus::Pending;
	n.created_at = now;
	n.revision = 1;
	batch.notifications.push_back({n, 0});
	return n;
}

nlohmann::json DrainReport::to_json() const {
	return {
		{"attempted", attempted},
		{"sent", sent},
		{"retrying", retrying},
		{"failed", failed},
		{"lost_claims", lost_claims},
	};
}

Outbox::Outbox(store::StoreDriver &store, const Clock &clock, OutboxConfig config) :
	store_(store), clock_(clock), config_(config) {
}

bool Outbox::claim(Notification &row, Timestamp now) {
	Notification claimed = row;
	claimed.claimed_until = now + config_.lease;
	store::WriteBatch batch;
	batch.notifications.push_back({claimed, row.revision});
	try {
		store_.commit(batch);
	} catch (const Error &e) {
		if (e.code() == ErrorCode::Conflict) {
			return false;
		}
		throw;
	}
	claimed.revision = row.revision + 1;
	row = claimed;
	return true;
}

void Outbox::settle(Notification row, Transport &transport, DrainReport &report) {
	auto now = clock_.now();
	std::optional<std::string> failure;
	try {
		transport.send(row, now);
	} catch (const std::exception &e) {
		failure = e.what();
	}

	Notification next = row;
	next.attempts = row.attempts + 1;
	next.claimed_until.reset();
	store::WriteBatch batch;
	if (!failure) {
		next.status = NotificationStatus::Sent;
		next.sent_at = now;
		next.next_attempt_at.reset();
		next.last_error.reset();
		AuditEvent event;
		event.at = now;
		event.actor = std::string(kNotifierActor);
		event.action = AuditAction::NotifySent;
		event.subject = AuditSubject::patient(row.patient_id);
		event.detail = {
			{"notification_id", row.notification_id.str()},
			{"template", to_string(row.template_name)},
			{"attempts", next.attempts},
			{"transport", transport.name()},
		};
		batch.audit.push_back(std::move(event));
	} else if (next.attempts >= config_.max_attempts) {
		next.status = NotificationStatus::Failed;
		next.next_attempt_at.reset();
		next.last_error = failure;
	} else {
		next.next_attempt_at = now + backoff_after(next.attempts, config_);
		next.last_error = failure;
	}
	batch.notifications.push_back({next, row.revision});
	try {
		store_.commit(batch);
	} catch (const Error &e) {
		// The lease ran out and another drain took the row over.
		if (e.code() != ErrorCode::Conflict) {
			throw;
		}
		++report.lost_claims;
		return;
	}
	switch (next.status) {
	case NotificationStatus::Sent:
		++report.sent;
		break;
	case NotificationStatus::Failed:
		++report.failed;
		break;
	case NotificationStatus::Pending:
		++report.retrying;
		break;
	}
}

DrainReport Outbox::drain(Transport &transport) {
	DrainReport report;
	for (auto row : store_.list_notifications(NotificationStatus::Pending)) {
		auto now = clock_.now();
		if (row.next_attempt_at && *row.next_attempt_at > now) {
			continue;
		}
		if (row.claimed_until && *row.claimed_until > now) {
			continue;
		}
		if (!claim(row, now)) {
			++report.lost_claims;
			continue;
		}
		++report.attempted;
		settle(row, transport, report);
	}
	return report;
}

} // namespace passdcc::notify
