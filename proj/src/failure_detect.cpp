#include "fls/failure_detect.hpp"

#include <algorithm>
#include <limits>

namespace fls::detect {

void DetectorParams::validate() const {
  if (heartbeat_period_ms <= 0) throw FlsError(ErrorCode::Range, "heartbeat period must be > 0");
  if (heartbeat_timeout_ms <= 0) throw FlsError(ErrorCode::Range, "heartbeat timeout must be > 0");
  if (poll_spacing_ms <= 0) throw FlsError(ErrorCode::Range, "poll spacing must be > 0");
  if (max_polls < 1) throw FlsError(ErrorCode::Range, "max polls must be >= 1");
}

const char* status_name(Status s) {
  switch (s) {
    case Status::Alive: return "alive";
    case Status::Suspect: return "suspect";
    case Status::DeclaredFailed: return "declared_failed";
  }
  return "unknown";
}

const char* failure_kind_name(FailureKind k) {
  switch (k) {
    case FailureKind::Rotor: return "rotor";
    case FailureKind::LightSource: return "light";
    case FailureKind::Compute: return "compute";
    case FailureKind::Battery: return "battery";
  }
  return "unknown";
}

bool self_detectable(FailureKind k) {
  return k == FailureKind::Rotor || k == FailureKind::LightSource;
}

FailureDetector::FailureDetector(FlsId owner, DetectorParams params, Millis start_ms)
    : owner_(owner),
      params_(params),
      last_tick_ms_(start_ms),
      next_heartbeat_ms_(start_ms) {
  params_.validate();
}

void FailureDetector::add_neighbor(FlsId id, Millis now_ms) {
  NeighborEntry e;
  e.last_heartbeat_ms = now_ms;
  neighbors_[id] = e;
}

void FailureDetector::remove_neighbor(FlsId id) { neighbors_.erase(id); }

const NeighborEntry* FailureDetector::neighbor(FlsId id) const {
  auto it = neighbors_.find(id);
  return it == neighbors_.end() ? nullptr : &it->second;
}

void FailureDetector::revive(NeighborEntry& e, Millis now_ms) {
  e.status = Status::Alive;
  e.last_heartbeat_ms = now_ms;
  e.missed_count = 0;
  e.poll_attempts = 0;
  e.next_poll_ms = 0;
}

void FailureDetector::on_heartbeat(FlsId from, Millis now_ms) {
  auto it = neighbors_.find(from);
  if (it == neighbors_.end() || it->second.status == Status::DeclaredFailed) return;
  revive(it->second, now_ms);
}

void FailureDetector::on_poll_reply(FlsId from, Millis now_ms) { on_heartbeat(from, now_ms); }

void FailureDetector::reset(FlsId id, Millis now_ms) {
  auto it = neighbors_.find(id);
  if (it == neighbors_.end()) {
    add_neighbor(id, now_ms);
    return;
  }
  revive(it->second, now_ms);
}

std::vector<Message> FailureDetector::on_tick(Millis now_ms) {
  std::vector<Message> out;
  now_ms = std::max(now_ms, last_tick_ms_);
  last_tick_ms_ = now_ms;

  if (next_heartbeat_ms_ <= now_ms) {
    for (const auto& [id, e] : neighbors_) {
      if (e.status != Status::DeclaredFailed)
        out.push_back({MessageKind::Heartbeat, owner_, id, owner_, now_ms});
    }
    const Millis behind = now_ms - next_heartbeat_ms_;
    next_heartbeat_ms_ += (behind / params_.heartbeat_period_ms + 1) * params_.heartbeat_period_ms;
  }

  std::vector<FlsId> declared;
  for (auto& [id, e] : neighbors_) {
    if (e.status == Status::DeclaredFailed) continue;
    e.missed_count = static_cast<std::uint32_t>((now_ms - e.last_heartbeat_ms) /
                                                params_.heartbeat_period_ms);
    if (e.status == Status::Alive) {
      const Millis suspect_at = e.last_heartbeat_ms + params_.heartbeat_timeout_ms;
      if (now_ms < suspect_at) continue;
      e.status = Status::Suspect;
      e.next_poll_ms = suspect_at;
    }
    // Polls go out on their nominal schedule even if this tick is late.
    while (e.poll_attempts < params_.max_polls && e.next_poll_ms <= now_ms) {
      out.push_back({MessageKind::Poll, owner_, id, owner_, now_ms});
      ++e.poll_attempts;
      e.next_poll_ms += params_.poll_spacing_ms;
    }
    if (e.poll_attempts == params_.max_polls && e.next_poll_ms <= now_ms) {
      e.status = Status::DeclaredFailed;
      declared.push_back(id);
    }
  }

  for (FlsId failed : declared) {
    for (const auto& [id, e] : neighbors_) {
      if (id != failed && e.status != Status::DeclaredFailed)
        out.push_back({MessageKind::FailureNotice, owner_, id, failed, now_ms});
    }
    out.push_back({MessageKind::FailureNotice, owner_, kOrchestrator, failed, now_ms});
  }
  return out;
}

Millis FailureDetector::next_deadline() const {
  Millis next = next_heartbeat_ms_;
  for (const auto& [id, e] : neighbors_) {
    switch (e.status) {
      case Status::Alive:
        next = std::min(next, e.last_heartbeat_ms + params_.heartbeat_timeout_ms);
        break;
      case Status::Suspect:
        next = std::min(next, e.next_poll_ms);
        break;
      case Status::DeclaredFailed:
        break;
    }
  }
  return next;
}

SelfFailureResponse on_self_failure(FailureKind kind, const FlsAgent& fls,
                                    const std::vector<FlsId>& neighbors, Millis now_ms,
                                    Millis repel_interval_ms) {
  SelfFailureResponse r;
  if (fls.role == Role::Failed || !self_detectable(kind)) return r;
  for (FlsId n : neighbors) r.messages.push_back({MessageKind::FailureNotice, fls.id, n, fls.id, now_ms});
  r.messages.push_back({MessageKind::FailureNotice, fls.id, kOrchestrator, fls.id, now_ms});
  if (kind == FailureKind::LightSource) {
    r.directive = Directive::FlyToTerminus;
  } else {
    r.directive = Directive::DescendBroadcasting;
    r.repel_interval_ms = repel_interval_ms;
    for (FlsId n : neighbors)
      r.messages.push_back({MessageKind::RepelBroadcast, fls.id, n, fls.id, now_ms});
  }
  return r;
}

}  // namespace fls::detect
