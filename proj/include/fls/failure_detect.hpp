#pragma once

// Heartbeat / poll failure detection run by each FLS against its display-mesh
// neighbours, plus the self-announcement path for failures an FLS can sense.

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "fls/model.hpp"

namespace fls::detect {

struct DetectorParams {
  Millis heartbeat_period_ms = 1000;
  Millis heartbeat_timeout_ms = 1500;
  std::uint32_t max_polls = 3;
  Millis poll_spacing_ms = 500;

  /// Worst-case delay from a neighbour's last heartbeat to its declaration.
  Millis detection_bound_ms() const {
    return heartbeat_timeout_ms + static_cast<Millis>(max_polls) * poll_spacing_ms;
  }
  void validate() const;
};

enum class Status { Alive, Suspect, DeclaredFailed };

const char* status_name(Status s);

/// Destination used for messages addressed to the Orchestrator (Hub).
constexpr FlsId kOrchestrator = 0xffffffffu;

enum class MessageKind { Heartbeat, Poll, FailureNotice, RepelBroadcast };

struct Message {
  MessageKind kind = MessageKind::Heartbeat;
  FlsId from = 0;
  FlsId to = 0;
  FlsId subject = 0;  // failed FLS for notices, otherwise the sender
  Millis time_ms = 0;
  friend bool operator==(const Message&, const Message&) = default;
};

struct NeighborEntry {
  Millis last_heartbeat_ms = 0;
  std::uint32_t missed_count = 0;
  std::uint32_t poll_attempts = 0;
  Millis next_poll_ms = 0;
  Status status = Status::Alive;
};

/// State machine owned by one FLS. Status moves alive -> suspect ->
/// (alive | declared_failed); declared_failed only leaves via reset().
class FailureDetector {
 public:
  FailureDetector(FlsId owner, DetectorParams params, Millis start_ms = 0);

  FlsId owner() const { return owner_; }
  const DetectorParams& params() const { return params_; }

  void add_neighbor(FlsId id, Millis now_ms);
  void remove_neighbor(FlsId id);
  const NeighborEntry* neighbor(FlsId id) const;
  const std::map<FlsId, NeighborEntry>& neighbors() const { return neighbors_; }

  void on_heartbeat(FlsId from, Millis now_ms);
  void on_poll_reply(FlsId from, Millis now_ms);

  /// Orchestrator confirmed a replacement at this neighbour's point.
  void reset(FlsId id, Millis now_ms);

  /// Advances to `now_ms` (must not go backwards) and returns the messages
  /// emitted: heartbeats every period, polls to silent neighbours, and one
  /// failure notice per declared neighbour addressed to every other neighbour
  /// and the Orchestrator.
  std::vector<Message> on_tick(Millis now_ms);

  /// Earliest instant at which on_tick has something to do.
  Millis next_deadline() const;

 private:
  void revive(NeighborEntry& e, Millis now_ms);

  FlsId owner_;
  DetectorParams params_;
  Millis last_tick_ms_;
  Millis next_heartbeat_ms_;
  std::map<FlsId, NeighborEntry> neighbors_;
};

enum class FailureKind { Rotor, LightSource, Compute, Battery };

const char* failure_kind_name(FailureKind k);

/// Light-source and rotor failures are sensed by the FLS itself; compute and
/// battery failures are left to neighbour heartbeats.
bool self_detectable(FailureKind k);

enum class Directive { None, FlyToTerminus, DescendBroadcasting };

struct SelfFailureResponse {
  Directive directive = Directive::None;
  std::vector<Message> messages;
  Millis repel_interval_ms = 0;  // period of repel broadcasts while descending
};

/// Reaction of an FLS that senses its own failure. An already failed FLS, or
/// a failure kind it cannot sense, yields no directive and no messages.
SelfFailureResponse on_self_failure(FailureKind kind, const FlsAgent& fls,
                                    const std::vector<FlsId>& neighbors, Millis now_ms,
                                    Millis repel_interval_ms = 250);

}  // namespace fls::detect
