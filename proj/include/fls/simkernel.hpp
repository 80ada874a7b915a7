#pragma once

// Deterministic discrete-event simulator of an FLS display: dispatchers,
// charging stations with hangars, STAG swaps, reliability-group standbys,
// failure injection with heartbeat detection, and the GC / Terminus pipeline.

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "fls/failure_detect.hpp"
#include "fls/model.hpp"
#include "fls/reliability.hpp"
#include "fls/stag.hpp"

namespace fls::sim {

using reliability::Scheme;
using reliability::Vec3;

enum class SwapPolicy {
  Auto,          // StandbyFirst when groups are formed, otherwise Predispatch
  Predispatch,   // replacement timed to arrive as the depleted FLS leaves
  StandbyFirst,  // group standby covers the departure, replacement sent on departure
};

struct SimConfig {
  PointCloud cloud;
  BatteryParams battery;
  Millis s_threshold_ms = 0;
  std::optional<ReliabilityParams> reliability;  // groups are formed when set
  Scheme scheme = Scheme::Parity;
  std::vector<Vec3> dispatcher_positions;  // default: one below the display
  std::vector<Vec3> charger_positions;     // default: one below the display
  std::uint32_t charger_slots = 0;         // per station; 0 = STAG charging population
  std::optional<double> fls_speed;         // cells per second
  detect::DetectorParams detector;
  bool failure_injection = false;
  std::optional<double> mttf_hours;        // overrides reliability->mttf_hours
  Millis horizon_ms = 0;
  std::uint64_t seed = 1;
  Millis onset_tolerance_ms = 100;
  bool standby_depletes = true;
  Millis gc_delay_ms = 30 * kMillisPerSecond;
  Millis recovery_delay_ms = 60 * kMillisPerSecond;
  double dispatcher_rate = 0.0;            // FLS per second per dispatcher; 0 = unbounded
  std::optional<std::uint32_t> spare_fls;  // hangar inventory for failure replacements
  SwapPolicy swap_policy = SwapPolicy::Auto;
  bool record_census = true;
};

enum class EventKind : std::uint8_t {
  Deploy,
  ArriveAtPoint,
  BatteryThresholdReached,
  ArriveAtCharger,
  ChargeComplete,
  HeartbeatTick,
  FailureInjected,
  StandbySubstitute,
  ReplacementArrived,
  GcPickup,
  TerminusRecover,
  StandbyReturn,
  Count,
};

const char* event_name(EventKind k);

struct SimEvent {
  Millis time_ms = 0;
  std::uint64_t sequence = 0;
  EventKind kind = EventKind::Deploy;
  std::uint32_t subject = 0;  // FLS id, or detector index for heartbeat ticks
  std::uint32_t target = 0;   // post or station index
  std::uint32_t epoch = 0;

  bool operator>(const SimEvent& o) const {
    return time_ms != o.time_ms ? time_ms > o.time_ms : sequence > o.sequence;
  }
};

struct Census {
  std::uint32_t illuminating = 0;
  std::uint32_t standby = 0;
  std::uint32_t transit = 0;  // dark flights between chargers and the display
  std::uint32_t charging = 0;
  std::uint32_t hangar = 0;
  std::uint32_t failed = 0;
  std::uint32_t first_deployment = 0;

  std::uint64_t total() const {
    return std::uint64_t{illuminating} + standby + transit + charging + hangar + failed +
           first_deployment;
  }
  friend bool operator==(const Census&, const Census&) = default;
};

struct CensusSample {
  Millis time_ms = 0;
  Census census;
};

/// A display point dark with no standby engaged for it, over [start, end).
struct DarkInterval {
  std::uint32_t point = 0;
  Millis start_ms = 0;
  Millis end_ms = 0;
};

struct FailureRecord {
  Millis time_ms = 0;
  FlsId fls = 0;
  detect::FailureKind kind = detect::FailureKind::Rotor;
  friend bool operator==(const FailureRecord&, const FailureRecord&) = default;
};

struct SwapRecord {
  Millis time_ms = 0;
  std::uint32_t flock_id = 0;
  std::uint32_t point = 0;
};

struct SimTotals {
  std::uint64_t events = 0;
  std::uint64_t deploys = 0;
  std::uint64_t swaps = 0;
  std::uint64_t failures = 0;
  std::uint64_t detections = 0;
  std::uint64_t failure_notices = 0;
  std::uint64_t standby_substitutions = 0;
  std::uint64_t reconstructions = 0;
  std::uint64_t reconstruction_mismatches = 0;
  std::uint64_t multi_failure_waits = 0;
  std::uint64_t late_replacements = 0;
  std::uint64_t charges = 0;
};

struct SimMetrics {
  std::uint64_t seed = 0;
  Millis horizon_ms = 0;
  std::uint64_t pool_size = 0;
  std::uint32_t flocks = 0;          // h over point and standby flocks
  std::uint32_t transit_bound = 0;   // 2h
  std::uint32_t max_transit = 0;
  std::vector<Millis> onset_times_ms;
  std::vector<Millis> empirical_mtdi_samples_ms;
  std::vector<CensusSample> census;  // recorded when a batch changes it
  std::vector<DarkInterval> dark_intervals;
  std::vector<Millis> swap_gap_samples_ms;
  std::vector<Millis> repair_time_samples_ms;
  std::vector<FailureRecord> failures;
  std::vector<SwapRecord> swaps;
  std::uint64_t conservation_checks = 0;
  std::uint64_t conservation_failures = 0;
  std::array<std::uint64_t, static_cast<std::size_t>(EventKind::Count)> event_counts{};
  SimTotals totals;
  std::vector<std::string> warnings;
};

/// Deterministic per-FLS failure stream keyed by (seed, fls id).
class FailureStream {
 public:
  FailureStream(std::uint64_t seed, FlsId id);
  /// Exponential time to the next failure, at least 1 ms.
  Millis next_interval(double mttf_hours);
  detect::FailureKind next_kind();

 private:
  std::mt19937_64 rng_;
};

/// Renewal failure process of every FLS in `population` up to the horizon,
/// merged in time order (ties by FLS id).
std::vector<FailureRecord> inject_failures(std::uint64_t seed, std::span<const FlsId> population,
                                           double mttf_hours, Millis horizon_ms);

struct OnsetReport {
  std::vector<Millis> onset_times_ms;
  std::vector<Millis> inter_onset_ms;
};

/// An onset is the instant an uncovered dark interval outlasts the tolerance.
OnsetReport degraded_onset_detector(std::span<const DarkInterval> intervals, Millis tolerance_ms);

class Simulation {
 public:
  /// Validates the configuration and stages the first deployment. Throws
  /// FlsError(Infeasible) when chargers cannot sustain the swap rate.
  explicit Simulation(SimConfig config);
  ~Simulation();
  Simulation(Simulation&&) noexcept;
  Simulation& operator=(Simulation&&) noexcept;

  /// Processes every event with time <= t (capped at the horizon).
  void run_until(Millis t);
  /// Runs to the horizon and returns the finished metrics.
  SimMetrics finish();

  Millis now() const;
  const stag::FlockingPlan& point_plan() const;
  const SimMetrics& metrics() const;
  Census census() const;
  double fls_speed() const;

  /// Remaining flight of the FLSs currently illuminating their own point in
  /// the given point flock, sorted ascending.
  std::vector<Millis> remaining_flight(std::uint32_t flock_id) const;

  /// Public view of every FLS at the current instant.
  std::vector<FlsAgent> agents() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Runs one configuration to its horizon.
SimMetrics run(const SimConfig& config);

/// Independent replications differing only in seed; results sorted by seed.
std::vector<SimMetrics> run_replications(const SimConfig& config, std::span<const std::uint64_t> seeds);

}  // namespace fls::sim
