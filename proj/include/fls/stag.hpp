#pragma once

// STAG planner: flock partitioning, staggered flight-time targets, the
// first-deployment bootstrap schedule and the steady-state swap schedule.

#include <cstdint>
#include <vector>

#include "fls/model.hpp"

namespace fls::stag {

/// Exact stagger interval beta / alpha_i kept as a rational in milliseconds.
struct Interval {
  Millis num_ms = 0;
  std::int64_t den = 1;

  double ms() const { return static_cast<double>(num_ms) / static_cast<double>(den); }
  /// floor(k * num / den); exact whenever den divides k * num.
  Millis at(std::int64_t k) const { return (k * num_ms) / den; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

struct FlockSpec {
  std::uint32_t flock_id = 1;
  std::uint32_t size = 0;        // alpha_i
  Interval stagger;              // S_i = beta / alpha_i
  std::uint64_t extra = 0;       // ceil(omega * alpha_i / beta)
  double extra_exact = 0.0;      // omega * alpha_i / beta before rounding
  friend bool operator==(const FlockSpec&, const FlockSpec&) = default;
};

struct FlockingPlan {
  std::vector<FlockSpec> flocks;
  std::uint64_t alpha = 0;
  std::uint64_t full_flock_size = 0;  // floor(beta / S_threshold)
  // ceil of the un-rounded per-flock extras; equals ceil(alpha * omega / beta).
  std::uint64_t total_extra = 0;
  // Sum of the per-flock integer extras.
  std::uint64_t sum_flock_extras = 0;
  std::uint64_t total_fls = 0;
  std::uint64_t in_transit_bound = 0;

  std::size_t h() const { return flocks.size(); }
  double overhead_percent() const;
  friend bool operator==(const FlockingPlan&, const FlockingPlan&) = default;
};

/// Minimum swarm size alpha + alpha * omega / beta, un-rounded.
double min_total_fls(std::uint64_t alpha, const BatteryParams& bp);

/// Builds a flock for alpha_i FLSs with its interval and extras.
FlockSpec make_flock(std::uint32_t flock_id, std::uint32_t size, const BatteryParams& bp);

/// Partitions alpha FLSs into flocks of floor(beta / S_threshold) plus a
/// remainder flock. Throws FlsError(InvalidThreshold) unless
/// 0 < S_threshold <= beta.
FlockingPlan plan_flocks(std::uint64_t alpha, const BatteryParams& bp, Millis s_threshold_ms);

/// One flock holding every FLS (h = 1).
FlockingPlan plan_single_flock(std::uint64_t alpha, const BatteryParams& bp);

struct StaggerTarget {
  std::uint32_t stag_id = 0;
  double remaining_ms = 0.0;
  friend bool operator==(const StaggerTarget&, const StaggerTarget&) = default;
};

/// Remaining flight j * beta / alpha_i for j in 1..alpha_i.
std::vector<StaggerTarget> staggered_targets(const FlockSpec& flock, const BatteryParams& bp);

struct BootstrapReturn {
  std::uint32_t stag_id = 0;
  Millis return_ms = 0;  // after the flock starts illuminating
  friend bool operator==(const BootstrapReturn&, const BootstrapReturn&) = default;
};

/// First deployment: FLS j flies back after illuminating j * S_i.
std::vector<BootstrapReturn> bootstrap_schedule(const FlockSpec& flock, const BatteryParams& bp);

/// Charge time for a battery missing `deficit_ms` of flight: omega * deficit / beta,
/// rounded up to the next millisecond. Requires 0 <= deficit <= beta.
Millis charge_time(Millis deficit_ms, const BatteryParams& bp);

struct SwapEvent {
  Millis time_ms = 0;
  std::uint32_t flock_id = 0;
  std::uint64_t sequence = 0;  // 1-based swap count within the flock
  std::uint32_t stag_slot = 0; // slot whose FLS departs
  friend bool operator==(const SwapEvent&, const SwapEvent&) = default;
};

/// Every flock swaps once per S_i; merged in (time, flock_id, sequence) order.
/// Events at exactly the horizon are included.
std::vector<SwapEvent> steady_state_swaps(const FlockingPlan& plan, Millis horizon_ms);

}  // namespace fls::stag
