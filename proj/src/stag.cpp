#include "fls/stag.hpp"

#include <algorithm>
#include <queue>
#include <tuple>

namespace fls::stag {

namespace {

std::uint64_t ceil_div(std::uint64_t num, std::uint64_t den) { return (num + den - 1) / den; }

}  // namespace

double FlockingPlan::overhead_percent() const {
  if (alpha == 0) return 0.0;
  return 100.0 * static_cast<double>(total_extra) / static_cast<double>(alpha);
}

double min_total_fls(std::uint64_t alpha, const BatteryParams& bp) {
  bp.validate();
  const double a = static_cast<double>(alpha);
  return a + a * static_cast<double>(bp.omega_ms) / static_cast<double>(bp.beta_ms);
}

FlockSpec make_flock(std::uint32_t flock_id, std::uint32_t size, const BatteryParams& bp) {
  FlockSpec f;
  f.flock_id = flock_id;
  f.size = size;
  f.stagger = Interval{bp.beta_ms, std::max<std::int64_t>(size, 1)};
  const auto omega = static_cast<std::uint64_t>(bp.omega_ms);
  const auto beta = static_cast<std::uint64_t>(bp.beta_ms);
  f.extra = ceil_div(omega * size, beta);
  f.extra_exact = static_cast<double>(omega) * size / static_cast<double>(beta);
  return f;
}

namespace {

FlockingPlan assemble(std::uint64_t alpha, std::uint64_t full, const BatteryParams& bp) {
  FlockingPlan plan;
  plan.alpha = alpha;
  plan.full_flock_size = full;
  std::uint64_t left = alpha;
  std::uint32_t id = 1;
  while (left > 0) {
    const auto size = static_cast<std::uint32_t>(std::min(left, full));
    plan.flocks.push_back(make_flock(id++, size, bp));
    plan.sum_flock_extras += plan.flocks.back().extra;
    left -= size;
  }
  // Per-flock exact extras share the denominator beta, so their sum is
  // alpha * omega / beta and one final ceiling is exact.
  plan.total_extra = ceil_div(static_cast<std::uint64_t>(bp.omega_ms) * alpha,
                              static_cast<std::uint64_t>(bp.beta_ms));
  plan.total_fls = alpha + plan.total_extra;
  plan.in_transit_bound = 2 * plan.flocks.size();
  return plan;
}

}  // namespace

FlockingPlan plan_flocks(std::uint64_t alpha, const BatteryParams& bp, Millis s_threshold_ms) {
  bp.validate();
  if (s_threshold_ms <= 0 || s_threshold_ms > bp.beta_ms) {
    throw FlsError(ErrorCode::InvalidThreshold,
                   "S_threshold must lie in (0, beta]; got " + std::to_string(s_threshold_ms) +
                       " ms with beta " + std::to_string(bp.beta_ms) + " ms");
  }
  const auto full = static_cast<std::uint64_t>(bp.beta_ms / s_threshold_ms);
  return assemble(alpha, full, bp);
}

FlockingPlan plan_single_flock(std::uint64_t alpha, const BatteryParams& bp) {
  bp.validate();
  return assemble(alpha, std::max<std::uint64_t>(alpha, 1), bp);
}

std::vector<StaggerTarget> staggered_targets(const FlockSpec& flock, const BatteryParams& bp) {
  std::vector<StaggerTarget> out;
  out.reserve(flock.size);
  for (std::uint32_t j = 1; j <= flock.size; ++j) {
    out.push_back({j, static_cast<double>(j) * static_cast<double>(bp.beta_ms) / flock.size});
  }
  return out;
}

std::vector<BootstrapReturn> bootstrap_schedule(const FlockSpec& flock, const BatteryParams& bp) {
  std::vector<BootstrapReturn> out;
  out.reserve(flock.size);
  for (std::uint32_t j = 1; j <= flock.size; ++j) {
    out.push_back({j, j == flock.size ? bp.beta_ms : flock.stagger.at(j)});
  }
  return out;
}

Millis charge_time(Millis deficit_ms, const BatteryParams& bp) {
  if (deficit_ms < 0 || deficit_ms > bp.beta_ms)
    throw FlsError(ErrorCode::Range, "charge deficit outside [0, beta]");
  const auto num = static_cast<unsigned __int128>(bp.omega_ms) * static_cast<std::uint64_t>(deficit_ms);
  const auto den = static_cast<unsigned __int128>(bp.beta_ms);
  return static_cast<Millis>((num + den - 1) / den);
}

std::vector<SwapEvent> steady_state_swaps(const FlockingPlan& plan, Millis horizon_ms) {
  std::vector<SwapEvent> out;
  if (horizon_ms <= 0) return out;

  using Key = std::tuple<Millis, std::uint32_t, std::uint64_t>;
  std::priority_queue<Key, std::vector<Key>, std::greater<>> heap;
  std::vector<const FlockSpec*> by_id;
  for (const auto& f : plan.flocks) {
    if (f.size == 0) continue;
    if (f.flock_id >= by_id.size()) by_id.resize(f.flock_id + 1, nullptr);
    by_id[f.flock_id] = &f;
    const Millis first = f.stagger.at(1);
    if (first <= horizon_ms) heap.emplace(first, f.flock_id, 1);
  }
  while (!heap.empty()) {
    auto [t, id, seq] = heap.top();
    heap.pop();
    const FlockSpec& f = *by_id[id];
    const auto slot = static_cast<std::uint32_t>((seq - 1) % f.size + 1);
    out.push_back({t, id, seq, slot});
    const Millis next = f.stagger.at(static_cast<std::int64_t>(seq + 1));
    if (next <= horizon_ms) heap.emplace(next, id, seq + 1);
  }
  return out;
}

}  // namespace fls::stag
