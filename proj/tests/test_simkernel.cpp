#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <vector>

#include "fls/ingest.hpp"
#include "fls/simkernel.hpp"

using namespace fls;
using namespace fls::sim;

namespace {

SimConfig example_one() {
  SimConfig c;
  c.cloud = ingest::synth(ingest::SynthKind::Grid, 5, 5, 1);
  c.battery = BatteryParams::from_minutes(15, 5);
  c.s_threshold_ms = 3 * kMillisPerMinute;
  c.horizon_ms = 60 * kMillisPerMinute;
  c.fls_speed = 1e9;
  return c;
}

SimConfig failing(std::uint64_t alpha, double mttf, Millis horizon) {
  SimConfig c;
  c.cloud = ingest::synth(ingest::SynthKind::Grid, alpha, 10, 1);
  c.battery = BatteryParams::from_minutes(15, 5);
  c.s_threshold_ms = kMillisPerMinute;
  c.failure_injection = true;
  c.mttf_hours = mttf;
  c.horizon_ms = horizon;
  return c;
}

}  // namespace

TEST_CASE("zero horizon runs nothing") {
  auto c = example_one();
  c.horizon_ms = 0;
  const auto m = run(c);
  CHECK(m.totals.events == 0);
  CHECK(m.onset_times_ms.empty());
  CHECK(m.swaps.empty());
  CHECK(m.failures.empty());
}

TEST_CASE("single-point flocks keep an exact stagger") {
  Simulation s(example_one());
  const auto& plan = s.point_plan();
  CHECK(plan.h() == 1);
  CHECK(plan.flocks[0].size == 5);
  for (Millis t = 15 * kMillisPerMinute; t <= 60 * kMillisPerMinute; t += 37 * kMillisPerSecond) {
    s.run_until(t);
    const auto r = s.remaining_flight(1);
    REQUIRE(r.size() == 5);
    for (std::size_t i = 1; i < r.size(); ++i) CHECK(r[i] - r[i - 1] == 180000);
  }
  const auto m = s.finish();
  REQUIRE(m.swaps.size() == 20);
  for (std::size_t i = 0; i < m.swaps.size(); ++i)
    CHECK(m.swaps[i].time_ms == static_cast<Millis>(i + 1) * 180000);
  CHECK(m.max_transit == 0);
  CHECK(m.onset_times_ms.empty());
}

TEST_CASE("transit never exceeds two per flock without failures") {
  struct Case {
    std::uint64_t alpha;
    Millis threshold;
  };
  for (auto [alpha, thr] : {Case{5, 180000}, Case{5, 300000}, Case{300, 3000}, Case{300, 30000}}) {
    SimConfig c;
    c.cloud = ingest::synth(ingest::SynthKind::Grid, alpha, 20, 1);
    c.battery = BatteryParams::from_minutes(15, 5);
    c.s_threshold_ms = thr;
    c.horizon_ms = 2 * 3600 * kMillisPerSecond;
    const auto m = run(c);
    CAPTURE(alpha);
    CAPTURE(thr);
    CHECK(m.transit_bound == 2 * m.flocks);
    CHECK(m.max_transit <= m.transit_bound);
    CHECK(m.onset_times_ms.empty());
    CHECK(m.totals.late_replacements == 0);
    CHECK(m.conservation_checks > 0);
    CHECK(m.conservation_failures == 0);
  }
}

TEST_CASE("the FLS population is conserved under failures and groups") {
  auto c = failing(50, 5, 20 * 3600 * kMillisPerSecond);
  c.reliability = ReliabilityParams{5, 60, 5};
  const auto m = run(c);
  CHECK(m.totals.failures > 0);
  CHECK(m.conservation_failures == 0);
  CHECK(m.totals.reconstruction_mismatches == 0);
  CHECK(m.totals.reconstructions > 0);
  for (const auto& s : m.census) CHECK(s.census.total() == m.pool_size);
}

TEST_CASE("failure streams") {
  std::vector<FlsId> one = {7};
  const auto trace = inject_failures(3, one, 720, 10000LL * 720 * 3600 * kMillisPerSecond);
  REQUIRE(trace.size() > 9000);
  const double mean_h = static_cast<double>(trace.back().time_ms) / trace.size() / 3.6e6;
  CHECK(mean_h == doctest::Approx(720).epsilon(0.03));
  CHECK(inject_failures(3, one, 720, 3600) == inject_failures(3, one, 720, 3600));

  std::vector<FlsId> many(100);
  std::iota(many.begin(), many.end(), 0);
  const auto merged = inject_failures(1, many, 1, 10 * 3600 * kMillisPerSecond);
  CHECK(std::is_sorted(merged.begin(), merged.end(), [](const auto& a, const auto& b) {
    return a.time_ms != b.time_ms ? a.time_ms < b.time_ms : a.fls < b.fls;
  }));
  CHECK(inject_failures(1, std::vector<FlsId>{}, 1, 1000000).empty());
}

TEST_CASE("failure injection needs an MTTF") {
  auto c = example_one();
  c.failure_injection = true;
  CHECK_THROWS_AS(Simulation{c}, FlsError);
  c.failure_injection = false;
  c.mttf_hours = 1;
  CHECK(run(c).failures.empty());
}

TEST_CASE("runs are deterministic per seed") {
  auto c = failing(30, 2, 5 * 3600 * kMillisPerSecond);
  const auto a = run(c), b = run(c);
  CHECK(a.failures == b.failures);
  CHECK(a.onset_times_ms == b.onset_times_ms);
  CHECK(a.census.size() == b.census.size());
  CHECK(a.totals.events == b.totals.events);
  c.seed = 2;
  CHECK(run(c).failures != a.failures);

  const std::vector<std::uint64_t> seeds = {5, 1, 3};
  const auto reps = run_replications(c, seeds);
  REQUIRE(reps.size() == 3);
  CHECK(reps[0].seed == 1);
  CHECK(reps[2].seed == 5);
  c.seed = 3;
  CHECK(reps[1].failures == run(c).failures);
}

TEST_CASE("without standbys every failure darkens its point once") {
  bool found = false;
  for (std::uint64_t seed = 1; seed < 300 && !found; ++seed) {
    auto c = failing(5, 10, 2 * 3600 * kMillisPerSecond);
    c.seed = seed;
    const auto m = run(c);
    if (m.failures.size() != 1) continue;
    found = true;
    CHECK(m.onset_times_ms.size() == 1);
    CHECK(m.onset_times_ms[0] == m.failures[0].time_ms + c.onset_tolerance_ms);
  }
  CHECK(found);

  const auto m = run(failing(50, 5, 30 * 3600 * kMillisPerSecond));
  for (const auto& d : m.dark_intervals) {
    if (d.end_ms - d.start_ms <= 100) continue;
    CHECK(std::any_of(m.failures.begin(), m.failures.end(),
                      [&](const FailureRecord& f) { return f.time_ms == d.start_ms; }));
  }
}

TEST_CASE("onset detector") {
  const std::vector<DarkInterval> iv = {{0, 1000, 1050}, {1, 2000, 5000}, {2, 9000, 9101}};
  const auto r = degraded_onset_detector(iv, 100);
  CHECK(r.onset_times_ms == std::vector<Millis>{2100, 9100});
  CHECK(r.inter_onset_ms == std::vector<Millis>{7000});
}

TEST_CASE("chargers that cannot keep up are rejected") {
  auto c = example_one();
  c.cloud = ingest::synth(ingest::SynthKind::Grid, 300, 10, 1);
  c.s_threshold_ms = 3000;
  c.charger_slots = 1;
  try {
    Simulation s(c);
    FAIL("infeasible configuration accepted");
  } catch (const FlsError& e) {
    CHECK(e.code() == ErrorCode::Infeasible);
  }
}

TEST_CASE("agents are consistent with the census") {
  Simulation s(example_one());
  s.run_until(20 * kMillisPerMinute);
  const auto agents = s.agents();
  const auto census = s.census();
  CHECK(agents.size() == census.total());
  std::size_t lit = 0;
  for (const auto& a : agents) {
    CHECK_NOTHROW(a.validate(BatteryParams::from_minutes(15, 5)));
    lit += a.role == Role::Illuminating;
  }
  CHECK(lit == census.illuminating);
}
