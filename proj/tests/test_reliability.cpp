#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <set>

#include "fls/reliability.hpp"

using namespace fls;
using namespace fls::reliability;

namespace {

DisplayPoint pt(std::int64_t l, std::int64_t h, std::int64_t d) {
  DisplayPoint p;
  p.l = l;
  p.h = h;
  p.d = d;
  return p;
}

PointCloud cloud_of(std::vector<DisplayPoint> pts) {
  PointCloud c;
  c.points = std::move(pts);
  return c;
}

std::set<std::set<std::size_t>> as_sets(const std::vector<ReliabilityGroup>& groups) {
  std::set<std::set<std::size_t>> out;
  for (const auto& g : groups) out.insert({g.members.begin(), g.members.end()});
  return out;
}

// Minimum total pairwise distance over every partition with the grouping's
// size profile: ceil(n / G) groups, all full except possibly one.
double brute_force_optimum(const PointCloud& c, std::size_t g) {
  const std::size_t n = c.points.size();
  const std::size_t blocks = (n + g - 1) / g;
  std::vector<std::size_t> cap(blocks, g);
  cap.back() = n - g * (blocks - 1);
  std::vector<std::vector<std::size_t>> parts(blocks);
  double best = std::numeric_limits<double>::infinity();
  std::function<void(std::size_t, double)> go = [&](std::size_t i, double cost) {
    if (cost >= best) return;
    if (i == n) {
      best = cost;
      return;
    }
    std::set<std::size_t> opened;  // capacities of empty parts already tried
    for (std::size_t b = 0; b < blocks; ++b) {
      auto& part = parts[b];
      if (part.size() == cap[b]) continue;
      if (part.empty() && !opened.insert(cap[b]).second) continue;
      double add = 0.0;
      for (auto j : part) add += distance(position_of(c.points[i]), position_of(c.points[j]));
      part.push_back(i);
      go(i + 1, cost + add);
      part.pop_back();
    }
  };
  go(0, 0.0);
  return best;
}

}  // namespace

TEST_CASE("mtdi_naive") {
  CHECK(mtdi_naive(720, 65321) * 3600.0 == doctest::Approx(39.681).epsilon(1e-4));
  CHECK(mtdi_naive(720, 1) == doctest::Approx(720.0));
  CHECK(mtdi_naive(100, 4) == doctest::Approx(25.0));
  try {
    mtdi_naive(720, 0);
    FAIL("alpha 0 accepted");
  } catch (const FlsError& e) {
    CHECK(e.code() == ErrorCode::UndefinedMtdi);
  }
}

TEST_CASE("mttf_group against hand evaluation") {
  // (MTTF / (G + 1))^2 / MTTR with MTTR converted to hours.
  const double g10 = std::pow(720.0 / 11.0, 2) / (1.0 / 3600.0);
  const double g20 = std::pow(720.0 / 21.0, 2) / (1.0 / 3600.0);
  CHECK(mttf_group({720, 1, 10}) == doctest::Approx(g10).epsilon(1e-12));
  CHECK(mttf_group({720, 1, 20}) == doctest::Approx(g20).epsilon(1e-12));
  CHECK(g10 == doctest::Approx(1.5423e7).epsilon(1e-4));
  CHECK(g20 == doctest::Approx(4.2318e6).epsilon(1e-4));

  // P = 1 boundary: repair time equals MTTF / (G + 1).
  const double mttr_s = 720.0 / 11.0 * 3600.0;
  CHECK(p_double_failure({720, mttr_s, 10}) == doctest::Approx(1.0));
  CHECK(mttf_group({720, mttr_s, 10}) == doctest::Approx(720.0 / 11.0));
  try {
    mttf_group({720, mttr_s * 1.01, 10});
    FAIL("P > 1 accepted");
  } catch (const FlsError& e) {
    CHECK(e.code() == ErrorCode::ModelDomain);
  }
}

TEST_CASE("mtdi_grouped report") {
  const auto r10 = mtdi_grouped({720, 1, 10}, 65321);
  CHECK(r10.standby_count == 6533);
  CHECK(r10.total_fls == 65321 + 6533);
  CHECK(r10.overhead_fraction == doctest::Approx(0.1).epsilon(1e-3));
  CHECK(r10.mtdi_grouped_hours == doctest::Approx(10.0 * mttf_group({720, 1, 10}) / 65321.0));
  CHECK(r10.mtdi_grouped_hours == doctest::Approx(2361.0).epsilon(1e-3));

  const auto r20 = mtdi_grouped({720, 1, 20}, 65321);
  CHECK(r20.standby_count == 3267);
  CHECK(r20.total_fls == 68588);
  CHECK(r20.mtdi_grouped_hours == doctest::Approx(1296.0).epsilon(1e-3));

  const auto one = mtdi_grouped({720, 1, 50}, 50);
  CHECK(one.standby_count == 1);
  CHECK(one.overhead_fraction == doctest::Approx(1.0 / 50.0));
}

TEST_CASE("MTDI monotonicity and divergence") {
  double prev = std::numeric_limits<double>::infinity();
  for (double mttr : {0.5, 1.0, 2.0, 10.0, 60.0}) {
    const double v = mtdi_grouped({720, mttr, 10}, 1000).mtdi_grouped_hours;
    CHECK(v < prev);
    prev = v;
  }
  prev = std::numeric_limits<double>::infinity();
  for (std::uint64_t alpha : {10u, 100u, 1000u, 65321u}) {
    const double v = mtdi_grouped({720, 1, 10}, alpha).mtdi_grouped_hours;
    CHECK(v < prev);
    prev = v;
  }
  prev = std::numeric_limits<double>::infinity();
  for (std::uint32_t g : {1u, 2u, 5u, 10u, 20u}) {
    const double v = mttf_group({720, 1, g});
    CHECK(v < prev);
    prev = v;
  }
  CHECK(mtdi_grouped({720, 1e-9, 10}, 65321).mtdi_grouped_hours > 1e12);
}

TEST_CASE("form_groups examples") {
  const auto line = cloud_of({pt(0, 0, 0), pt(1, 0, 0), pt(2, 0, 0), pt(3, 0, 0)});
  CHECK(as_sets(form_groups(line, 2)) == std::set<std::set<std::size_t>>{{0, 1}, {2, 3}});

  const auto single = form_groups(cloud_of({pt(4, 4, 4)}), 5);
  REQUIRE(single.size() == 1);
  CHECK(single[0].members.size() == 1);
  CHECK(single[0].standby_position == Vec3{4, 4, 4});

  const auto triangles = cloud_of({pt(0, 0, 0), pt(50, 0, 0), pt(1, 0, 0), pt(51, 0, 0), pt(0, 1, 0),
                                   pt(50, 1, 0)});
  CHECK(as_sets(form_groups(triangles, 3)) == std::set<std::set<std::size_t>>{{0, 2, 4}, {1, 3, 5}});

  const auto pair = form_groups(cloud_of({pt(0, 0, 0), pt(2, 0, 0)}), 2);
  REQUIRE(pair.size() == 1);
  CHECK(pair[0].standby_position == Vec3{1, 0, 0});
}

TEST_CASE("form_groups covers the cloud exactly once") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    std::set<std::tuple<std::int64_t, std::int64_t, std::int64_t>> cells;
    const std::size_t n = 1 + rng() % 200;
    std::vector<DisplayPoint> pts;
    while (pts.size() < n) {
      const auto p = pt(rng() % 20, rng() % 20, rng() % 20);
      if (cells.insert({p.l, p.h, p.d}).second) pts.push_back(p);
    }
    const auto g = static_cast<std::uint32_t>(1 + rng() % 12);
    const auto groups = form_groups(cloud_of(pts), g);
    CHECK(groups.size() == (n + g - 1) / g);
    std::vector<int> seen(n, 0);
    std::size_t small = 0;
    for (const auto& grp : groups) {
      CHECK(grp.members.size() >= 1);
      CHECK(grp.members.size() <= g);
      if (grp.members.size() < g) ++small;
      for (auto m : grp.members) ++seen[m];
    }
    CHECK(small <= 1);
    CHECK(std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; }));
  }
}

TEST_CASE("form_groups stays near the brute-force optimum on small clouds") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    std::set<std::tuple<std::int64_t, std::int64_t, std::int64_t>> cells;
    const std::size_t n = 1 + rng() % 9;
    std::vector<DisplayPoint> pts;
    while (pts.size() < n) {
      const auto p = pt(rng() % 8, rng() % 8, rng() % 8);
      if (cells.insert({p.l, p.h, p.d}).second) pts.push_back(p);
    }
    const auto c = cloud_of(pts);
    for (std::uint32_t g = 1; g <= 3; ++g) {
      const auto groups = form_groups(c, g);
      const double greedy = intra_group_distance(c, groups);
      const double best = brute_force_optimum(c, g);
      CAPTURE(trial);
      CAPTURE(g);
      CHECK(greedy <= 1.25 * best + 1e-9);
    }
  }
}

TEST_CASE("parity encode examples") {
  const Blob b = {1, 2, 3};
  CHECK(parity_encode(std::vector<Blob>{b}) == b);
  CHECK(parity_encode(std::vector<Blob>{b, b}) == Blob{0, 0, 0});
  CHECK(parity_encode(std::vector<Blob>{{0x0F}, {0xF0}, {0xFF}}) == Blob{0x00});
  CHECK(parity_encode(std::vector<Blob>{{0xAA}, {0x01, 0x02}}) == Blob{0xAB, 0x02});
  try {
    parity_encode(std::vector<Blob>{});
    FAIL("empty accepted");
  } catch (const FlsError& e) {
    CHECK(e.code() == ErrorCode::EmptyInput);
  }
}

TEST_CASE("parity reconstruct restores the original length") {
  const Blob a = {1, 2, 3, 4}, b = {9}, c = {7, 7};
  const std::vector<Blob> all = {a, b, c};
  const auto parity = parity_encode(all);
  CHECK(parity_reconstruct(parity, std::vector<Blob>{a, b}, c.size()) == c);
  CHECK(parity_reconstruct(parity, std::vector<Blob>{a, c}, b.size()) == b);
  CHECK(parity_reconstruct(parity_encode(std::vector<Blob>{a}), std::vector<Blob>{}, a.size()) == a);
}

TEST_CASE("parity round trip over random groups") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t g = 1 + rng() % 8;
    std::vector<Blob> blobs(g);
    for (auto& bl : blobs) {
      bl.resize(rng() % 64);
      for (auto& byte : bl) byte = static_cast<std::uint8_t>(rng());
    }
    const auto parity = parity_encode(blobs);
    for (std::size_t m = 0; m < g; ++m) {
      std::vector<Blob> rest;
      for (std::size_t k = 0; k < g; ++k)
        if (k != m) rest.push_back(blobs[k]);
      CHECK(parity_reconstruct(parity, rest, blobs[m].size()) == blobs[m]);
    }
  }
}

TEST_CASE("GroupPayloads under both schemes") {
  const std::vector<Blob> members = {{1, 2}, {3}, {4, 5, 6}};
  const GroupPayloads parity(Scheme::Parity, members);
  CHECK(parity.standby_parity() == parity_encode(members));
  const std::vector<std::size_t> one = {1};
  CHECK(parity.recover(1, std::vector<Blob>{members[0], members[2]}, one) == members[1]);
  const std::vector<std::size_t> two = {0, 1};
  try {
    parity.recover(1, std::vector<Blob>{members[2]}, two);
    FAIL("double failure reconstructed");
  } catch (const FlsError& e) {
    CHECK(e.code() == ErrorCode::MultiFailure);
  }

  const GroupPayloads copies(Scheme::Replication, members);
  CHECK(copies.standby_copies() == members);
  CHECK(copies.recover(2, std::vector<Blob>{}, two) == members[2]);
}
