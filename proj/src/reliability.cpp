#include "fls/reliability.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

namespace fls::reliability {

const char* scheme_name(Scheme s) { return s == Scheme::Parity ? "parity" : "replication"; }

double distance(const Vec3& a, const Vec3& b) {
  const double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

Vec3 position_of(const DisplayPoint& p) {
  return {static_cast<double>(p.l), static_cast<double>(p.h), static_cast<double>(p.d)};
}

namespace {

std::uint64_t spread_bits(std::uint64_t v) {
  v &= 0x1fffff;
  v = (v | v << 32) & 0x1f00000000ffffULL;
  v = (v | v << 16) & 0x1f0000ff0000ffULL;
  v = (v | v << 8) & 0x100f00f00f00f00fULL;
  v = (v | v << 4) & 0x10c30c30c30c30c3ULL;
  v = (v | v << 2) & 0x1249249249249249ULL;
  return v;
}

}  // namespace

std::uint64_t morton_code(std::int64_t l, std::int64_t h, std::int64_t d) {
  return spread_bits(static_cast<std::uint64_t>(l)) |
         spread_bits(static_cast<std::uint64_t>(h)) << 1 |
         spread_bits(static_cast<std::uint64_t>(d)) << 2;
}

namespace {

Vec3 centroid(const std::vector<DisplayPoint>& pts, const std::vector<std::size_t>& members) {
  Vec3 c;
  for (std::size_t m : members) {
    const Vec3 p = position_of(pts[m]);
    c.x += p.x;
    c.y += p.y;
    c.z += p.z;
  }
  const double k = static_cast<double>(members.size());
  return {c.x / k, c.y / k, c.z / k};
}

// Best split of the members of `parts` into groups of their current sizes,
// by branch and bound over the union. Returns true if the split improved.
template <class Dist>
bool resplit(const std::vector<std::vector<std::size_t>*>& parts, Dist d) {
  std::vector<std::size_t> u, cap;
  for (auto* p : parts) {
    u.insert(u.end(), p->begin(), p->end());
    cap.push_back(p->size());
  }
  const std::size_t n = u.size(), k = parts.size();
  std::vector<double> w(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) w[i * n + j] = i == j ? 0.0 : d(u[i], u[j]);

  double current = 0.0;
  for (std::size_t i = 0, base = 0; i < k; base += cap[i], ++i)
    for (std::size_t x = base; x < base + cap[i]; ++x)
      for (std::size_t y = x + 1; y < base + cap[i]; ++y) current += w[x * n + y];

  std::vector<std::vector<std::size_t>> cur(k), best;
  double best_cost = current - 1e-9;
  auto go = [&](auto&& self, std::size_t i, double cost) -> void {
    if (cost >= best_cost) return;
    if (i == n) {
      best_cost = cost;
      best = cur;
      return;
    }
    for (std::size_t g = 0; g < k; ++g) {
      if (cur[g].size() == cap[g]) continue;
      // Empty groups of equal size are interchangeable.
      bool dup = false;
      for (std::size_t h = 0; h < g && !dup; ++h) dup = cur[h].empty() && cur[g].empty() && cap[h] == cap[g];
      if (dup) continue;
      double add = 0.0;
      for (auto j : cur[g]) add += w[i * n + j];
      cur[g].push_back(i);
      self(self, i + 1, cost + add);
      cur[g].pop_back();
    }
  };
  go(go, 0, 0.0);
  if (best.empty()) return false;
  for (std::size_t g = 0; g < k; ++g) {
    parts[g]->clear();
    for (auto i : best[g]) parts[g]->push_back(u[i]);
  }
  return true;
}

// First-improvement member exchanges between A and B. Distance sums are
// cached and rebuilt only after an accepted exchange.
template <class Dist>
bool swap_members(std::vector<std::size_t>& A, std::vector<std::size_t>& B, Dist d) {
  std::vector<double> in_a(A.size()), to_b(A.size()), in_b(B.size()), to_a(B.size());
  auto rebuild = [&] {
    for (std::size_t i = 0; i < A.size(); ++i) {
      in_a[i] = to_b[i] = 0.0;
      for (auto m : A) in_a[i] += m == A[i] ? 0.0 : d(A[i], m);
      for (auto m : B) to_b[i] += d(A[i], m);
    }
    for (std::size_t j = 0; j < B.size(); ++j) {
      in_b[j] = to_a[j] = 0.0;
      for (auto m : B) in_b[j] += m == B[j] ? 0.0 : d(B[j], m);
      for (auto m : A) to_a[j] += d(B[j], m);
    }
  };
  rebuild();
  bool changed = false;
  for (std::size_t i = 0; i < A.size(); ++i) {
    for (std::size_t j = 0; j < B.size(); ++j) {
      const double dxy = d(A[i], B[j]);
      const double gain = in_a[i] + in_b[j] - (to_a[j] - dxy) - (to_b[i] - dxy);
      if (gain > 1e-9) {
        std::swap(A[i], B[j]);
        rebuild();
        changed = true;
      }
    }
  }
  return changed;
}

// Greedy seeding strands late points far from each other. Exchanging members
// between nearby groups while the total distance drops repairs most of that;
// sizes never change, so the group count and the short last group survive.
void refine(const std::vector<DisplayPoint>& pts, std::vector<ReliabilityGroup>& groups) {
  constexpr std::size_t kNeighbourGroups = 12;
  constexpr int kMaxPasses = 50;
  constexpr std::size_t kExactUnion = 8;
  constexpr std::size_t kExactTriple = 9;
  constexpr std::size_t kCycleGroups = 4;
  constexpr std::size_t kCycleMaxSize = 4;
  const std::size_t ng = groups.size();
  if (ng < 2) return;
  auto d = [&](std::size_t a, std::size_t b) { return distance(position_of(pts[a]), position_of(pts[b])); };
  // Sum of distances from point p to the members of group g other than `skip`.
  auto pull = [&](std::size_t p, const ReliabilityGroup& g, std::size_t skip) {
    double s = 0.0;
    for (std::size_t m : g.members)
      if (m != skip) s += d(p, m);
    return s;
  };

  // Neighbourhoods come from the greedy centroids; exchanges rarely move a
  // centroid far enough to matter.
  std::vector<Vec3> cent(ng);
  for (std::size_t i = 0; i < ng; ++i) cent[i] = centroid(pts, groups[i].members);
  std::vector<std::vector<std::pair<double, std::size_t>>> nearest(ng);
  std::vector<std::pair<double, std::size_t>> all;
  for (std::size_t a = 0; a < ng; ++a) {
    all.clear();
    for (std::size_t b = 0; b < ng; ++b)
      if (b != a) {
        const double dx = cent[a].x - cent[b].x, dy = cent[a].y - cent[b].y, dz = cent[a].z - cent[b].z;
        all.emplace_back(dx * dx + dy * dy + dz * dz, b);
      }
    const auto k = static_cast<std::ptrdiff_t>(std::min(kNeighbourGroups, all.size()));
    std::partial_sort(all.begin(), all.begin() + k, all.end());
    nearest[a].assign(all.begin(), all.begin() + k);
  }
  const bool cycles = groups.front().members.size() <= kCycleMaxSize;

  for (int pass = 0; pass < kMaxPasses; ++pass) {
    bool improved = false;
    for (std::size_t a = 0; a < ng; ++a) {
      const auto& near = nearest[a];
      const std::size_t k = near.size();
      for (std::size_t t = 0; t < k; ++t) {
        const std::size_t b = near[t].second;
        auto& A = groups[a].members;
        auto& B = groups[b].members;
        if (A.size() + B.size() <= kExactUnion) {
          improved = resplit({&A, &B}, d) || improved;
          continue;
        }
        improved = swap_members(A, B, d) || improved;
      }
      // Small groups: re-split each group with its two nearest neighbours.
      if (k >= 2) {
        auto& g0 = groups[a].members;
        auto& g1 = groups[near[0].second].members;
        auto& g2 = groups[near[1].second].members;
        if (g0.size() + g1.size() + g2.size() <= kExactTriple) improved = resplit({&g0, &g1, &g2}, d) || improved;
      }
      // Rotations x: A->B, y: B->C, z: C->A escape pairwise local optima.
      const std::size_t r = cycles ? std::min(kCycleGroups, k) : 0;
      for (std::size_t t1 = 0; t1 < r; ++t1) {
        for (std::size_t t2 = 0; t2 < r; ++t2) {
          if (t1 == t2) continue;
          auto& ga = groups[a];
          auto& gb = groups[near[t1].second];
          auto& gc = groups[near[t2].second];
          for (std::size_t i = 0; i < ga.members.size(); ++i)
            for (std::size_t j = 0; j < gb.members.size(); ++j)
              for (std::size_t l = 0; l < gc.members.size(); ++l) {
                const std::size_t x = ga.members[i], y = gb.members[j], z = gc.members[l];
                const double before = pull(x, ga, x) + pull(y, gb, y) + pull(z, gc, z);
                const double after = pull(z, ga, x) + pull(x, gb, y) + pull(y, gc, z);
                if (before - after > 1e-9) {
                  ga.members[i] = z;
                  gb.members[j] = x;
                  gc.members[l] = y;
                  improved = true;
                }
              }
        }
      }
    }
    if (!improved) break;
  }
}

}  // namespace

std::vector<ReliabilityGroup> form_groups(const PointCloud& cloud, std::uint32_t group_size) {
  if (group_size < 1) throw FlsError(ErrorCode::Range, "group size must be >= 1");
  const auto& pts = cloud.points;
  const std::size_t n = pts.size();

  // Morton rank doubles as the tie-breaker for equidistant neighbours.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::uint64_t> code(n);
  for (std::size_t i = 0; i < n; ++i) code[i] = morton_code(pts[i].l, pts[i].h, pts[i].d);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return code[a] != code[b] ? code[a] < code[b] : a < b;
  });
  std::vector<std::size_t> rank(n);
  for (std::size_t r = 0; r < n; ++r) rank[order[r]] = r;

  // Unassigned points bucketed into cubes of side kCell so the nearest
  // neighbours of a seed come from a few surrounding cubes.
  constexpr std::int64_t kCell = 4;
  auto cell_of = [](std::int64_t v) { return v / kCell; };
  auto key = [](std::int64_t cl, std::int64_t ch, std::int64_t cd) {
    return static_cast<std::uint64_t>(cl) << 42 | static_cast<std::uint64_t>(ch) << 21 | static_cast<std::uint64_t>(cd);
  };
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> buckets;
  std::int64_t max_cell = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& p = pts[i];
    buckets[key(cell_of(p.l), cell_of(p.h), cell_of(p.d))].push_back(i);
    max_cell = std::max({max_cell, cell_of(p.l), cell_of(p.h), cell_of(p.d)});
  }
  std::vector<bool> assigned(n, false);
  auto take_out = [&](std::size_t i) {
    assigned[i] = true;
    auto& b = buckets[key(cell_of(pts[i].l), cell_of(pts[i].h), cell_of(pts[i].d))];
    b.erase(std::find(b.begin(), b.end(), i));
  };

  std::vector<ReliabilityGroup> groups;
  groups.reserve((n + group_size - 1) / group_size);
  std::vector<std::pair<double, std::size_t>> cand;  // (distance, Morton rank)
  std::size_t front = 0, remaining = n;
  while (remaining > 0) {
    while (assigned[order[front]]) ++front;
    const std::size_t seed = order[front];
    take_out(seed);
    --remaining;
    const std::size_t want = std::min<std::size_t>(group_size - 1, remaining);
    const Vec3 sp = position_of(pts[seed]);
    const std::int64_t sl = cell_of(pts[seed].l), sh = cell_of(pts[seed].h), sd = cell_of(pts[seed].d);
    cand.clear();
    auto consider = [&](std::size_t i) { cand.emplace_back(distance(sp, position_of(pts[i])), rank[i]); };
    auto kth = [&] {
      std::nth_element(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(want - 1), cand.end());
      return cand[want - 1].first;
    };
    if (want > 0) {
      for (std::int64_t r = 0;; ++r) {
        const std::int64_t side = 2 * r + 1;
        if (static_cast<std::size_t>(side * side * side) > 8 * remaining || r > max_cell + 1) {
          // Sparse neighbourhood: a plain scan is cheaper than more shells.
          cand.clear();
          for (std::size_t k = front; k < n; ++k)
            if (!assigned[order[k]]) consider(order[k]);
          break;
        }
        for (std::int64_t a = sl - r; a <= sl + r; ++a)
          for (std::int64_t b = sh - r; b <= sh + r; ++b)
            for (std::int64_t c = sd - r; c <= sd + r; ++c) {
              if (std::max({std::abs(a - sl), std::abs(b - sh), std::abs(c - sd)}) != r) continue;
              if (a < 0 || b < 0 || c < 0) continue;
              const auto it = buckets.find(key(a, b, c));
              if (it == buckets.end()) continue;
              for (auto i : it->second) consider(i);
            }
        // Anything outside shell r lies more than r * kCell away.
        if (cand.size() >= want && kth() <= static_cast<double>(r * kCell)) break;
      }
      std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(want), cand.end());
    }

    ReliabilityGroup g;
    g.group_id = static_cast<std::uint32_t>(groups.size());
    g.members.push_back(seed);
    for (std::size_t k = 0; k < want; ++k) {
      g.members.push_back(order[cand[k].second]);
      take_out(order[cand[k].second]);
    }
    remaining -= want;
    groups.push_back(std::move(g));
  }

  refine(pts, groups);
  for (auto& g : groups) g.standby_position = centroid(pts, g.members);
  return groups;
}

double intra_group_distance(const PointCloud& cloud, std::span<const ReliabilityGroup> groups) {
  double total = 0.0;
  for (const auto& g : groups) {
    for (std::size_t i = 0; i < g.members.size(); ++i) {
      for (std::size_t j = i + 1; j < g.members.size(); ++j) {
        total += distance(position_of(cloud.points[g.members[i]]),
                          position_of(cloud.points[g.members[j]]));
      }
    }
  }
  return total;
}

Blob parity_encode(std::span<const Blob> payloads) {
  if (payloads.empty()) throw FlsError(ErrorCode::EmptyInput, "parity of an empty payload list");
  std::size_t len = 0;
  for (const auto& p : payloads) len = std::max(len, p.size());
  Blob out(len, 0);
  for (const auto& p : payloads) {
    for (std::size_t i = 0; i < p.size(); ++i) out[i] ^= p[i];
  }
  return out;
}

Blob parity_reconstruct(const Blob& parity, std::span<const Blob> surviving,
                        std::size_t original_length) {
  Blob out = parity;
  for (const auto& p : surviving) {
    if (p.size() > out.size()) out.resize(p.size(), 0);
    for (std::size_t i = 0; i < p.size(); ++i) out[i] ^= p[i];
  }
  out.resize(original_length, 0);
  return out;
}

GroupPayloads::GroupPayloads(Scheme scheme, std::vector<Blob> member_payloads)
    : scheme_(scheme) {
  if (member_payloads.empty()) throw FlsError(ErrorCode::EmptyInput, "group without members");
  lengths_.reserve(member_payloads.size());
  for (const auto& p : member_payloads) lengths_.push_back(p.size());
  if (scheme_ == Scheme::Parity) {
    parity_ = parity_encode(member_payloads);
  } else {
    copies_ = std::move(member_payloads);
  }
}

Blob GroupPayloads::recover(std::size_t member, std::span<const Blob> surviving,
                            std::span<const std::size_t> missing) const {
  if (member >= lengths_.size()) throw FlsError(ErrorCode::Range, "member index out of range");
  if (scheme_ == Scheme::Replication) return copies_[member];
  if (missing.size() > 1) {
    throw FlsError(ErrorCode::MultiFailure,
                   "more than one member missing; must wait for the Orchestrator's dispatched "
                   "FLSs to arrive with their data");
  }
  if (surviving.size() + 1 != lengths_.size()) {
    throw FlsError(ErrorCode::MultiFailure, "surviving payload count does not match group");
  }
  return parity_reconstruct(parity_, surviving, lengths_[member]);
}

double mtdi_naive(double mttf_hours, std::uint64_t alpha) {
  if (alpha == 0) throw FlsError(ErrorCode::UndefinedMtdi, "MTDI undefined for alpha = 0");
  if (!(mttf_hours > 0.0)) throw FlsError(ErrorCode::Range, "mttf must be positive");
  return mttf_hours / static_cast<double>(alpha);
}

double p_double_failure(const ReliabilityParams& rp) {
  rp.validate();
  const double mttr_hours = rp.mttr_seconds / 3600.0;
  return mttr_hours / (rp.mttf_hours / (rp.group_size + 1.0));
}

double mttf_group(const ReliabilityParams& rp) {
  const double p = p_double_failure(rp);
  if (p > 1.0) {
    throw FlsError(ErrorCode::ModelDomain,
                   "repair is slower than the expected re-failure time (P = " + std::to_string(p) +
                       " > 1)");
  }
  return rp.mttf_hours / (rp.group_size + 1.0) / p;
}

MtdiReport mtdi_grouped(const ReliabilityParams& rp, std::uint64_t alpha) {
  MtdiReport r;
  r.mtdi_naive_hours = mtdi_naive(rp.mttf_hours, alpha);
  r.p_double = p_double_failure(rp);
  r.mttf_group_hours = mttf_group(rp);
  r.mtdi_grouped_hours = rp.group_size * r.mttf_group_hours / static_cast<double>(alpha);
  r.standby_count = (alpha + rp.group_size - 1) / rp.group_size;
  r.total_fls = alpha + r.standby_count;
  r.overhead_fraction = static_cast<double>(r.standby_count) / static_cast<double>(alpha);
  return r;
}

}  // namespace fls::reliability
