#pragma once

// Reliability groups: proximity-based group formation, parity / replication
// payload management and closed-form MTDI analytics.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "fls/model.hpp"

namespace fls::reliability {

using Blob = std::vector<std::uint8_t>;

enum class Scheme { Parity, Replication };

const char* scheme_name(Scheme s);

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  friend bool operator==(const Vec3&, const Vec3&) = default;
};

double distance(const Vec3& a, const Vec3& b);
Vec3 position_of(const DisplayPoint& p);

struct ReliabilityGroup {
  std::uint32_t group_id = 0;
  std::vector<std::size_t> members;  // indices into the source cloud
  Vec3 standby_position;             // member centroid
};

/// Greedy proximity grouping: seeds in Morton order of (l,h,d), each group is
/// the seed plus its G-1 nearest unassigned points. A local search then trades
/// members between neighbouring groups while the total distance drops. Only
/// the last group may have fewer than G members.
std::vector<ReliabilityGroup> form_groups(const PointCloud& cloud, std::uint32_t group_size);

/// Sum over groups of all pairwise Euclidean distances between members.
double intra_group_distance(const PointCloud& cloud, std::span<const ReliabilityGroup> groups);

/// 63-bit Morton code interleaving the low 21 bits of each coordinate.
std::uint64_t morton_code(std::int64_t l, std::int64_t h, std::int64_t d);

/// Bytewise XOR of all payloads, zero-padded to the longest one.
/// Throws FlsError(EmptyInput) on an empty list.
Blob parity_encode(std::span<const Blob> payloads);

/// Recovers the single missing payload from the parity and the surviving
/// members; the result is truncated to `original_length`.
Blob parity_reconstruct(const Blob& parity, std::span<const Blob> surviving,
                        std::size_t original_length);

/// Payload bookkeeping for one group: member payloads plus whatever the
/// standby keeps under the chosen scheme.
class GroupPayloads {
 public:
  GroupPayloads(Scheme scheme, std::vector<Blob> member_payloads);

  Scheme scheme() const { return scheme_; }
  std::size_t size() const { return lengths_.size(); }
  const Blob& standby_parity() const { return parity_; }
  const std::vector<Blob>& standby_copies() const { return copies_; }

  /// Standby's view of a lost member. `surviving` holds the payloads of every
  /// other member, in member order with the lost slot skipped; it is ignored
  /// under replication. `missing` lists all currently failed members; more
  /// than one under parity throws FlsError(MultiFailure).
  Blob recover(std::size_t member, std::span<const Blob> surviving,
               std::span<const std::size_t> missing) const;

 private:
  Scheme scheme_;
  std::vector<std::size_t> lengths_;
  Blob parity_;
  std::vector<Blob> copies_;
};

struct MtdiReport {
  double mtdi_naive_hours = 0.0;
  double mttf_group_hours = 0.0;
  double p_double = 0.0;
  double mtdi_grouped_hours = 0.0;
  std::uint64_t standby_count = 0;
  std::uint64_t total_fls = 0;
  double overhead_fraction = 0.0;
};

/// MTTF / alpha. Throws FlsError(UndefinedMtdi) when alpha is 0.
double mtdi_naive(double mttf_hours, std::uint64_t alpha);

/// Probability of another failure in a group before it is repaired:
/// MTTR / (MTTF / (G + 1)).
double p_double_failure(const ReliabilityParams& rp);

/// (MTTF / (G + 1)) / P. Throws FlsError(ModelDomain) when P > 1.
double mttf_group(const ReliabilityParams& rp);

/// G * MTTF_group / alpha with ceil(alpha / G) standbys.
MtdiReport mtdi_grouped(const ReliabilityParams& rp, std::uint64_t alpha);

}  // namespace fls::reliability
