#pragma once

// Core domain types shared by the planner, the reliability analytics and the
// simulator. All durations are integer milliseconds unless a name says
// otherwise.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fls {

using Millis = std::int64_t;
using FlsId = std::uint32_t;

constexpr Millis kMillisPerSecond = 1000;
constexpr Millis kMillisPerMinute = 60 * kMillisPerSecond;
constexpr Millis kMillisPerHour = 60 * kMillisPerMinute;

enum class ErrorCode {
  DuplicateCoordinate,
  Range,
  Parse,
  MixedAlpha,
  InvalidThreshold,
  UndefinedMtdi,
  ModelDomain,
  EmptyInput,
  MultiFailure,
  Infeasible,
  Config,
  NothingToRun,
  Io,
};

/// Stable, machine-parsable token for an error code (e.g. "duplicate-coordinate").
const char* error_token(ErrorCode code);

/// Every error raised by the library carries one of the codes above.
class FlsError : public std::runtime_error {
 public:
  FlsError(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

/// How a cloud encodes its alpha channel: 0..255 integers or reals in [0,1].
enum class AlphaConvention { Byte, Unit };

struct DisplayPoint {
  std::int64_t l = 0;
  std::int64_t h = 0;
  std::int64_t d = 0;
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
  // Stored but uninterpreted by planning and reliability.
  double a = 255.0;

  bool same_cell(const DisplayPoint& o) const { return l == o.l && h == o.h && d == o.d; }
  friend bool operator==(const DisplayPoint&, const DisplayPoint&) = default;
};

struct PointCloud {
  std::vector<DisplayPoint> points;
  AlphaConvention alpha_convention = AlphaConvention::Byte;

  std::size_t alpha() const { return points.size(); }
  friend bool operator==(const PointCloud&, const PointCloud&) = default;
};

/// Checks every DisplayPoint and PointCloud invariant and returns the cloud
/// unchanged. Throws FlsError(Range) naming the field or
/// FlsError(DuplicateCoordinate) naming the offending pair of indices.
PointCloud validate_cloud(PointCloud cloud);

struct BatteryParams {
  Millis beta_ms = 0;   // flight time on a full charge
  Millis omega_ms = 0;  // time to charge a fully depleted battery

  static BatteryParams from_minutes(double beta_min, double omega_min);
  void validate() const;
};

struct ReliabilityParams {
  double mttf_hours = 0.0;
  double mttr_seconds = 0.0;
  std::uint32_t group_size = 1;

  void validate() const;
};

enum class Role {
  Illuminating,
  Standby,
  Charging,
  InTransitToCharger,
  InTransitToDisplay,
  Hangar,
  Failed,
  FirstDeployment,
};

const char* role_name(Role role);

struct FlsAgent {
  FlsId id = 0;
  std::optional<std::uint32_t> flock_id;
  std::optional<std::uint32_t> stag_id;
  Millis remaining_flight_ms = 0;
  Role role = Role::Hangar;
  std::optional<DisplayPoint> assigned_point;
  std::optional<std::uint32_t> group_id;

  /// Throws FlsError(Range) if remaining flight is outside [0, beta] or an
  /// illuminating agent has no point.
  void validate(const BatteryParams& bp) const;
};

}  // namespace fls
