#include "fls/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

namespace fls {

const char* error_token(ErrorCode code) {
  switch (code) {
    case ErrorCode::DuplicateCoordinate: return "duplicate-coordinate";
    case ErrorCode::Range: return "range";
    case ErrorCode::Parse: return "parse";
    case ErrorCode::MixedAlpha: return "mixed-alpha";
    case ErrorCode::InvalidThreshold: return "invalid-threshold";
    case ErrorCode::UndefinedMtdi: return "undefined-mtdi";
    case ErrorCode::ModelDomain: return "model-domain";
    case ErrorCode::EmptyInput: return "empty-input";
    case ErrorCode::MultiFailure: return "multi-failure";
    case ErrorCode::Infeasible: return "infeasible";
    case ErrorCode::Config: return "config";
    case ErrorCode::NothingToRun: return "nothing-to-run";
    case ErrorCode::Io: return "io";
  }
  return "unknown";
}

const char* role_name(Role role) {
  switch (role) {
    case Role::Illuminating: return "illuminating";
    case Role::Standby: return "standby";
    case Role::Charging: return "charging";
    case Role::InTransitToCharger: return "in_transit_to_charger";
    case Role::InTransitToDisplay: return "in_transit_to_display";
    case Role::Hangar: return "hangar";
    case Role::Failed: return "failed";
    case Role::FirstDeployment: return "first_deployment";
  }
  return "unknown";
}

PointCloud validate_cloud(PointCloud cloud) {
  const auto& pts = cloud.points;
  const double alpha_max = cloud.alpha_convention == AlphaConvention::Byte ? 255.0 : 1.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto& p = pts[i];
    auto fail = [i](const char* field) {
      throw FlsError(ErrorCode::Range,
                     "point " + std::to_string(i) + ": field '" + field + "' out of range");
    };
    if (p.l < 0) fail("l");
    if (p.h < 0) fail("h");
    if (p.d < 0) fail("d");
    if (!std::isfinite(p.a) || p.a < 0.0 || p.a > alpha_max) fail("a");
  }

  std::vector<std::size_t> order(pts.size());
  std::iota(order.begin(), order.end(), 0);
  auto key = [&](std::size_t i) { return std::tie(pts[i].l, pts[i].h, pts[i].d); };
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return key(x) != key(y) ? key(x) < key(y) : x < y;
  });
  for (std::size_t k = 1; k < order.size(); ++k) {
    if (pts[order[k - 1]].same_cell(pts[order[k]])) {
      throw FlsError(ErrorCode::DuplicateCoordinate,
                     "points " + std::to_string(order[k - 1]) + " and " +
                         std::to_string(order[k]) + " share cell (" +
                         std::to_string(pts[order[k]].l) + "," + std::to_string(pts[order[k]].h) +
                         "," + std::to_string(pts[order[k]].d) + ")");
    }
  }
  return cloud;
}

BatteryParams BatteryParams::from_minutes(double beta_min, double omega_min) {
  BatteryParams bp;
  bp.beta_ms = std::llround(beta_min * kMillisPerMinute);
  bp.omega_ms = std::llround(omega_min * kMillisPerMinute);
  bp.validate();
  return bp;
}

void BatteryParams::validate() const {
  if (beta_ms <= 0) throw FlsError(ErrorCode::Range, "beta must be positive");
  if (omega_ms < 0) throw FlsError(ErrorCode::Range, "omega must be non-negative");
}

void ReliabilityParams::validate() const {
  if (!(mttf_hours > 0.0) || !std::isfinite(mttf_hours))
    throw FlsError(ErrorCode::Range, "mttf must be positive");
  if (!(mttr_seconds > 0.0) || !std::isfinite(mttr_seconds))
    throw FlsError(ErrorCode::Range, "mttr must be positive");
  if (group_size < 1) throw FlsError(ErrorCode::Range, "group size must be >= 1");
}

void FlsAgent::validate(const BatteryParams& bp) const {
  if (remaining_flight_ms < 0 || remaining_flight_ms > bp.beta_ms)
    throw FlsError(ErrorCode::Range, "remaining flight outside [0, beta]");
  if (role == Role::Illuminating && !assigned_point)
    throw FlsError(ErrorCode::Range, "illuminating agent without an assigned point");
  if (stag_id && *stag_id < 1) throw FlsError(ErrorCode::Range, "stag-id must be >= 1");
}

}  // namespace fls
