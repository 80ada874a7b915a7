#pragma once

// Experiment runner behind the flsim tool: plan, analyze and simulate.
//
// Every subcommand reads the same keys, either from flags or from a
// key=value config file (flags win). Reports go to the output stream as an
// aligned table; the same rows are available as CSV.

#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "fls/reliability.hpp"
#include "fls/simkernel.hpp"
#include "fls/stag.hpp"

namespace fls::cli {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string text() const;  // space-aligned, right-justified
  std::string csv() const;
};

/// Locale-independent fixed-point rendering.
std::string fixed(double v, int precision);

using ConfigMap = std::map<std::string, std::string>;

/// Parses "key = value" lines; '#' starts a comment. Unknown or repeated
/// keys throw FlsError(Config), malformed lines FlsError(Parse).
ConfigMap parse_config(std::string_view text);
ConfigMap load_config(const std::string& path);

/// The subset of keys each experiment kind must define.
void require_keys(const ConfigMap& cfg, std::string_view kind);

/// One row of h, alpha_i, extras and totals.
Table plan_table(const stag::FlockingPlan& plan, const BatteryParams& bp);

/// One row per group size plus a G=0 row for the ungrouped display. The
/// published MTDI column is a fixed reference, filled only for alpha 65,321
/// with G of 10 or 20, and is never computed.
Table analyze_table(double mttf_hours, double mttr_seconds, const std::vector<std::uint32_t>& group_sizes,
                    std::uint64_t alpha);

/// Builds the simulator configuration a simulate run would use.
sim::SimConfig sim_config_from(const ConfigMap& cfg);

Table replication_summary(const std::vector<sim::SimMetrics>& runs);

/// Entry point of the tool. Returns the process exit code; errors are
/// reported on `err` as "fls-error: <token>: <message>".
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fls::cli
