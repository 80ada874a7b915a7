#pragma once

// Point-cloud text files and synthetic clouds.
//
// File format: one point per line, "l h d R G B A", fields separated by one or
// more spaces or tabs, '\n' line endings, '#' starts a comment line. A is
// either a real in [0,1] (written with a '.') or an integer in [0,255]; a file
// must use one convention throughout.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

#include "fls/model.hpp"

namespace fls::ingest {

PointCloud parse(std::string_view text);
PointCloud load(const std::string& path);

/// Serializes in the format above; parse(write(c)) == c.
std::string write(const PointCloud& cloud);
void save(const PointCloud& cloud, const std::string& path);

enum class SynthKind { Grid, SphereShell, UniformRandom };

SynthKind parse_synth_kind(std::string_view name);

/// Deterministic cloud of exactly n distinct cells inside [0, extent)^3.
/// Throws FlsError(Infeasible) when n exceeds extent^3.
PointCloud synth(SynthKind kind, std::uint64_t n, std::int64_t extent, std::uint64_t seed);

}  // namespace fls::ingest
