#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <set>
#include <string>
#include <tuple>

#include "fls/ingest.hpp"

using namespace fls;
using namespace fls::ingest;

namespace {

ErrorCode code_of(const std::string& text) {
  try {
    parse(text);
  } catch (const FlsError& e) {
    return e.code();
  }
  FAIL("no error for: " << text);
  return ErrorCode::Io;
}

std::string message_of(const std::string& text) {
  try {
    parse(text);
  } catch (const FlsError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("parse three lines") {
  const auto c = parse("0 0 0 255 0 0 255\n1 0 0 0 255 0 128\n0 1 0 0 0 255 0\n");
  REQUIRE(c.alpha() == 3);
  CHECK(c.alpha_convention == AlphaConvention::Byte);
  CHECK(c.points[1].l == 1);
  CHECK(c.points[1].g == 255);
  CHECK(c.points[1].a == 128.0);
  CHECK(c.points[2].h == 1);
}

TEST_CASE("whitespace, comments and a missing final newline") {
  const auto c = parse("# header\n\n  3\t4  5 1 2 3 0.5\n\t# indented comment\n6 7 8 9 9 9 1.0");
  REQUIRE(c.alpha() == 2);
  CHECK(c.alpha_convention == AlphaConvention::Unit);
  CHECK(c.points[0].a == 0.5);
  CHECK(c.points[1].d == 8);
  CHECK(parse("").alpha() == 0);
}

TEST_CASE("malformed lines name their line") {
  CHECK(code_of("0 0 0 1 1 1 1\n0 0 1 1 1 1\n") == ErrorCode::Parse);
  CHECK(message_of("0 0 0 1 1 1 1\n0 0 1 1 1 1\n").find("line 2") != std::string::npos);
  CHECK(code_of("0 0 0 1 1 1 1 1\n") == ErrorCode::Parse);
  CHECK(code_of("0 x 0 1 1 1 1\n") == ErrorCode::Parse);
  CHECK(code_of("0 0 0 256 1 1 1\n") == ErrorCode::Parse);
  CHECK(code_of("0 0 -1 1 1 1 1\n") == ErrorCode::Parse);
  CHECK(code_of("0 0 0 1 1 1 1.5\n") == ErrorCode::Parse);
  CHECK(code_of("0 0 0 1 1 1 300\n") == ErrorCode::Parse);
  CHECK(code_of("0 0 0 1 1 1 1\r\n") == ErrorCode::Parse);
  CHECK(message_of("\n\n0 0 0 1 1 1 1\r\n").find("line 3") != std::string::npos);
}

TEST_CASE("mixed alpha conventions are rejected") {
  CHECK(code_of("0 0 0 1 1 1 1\n1 0 0 1 1 1 0.5\n") == ErrorCode::MixedAlpha);
  CHECK(code_of("0 0 0 1 1 1 1e-1\n1 0 0 1 1 1 7\n") == ErrorCode::MixedAlpha);
}

TEST_CASE("duplicate cells surface from validation") {
  CHECK(code_of("1 1 1 0 0 0 0\n2 2 2 0 0 0 0\n1 1 1 5 5 5 5\n") == ErrorCode::DuplicateCoordinate);
}

TEST_CASE("write then parse is the identity") {
  const auto byte = synth(SynthKind::UniformRandom, 500, 20, 3);
  CHECK(parse(write(byte)) == byte);

  PointCloud unit;
  unit.alpha_convention = AlphaConvention::Unit;
  const double alphas[] = {0.0, 1.0, 0.1, 1.0 / 3.0, 0.123456789012345, 5e-7};
  std::int64_t i = 0;
  for (double a : alphas) {
    DisplayPoint p;
    p.l = i++;
    p.r = 12;
    p.a = a;
    unit.points.push_back(p);
  }
  CHECK(parse(write(unit)) == unit);
}

TEST_CASE("load and save through a file") {
  const auto path = (std::filesystem::temp_directory_path() / "fls_ingest_roundtrip.txt").string();
  const auto c = synth(SynthKind::SphereShell, 300, 12, 1);
  save(c, path);
  CHECK(load(path) == c);
  std::remove(path.c_str());
  try {
    load(path);
    FAIL("missing file loaded");
  } catch (const FlsError& e) {
    CHECK(e.code() == ErrorCode::Io);
  }
}

TEST_CASE("a display-sized file") {
  std::string text;
  text.reserve(65321 * 20);
  std::int64_t n = 0;
  for (std::int64_t l = 0; l < 41 && n < 65321; ++l)
    for (std::int64_t h = 0; h < 41 && n < 65321; ++h)
      for (std::int64_t d = 0; d < 41 && n < 65321; ++d, ++n)
        text += std::to_string(l) + ' ' + std::to_string(h) + ' ' + std::to_string(d) + " 10 20 30 255\n";
  const auto c = parse(text);
  CHECK(c.alpha() == 65321);
  CHECK(c.points.back().l == 38);
}

TEST_CASE("synthetic grid") {
  const auto c = synth(SynthKind::Grid, 8, 2, 0);
  REQUIRE(c.alpha() == 8);
  std::set<std::tuple<std::int64_t, std::int64_t, std::int64_t>> cells;
  for (const auto& p : c.points) {
    CHECK(p.l >= 0);
    CHECK(p.l < 2);
    CHECK(p.h < 2);
    CHECK(p.d < 2);
    cells.insert({p.l, p.h, p.d});
  }
  CHECK(cells.size() == 8);
  CHECK(synth(SynthKind::Grid, 0, 2, 0).alpha() == 0);
}

TEST_CASE("synthetic clouds are deterministic and distinct") {
  for (auto kind : {SynthKind::Grid, SynthKind::SphereShell, SynthKind::UniformRandom}) {
    const auto a = synth(kind, 700, 10, 42);
    CHECK(a == synth(kind, 700, 10, 42));
    std::set<std::tuple<std::int64_t, std::int64_t, std::int64_t>> cells;
    for (const auto& p : a.points) {
      CHECK(p.l < 10);
      cells.insert({p.l, p.h, p.d});
    }
    CHECK(cells.size() == 700);
  }
  CHECK(synth(SynthKind::UniformRandom, 50, 10, 1) != synth(SynthKind::UniformRandom, 50, 10, 2));
}

TEST_CASE("synthetic clouds that cannot fit") {
  try {
    synth(SynthKind::Grid, 9, 2, 0);
    FAIL("overfull grid accepted");
  } catch (const FlsError& e) {
    CHECK(e.code() == ErrorCode::Infeasible);
  }
  CHECK(parse_synth_kind("sphere_shell") == SynthKind::SphereShell);
  try {
    parse_synth_kind("torus");
    FAIL("unknown kind accepted");
  } catch (const FlsError& e) {
    CHECK(e.code() == ErrorCode::Config);
  }
}
