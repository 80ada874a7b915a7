#include "fls/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <tuple>
#include <vector>

namespace fls::ingest {

namespace {

[[noreturn]] void parse_error(std::size_t line, const std::string& msg) {
  throw FlsError(ErrorCode::Parse, "line " + std::to_string(line) + ": " + msg);
}

std::vector<std::string_view> split_fields(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    if (i == s.size()) break;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
    out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

std::int64_t parse_int(std::string_view f, std::size_t line, const char* name) {
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
  if (ec != std::errc() || p != f.data() + f.size())
    parse_error(line, std::string("field '") + name + "' is not an integer: '" + std::string(f) + "'");
  return v;
}

double parse_real(std::string_view f, std::size_t line) {
  // std::from_chars for double is unavailable on older libstdc++.
  std::string tmp(f);
  std::istringstream is(tmp);
  is.imbue(std::locale::classic());
  double v = 0.0;
  is >> v;
  if (!is || is.peek() != std::char_traits<char>::eof())
    parse_error(line, "field 'A' is not a real: '" + tmp + "'");
  return v;
}

std::string format_real(double v) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os.precision(17);
  os << v;
  std::string s = os.str();
  if (s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

}  // namespace

PointCloud parse(std::string_view text) {
  PointCloud cloud;
  std::optional<AlphaConvention> convention;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;

    if (line.find('\r') != std::string_view::npos) parse_error(line_no, "carriage return in line");
    auto fields = split_fields(line);
    if (fields.empty()) continue;
    if (fields.front().front() == '#') continue;
    if (fields.size() != 7)
      parse_error(line_no, "expected 7 fields, found " + std::to_string(fields.size()));

    DisplayPoint p;
    p.l = parse_int(fields[0], line_no, "l");
    p.h = parse_int(fields[1], line_no, "h");
    p.d = parse_int(fields[2], line_no, "d");
    if (p.l < 0 || p.h < 0 || p.d < 0) parse_error(line_no, "negative coordinate");
    const char* names[3] = {"R", "G", "B"};
    std::uint8_t* chans[3] = {&p.r, &p.g, &p.b};
    for (int c = 0; c < 3; ++c) {
      const auto v = parse_int(fields[3 + c], line_no, names[c]);
      if (v < 0 || v > 255) parse_error(line_no, std::string("field '") + names[c] + "' outside [0,255]");
      *chans[c] = static_cast<std::uint8_t>(v);
    }

    const bool real_style = fields[6].find_first_of(".eE") != std::string_view::npos;
    const AlphaConvention conv = real_style ? AlphaConvention::Unit : AlphaConvention::Byte;
    if (convention && *convention != conv) {
      throw FlsError(ErrorCode::MixedAlpha,
                     "line " + std::to_string(line_no) + ": alpha convention differs from earlier lines");
    }
    convention = conv;
    if (real_style) {
      p.a = parse_real(fields[6], line_no);
      if (!(p.a >= 0.0 && p.a <= 1.0)) parse_error(line_no, "field 'A' outside [0,1]");
    } else {
      const auto v = parse_int(fields[6], line_no, "A");
      if (v < 0 || v > 255) parse_error(line_no, "field 'A' outside [0,255]");
      p.a = static_cast<double>(v);
    }
    cloud.points.push_back(p);
  }
  cloud.alpha_convention = convention.value_or(AlphaConvention::Byte);
  return validate_cloud(std::move(cloud));
}

PointCloud load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FlsError(ErrorCode::Io, "cannot open cloud file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string write(const PointCloud& cloud) {
  std::string out;
  out.reserve(cloud.points.size() * 24);
  for (const auto& p : cloud.points) {
    out += std::to_string(p.l) + ' ' + std::to_string(p.h) + ' ' + std::to_string(p.d) + ' ' +
           std::to_string(p.r) + ' ' + std::to_string(p.g) + ' ' + std::to_string(p.b) + ' ';
    if (cloud.alpha_convention == AlphaConvention::Unit) {
      out += format_real(p.a);
    } else {
      out += std::to_string(static_cast<int>(std::lround(p.a)));
    }
    out += '\n';
  }
  return out;
}

void save(const PointCloud& cloud, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FlsError(ErrorCode::Io, "cannot write cloud file '" + path + "'");
  out << write(cloud);
}

SynthKind parse_synth_kind(std::string_view name) {
  if (name == "grid") return SynthKind::Grid;
  if (name == "sphere_shell") return SynthKind::SphereShell;
  if (name == "uniform_random") return SynthKind::UniformRandom;
  throw FlsError(ErrorCode::Config, "unknown synthetic cloud kind '" + std::string(name) + "'");
}

namespace {

DisplayPoint colored(std::int64_t l, std::int64_t h, std::int64_t d) {
  DisplayPoint p;
  p.l = l;
  p.h = h;
  p.d = d;
  p.r = static_cast<std::uint8_t>((l * 37 + 11) % 256);
  p.g = static_cast<std::uint8_t>((h * 53 + 7) % 256);
  p.b = static_cast<std::uint8_t>((d * 91 + 3) % 256);
  p.a = 255.0;
  return p;
}

}  // namespace

PointCloud synth(SynthKind kind, std::uint64_t n, std::int64_t extent, std::uint64_t seed) {
  if (extent < 0) throw FlsError(ErrorCode::Range, "extent must be non-negative");
  const auto e = static_cast<std::uint64_t>(extent);
  const std::uint64_t cells = e * e * e;
  if (n > cells) {
    throw FlsError(ErrorCode::Infeasible, std::to_string(n) + " points do not fit in " +
                                              std::to_string(cells) + " cells");
  }
  PointCloud cloud;
  cloud.points.reserve(n);
  auto cell = [e](std::uint64_t idx) {
    return std::tuple<std::int64_t, std::int64_t, std::int64_t>(
        static_cast<std::int64_t>(idx / (e * e)), static_cast<std::int64_t>(idx / e % e),
        static_cast<std::int64_t>(idx % e));
  };

  switch (kind) {
    case SynthKind::Grid:
      for (std::uint64_t i = 0; i < n; ++i) {
        auto [l, h, d] = cell(i);
        cloud.points.push_back(colored(l, h, d));
      }
      break;
    case SynthKind::SphereShell: {
      // Cells ranked by distance from the shell of radius extent/2 about the
      // centre; the seed only breaks ties.
      const double c = (static_cast<double>(e) - 1.0) / 2.0;
      const double radius = static_cast<double>(e) / 2.0;
      std::mt19937_64 rng(seed);
      std::vector<std::tuple<double, std::uint64_t, std::uint64_t>> ranked;
      ranked.reserve(cells);
      for (std::uint64_t i = 0; i < cells; ++i) {
        auto [l, h, d] = cell(i);
        const double r = std::hypot(l - c, h - c, d - c);
        ranked.emplace_back(std::abs(r - radius), rng(), i);
      }
      std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(n), ranked.end());
      std::vector<std::uint64_t> chosen;
      for (std::uint64_t k = 0; k < n; ++k) chosen.push_back(std::get<2>(ranked[k]));
      std::sort(chosen.begin(), chosen.end());
      for (auto idx : chosen) {
        auto [l, h, d] = cell(idx);
        cloud.points.push_back(colored(l, h, d));
      }
      break;
    }
    case SynthKind::UniformRandom: {
      std::mt19937_64 rng(seed);
      std::vector<std::uint64_t> chosen;
      if (n * 2 > cells) {
        std::vector<std::uint64_t> all(cells);
        std::iota(all.begin(), all.end(), 0);
        for (std::uint64_t i = 0; i < n; ++i) {
          std::uniform_int_distribution<std::uint64_t> pick(i, cells - 1);
          std::swap(all[i], all[pick(rng)]);
        }
        chosen.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n));
      } else {
        std::set<std::uint64_t> seen;
        std::uniform_int_distribution<std::uint64_t> pick(0, cells - 1);
        while (chosen.size() < n) {
          const auto idx = pick(rng);
          if (seen.insert(idx).second) chosen.push_back(idx);
        }
      }
      for (auto idx : chosen) {
        auto [l, h, d] = cell(idx);
        cloud.points.push_back(colored(l, h, d));
      }
      break;
    }
  }
  return validate_cloud(std::move(cloud));
}

}  // namespace fls::ingest
