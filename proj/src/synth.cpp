#include "orcha/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "orcha/color.hpp"

namespace orcha {

namespace {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Inclusive range; the modulo bias is irrelevant for test data.
  std::int64_t between(std::int64_t lo, std::int64_t hi) {
    if (hi <= lo) return lo;
    return lo + static_cast<std::int64_t>(engine_() % static_cast<std::uint64_t>(hi - lo + 1));
  }
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  bool chance(double p) { return unit() < p; }

 private:
  std::mt19937_64 engine_;
};

constexpr const char* kWords[] = {
    "harbor", "signal", "drift",  "ember", "lantern", "quarry", "meadow", "cipher",
    "atlas",  "north",  "velvet", "orbit", "tide",    "relay",  "forge",  "mosaic",
    "ridge",  "pulse",  "canal",  "spire", "delta",   "grove",  "vault",  "echo",
};

std::string words(Rng& rng, std::size_t count) {
  std::string out;
  for (std::size_t i = 0; i < count; ++i) {
    if (i) out += ' ';
    out += kWords[rng.between(0, std::size(kWords) - 1)];
  }
  return out;
}

// Integer or half-integer time in [lo, hi].
Time time_in(Rng& rng, Time lo, Time hi, bool off_grid) {
  if (off_grid && rng.chance(0.2)) {
    const auto halves = rng.between(static_cast<std::int64_t>(std::ceil(lo * 2)),
                                    static_cast<std::int64_t>(std::floor(hi * 2)));
    return static_cast<double>(halves) / 2.0;
  }
  const auto lo_i = static_cast<std::int64_t>(std::ceil(lo));
  const auto hi_i = static_cast<std::int64_t>(std::floor(hi));
  if (hi_i < lo_i) return lo;
  return static_cast<double>(rng.between(lo_i, hi_i));
}

StreamDef make_stream(Rng& rng, std::size_t index, const ChartSpec& spec, const SynthParams& p) {
  StreamDef s;
  s.id = "S" + std::to_string(index + 1);
  s.color = rng.chance(0.15) ? "" : to_hex(palette_color(static_cast<std::size_t>(rng.between(0, 11))));

  const StreamDef* parent = nullptr;
  if (!spec.streams.empty() && rng.chance(p.nested_fraction)) {
    const auto& candidate = spec.streams[rng.between(0, spec.streams.size() - 1)];
    if (candidate.t1 - candidate.t0 >= 2.0) parent = &candidate;
  }
  Time lo = 0.0;
  Time hi = p.span;
  if (parent) {
    lo = parent->t0;
    hi = parent->t1;
    s.parent = parent->id;
  }
  s.t0 = time_in(rng, lo, hi - 1.0, false);
  s.t1 = time_in(rng, s.t0 + 1.0, hi, p.off_grid);
  if (s.t1 <= s.t0) s.t1 = std::min(hi, s.t0 + 1.0);

  // Interior knots at whole steps, ascending.
  const auto knots = rng.between(0, 2);
  std::vector<Time> times;
  for (std::int64_t k = 0; k < knots; ++k) {
    const Time t = time_in(rng, s.t0, s.t1, false);
    if (std::find(times.begin(), times.end(), t) == times.end()) times.push_back(t);
  }
  std::sort(times.begin(), times.end());
  for (Time t : times) s.sizes.push_back({t, static_cast<double>(rng.between(2, 12))});
  return s;
}

}  // namespace

ChartSpec random_spec(std::uint64_t seed, const SynthParams& p) {
  Rng rng(seed);
  ChartSpec spec;
  for (std::size_t i = 0; i < p.streams; ++i) spec.streams.push_back(make_stream(rng, i, spec, p));

  for (std::size_t attempt = 0; spec.links.size() < p.links && attempt < p.links * 50; ++attempt) {
    const auto& from = spec.streams[rng.between(0, spec.streams.size() - 1)];
    const auto& to = spec.streams[rng.between(0, spec.streams.size() - 1)];
    if (from.id == to.id) continue;
    // Any start inside `from` whose next whole step lands inside `to`.
    const Time lo = std::max(from.t0, to.t0 - 3.0);
    const Time hi = std::min(from.t1, to.t1 - 1.0);
    if (hi < lo) continue;
    LinkDef link;
    link.from = from.id;
    link.to = to.id;
    link.t0 = time_in(rng, lo, hi, false);
    const Time end_lo = std::max(link.t0 + 1.0, to.t0);
    if (end_lo > to.t1) continue;
    const Time end = time_in(rng, end_lo, std::min(to.t1, end_lo + 3.0), false);
    if (end != link.t0 + 1.0 || rng.chance(0.5)) link.t1 = end;
    link.merge = rng.chance(0.3);
    spec.links.push_back(std::move(link));
  }

  for (std::size_t i = 0; i < p.labels; ++i) {
    const auto& s = spec.streams[rng.between(0, spec.streams.size() - 1)];
    LabelDef label;
    label.stream = s.id;
    label.t = time_in(rng, s.t0, s.t1, p.off_grid);
    label.text = words(rng, rng.between(1, 2));
    label.type = static_cast<LabelType>(rng.between(0, 2));
    label.size = static_cast<double>(rng.between(1, 3));
    if (rng.chance(0.2)) label.shape = LabelShape::rect;
    spec.labels.push_back(std::move(label));
  }
  return spec;
}

ChartSpec synthetic_chart(std::uint64_t seed) {
  SynthParams p;
  p.streams = 44;
  p.links = 61;
  p.labels = 369;
  p.span = 60.0;
  p.nested_fraction = 0.3;
  return random_spec(seed, p);
}

}  // namespace orcha
