#pragma once

#include <cstdint>

#include "orcha/chart_model.hpp"

namespace orcha {

struct SynthParams {
  std::size_t streams = 8;
  std::size_t links = 6;
  std::size_t labels = 10;
  Time span = 20.0;            // charts cover [0, span]
  double nested_fraction = 0.3;
  bool off_grid = true;        // allow half-step stream ends and label times
};

/// Random chart that always passes validate() with step 1. Deterministic for
/// a given seed on every platform (no std distributions).
ChartSpec random_spec(std::uint64_t seed, const SynthParams& params = {});

/// Large chart at the scale of a full painting: 44 streams, 61 links and
/// 369 labels over a 60-step range.
ChartSpec synthetic_chart(std::uint64_t seed = 42);

}  // namespace orcha
