#pragma once

#include <cstdint>
#include <vector>

#include "oil/geometry.hpp"

namespace oil {

// Closed loops are built in polar form: radii drawn at control angles around a
// circle, interpolated with a periodic cubic Hermite spline, then resampled
// uniformly by arc length.
struct TrackGenParams {
  int control_points = 12;
  double radius_min = 40.0;
  double radius_max = 110.0;
  // Fraction of the angular spacing by which control angles are jittered.
  double angle_jitter = 0.3;
  double half_width = 4.0;
  double checkpoint_spacing = 50.0;
  int samples = 600;
  // Tracks whose tightest turn is below this radius are redrawn.
  double min_turn_radius = 10.0;
};

// Deterministic in (seed, params). Throws GenerationError when 100 draws in a
// row violate the clearance or turn-radius constraints and ContractError on
// invalid params.
Track generate_track(std::uint64_t seed, const TrackGenParams& params);

// Track i of a suite uses seed mix_seed(seed, 1000 * split + i); split 0 is
// the training suite, 1 the test suite.
std::vector<Track> generate_suite(std::uint64_t seed, int split, int count, const TrackGenParams& params);

// Smallest three-point circumradius along the closed centerline.
double min_turn_radius(const Track& track);

}  // namespace oil
