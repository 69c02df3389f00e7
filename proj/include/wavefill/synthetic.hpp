#pragma once

#include <cstdint>

#include "wavefill/trajectory.hpp"

namespace wavefill {

/// Two-phase speed field: free flow everywhere except inside stop-and-go
/// bands that travel upstream at `wave_speed_kmh`. Band k covers the
/// characteristic coordinate u = t - s*tan_theta in
/// [first_band_start_s + k*wave_spacing_s, ... + wave_band_width_s).
struct SyntheticFieldSpec {
  double free_flow_speed_kmh = 90.0;
  double jam_speed_kmh = 5.0;
  double wave_speed_kmh = -18.0;
  int wave_band_count = 3;
  double wave_band_width_s = 200.0;
  double wave_spacing_s = 500.0;
  double first_band_start_s = 150.0;
  double noise_std_kmh = 0.0;
  std::uint64_t seed = 1;

  void validate() const;
};

/// Closed-form field u(s,t) used as the oracle for synthetic runs.
class GroundTruthField {
 public:
  GroundTruthField(SyntheticFieldSpec spec, double segment_length_m, double window_length_s);

  const SyntheticFieldSpec& spec() const { return spec_; }
  double segment_length_m() const { return segment_length_m_; }
  double window_length_s() const { return window_length_s_; }

  /// dt/ds of band boundaries in the (s,t) plane, seconds per meter.
  double boundary_slope_s_per_m() const { return 3.6 / spec_.wave_speed_kmh; }
  bool in_jam(double position_m, double time_s) const;
  double speed_kmh(double position_m, double time_s) const;

 private:
  SyntheticFieldSpec spec_;
  double segment_length_m_;
  double window_length_s_;
};

struct SyntheticData {
  TrajectorySet trajectories;
  GroundTruthField field;
};

/// Vehicles enter at s=0 with exponential headways (mean `entry_headway_s`),
/// starting early enough that the segment is populated at t=0. Positions are
/// integrated with dx/dt = u(x,t)/3.6 in 0.1 s substeps and sampled every
/// whole second inside the window. Sampled speeds carry Gaussian noise
/// clamped to [0, v_f + 4*noise_std].
SyntheticData generate_synthetic(const SyntheticFieldSpec& spec, double segment_length_m, double window_length_s,
                                 int vehicle_count, double entry_headway_s);

}  // namespace wavefill
