#include "wavefill/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "wavefill/error.hpp"

namespace wavefill {

void SyntheticFieldSpec::validate() const {
  if (!(wave_speed_kmh < 0.0)) fail(ErrorKind::Parameter, "synthetic wave_speed_kmh must be negative");
  if (!(jam_speed_kmh >= 0.0) || !(jam_speed_kmh < free_flow_speed_kmh)) {
    fail(ErrorKind::Parameter, "synthetic speeds need 0 <= jam_speed_kmh < free_flow_speed_kmh");
  }
  if (!(noise_std_kmh >= 0.0)) fail(ErrorKind::Parameter, "synthetic noise_std_kmh must be >= 0");
  if (wave_band_count < 0) fail(ErrorKind::Parameter, "synthetic wave_band_count must be >= 0");
  if (wave_band_count > 0 && !(wave_band_width_s > 0.0)) {
    fail(ErrorKind::Parameter, "synthetic wave_band_width_s must be positive");
  }
  if (wave_band_count > 1 && !(wave_spacing_s >= wave_band_width_s)) {
    fail(ErrorKind::Parameter, "synthetic bands overlap: wave_spacing_s < wave_band_width_s");
  }
  if (!(first_band_start_s >= 0.0)) fail(ErrorKind::Parameter, "synthetic first_band_start_s must be >= 0");
}

GroundTruthField::GroundTruthField(SyntheticFieldSpec spec, double segment_length_m, double window_length_s)
    : spec_(spec), segment_length_m_(segment_length_m), window_length_s_(window_length_s) {
  spec_.validate();
  if (!(segment_length_m > 0.0) || !(window_length_s > 0.0)) {
    fail(ErrorKind::Parameter, "segment and window lengths must be positive");
  }
  if (spec_.wave_band_count > 0) {
    // The characteristic coordinate spans [0, W + |S*tan_theta|].
    const double u_max = window_length_s + segment_length_m * std::abs(boundary_slope_s_per_m());
    const double last_end =
        spec_.first_band_start_s + (spec_.wave_band_count - 1) * spec_.wave_spacing_s + spec_.wave_band_width_s;
    if (last_end > u_max) fail(ErrorKind::Parameter, "synthetic bands extend beyond the spatiotemporal domain");
  }
}

bool GroundTruthField::in_jam(double position_m, double time_s) const {
  if (spec_.wave_band_count == 0) return false;
  const double u = time_s - position_m * boundary_slope_s_per_m() - spec_.first_band_start_s;
  if (u < 0.0) return false;
  const double k = std::floor(u / spec_.wave_spacing_s);
  if (k >= spec_.wave_band_count) return false;
  return u - k * spec_.wave_spacing_s < spec_.wave_band_width_s;
}

double GroundTruthField::speed_kmh(double position_m, double time_s) const {
  return in_jam(position_m, time_s) ? spec_.jam_speed_kmh : spec_.free_flow_speed_kmh;
}

SyntheticData generate_synthetic(const SyntheticFieldSpec& spec, double segment_length_m, double window_length_s,
                                 int vehicle_count, double entry_headway_s) {
  GroundTruthField field(spec, segment_length_m, window_length_s);
  if (vehicle_count < 0) fail(ErrorKind::Parameter, "vehicle_count must be >= 0");
  if (!(entry_headway_s > 0.0)) fail(ErrorKind::Parameter, "entry_headway_s must be positive");

  constexpr int kSubsteps = 10;  // per second
  constexpr double kStep = 1.0 / kSubsteps;
  const double v_cap = spec.free_flow_speed_kmh + 4.0 * spec.noise_std_kmh;

  std::mt19937_64 rng(spec.seed);
  std::exponential_distribution<double> headway(1.0 / entry_headway_s);
  std::normal_distribution<double> noise(0.0, 1.0);

  // Enter early enough that free-flow vehicles cover the whole segment at t=0.
  double entry = -segment_length_m / (spec.free_flow_speed_kmh / 3.6);
  std::vector<Track> tracks;
  for (int v = 0; v < vehicle_count && entry <= window_length_s; ++v, entry += headway(rng)) {
    Track track;
    const std::string id = std::to_string(v);
    double x = 0.0;
    // Advance to the next substep boundary, then step on an integer tick grid.
    long tick = static_cast<long>(std::ceil(entry * kSubsteps));
    x += field.speed_kmh(x, entry) / 3.6 * (static_cast<double>(tick) / kSubsteps - entry);
    while (x <= segment_length_m) {
      const double t = static_cast<double>(tick) / kSubsteps;
      if (t > window_length_s) break;
      const double u = field.speed_kmh(x, t);
      if (tick % kSubsteps == 0 && t >= 0.0) {
        double observed = u;
        if (spec.noise_std_kmh > 0.0) observed += spec.noise_std_kmh * noise(rng);
        track.push_back({id, t, x, std::clamp(observed, 0.0, v_cap)});
      }
      x += u / 3.6 * kStep;
      ++tick;
    }
    if (!track.empty()) tracks.push_back(std::move(track));
  }
  return {TrajectorySet(segment_length_m, window_length_s, std::move(tracks)), field};
}

}  // namespace wavefill
