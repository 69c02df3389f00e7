#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace wavefill {

/// One timestamped speed observation. Canonical units: seconds from the
/// window start, meters from the segment start, km/h.
struct TrajectoryPoint {
  std::string vehicle_id;
  double time_s = 0.0;
  double position_m = 0.0;
  double speed_kmh = 0.0;

  bool operator==(const TrajectoryPoint&) const = default;
};

using Track = std::vector<TrajectoryPoint>;

/// Observations on a segment of length S over a window of length W, grouped
/// by vehicle. Each track is sorted by strictly increasing time and every
/// point lies in [0,S]x[0,W] with a finite non-negative speed; the
/// constructor enforces this.
class TrajectorySet {
 public:
  TrajectorySet(double segment_length_m, double window_length_s, std::vector<Track> tracks = {});

  double segment_length_m() const { return segment_length_m_; }
  double window_length_s() const { return window_length_s_; }
  const std::vector<Track>& tracks() const { return tracks_; }
  std::size_t vehicle_count() const { return tracks_.size(); }
  std::size_t point_count() const;
  bool empty() const { return point_count() == 0; }

  bool operator==(const TrajectorySet&) const = default;

 private:
  double segment_length_m_;
  double window_length_s_;
  std::vector<Track> tracks_;
};

enum class TimeUnit { Seconds, Milliseconds };
enum class LengthUnit { Meters, Feet, Kilometers };
enum class SpeedUnit { KilometersPerHour, MetersPerSecond, MilesPerHour, FeetPerSecond };

TimeUnit parse_time_unit(const std::string& text);
LengthUnit parse_length_unit(const std::string& text);
SpeedUnit parse_speed_unit(const std::string& text);
const char* to_string(TimeUnit unit);
const char* to_string(LengthUnit unit);
const char* to_string(SpeedUnit unit);

double to_seconds(double value, TimeUnit unit);
double to_meters(double value, LengthUnit unit);
double to_kmh(double value, SpeedUnit unit);

/// Column mapping and unit declarations for a trajectory CSV. The defaults
/// read the canonical format produced by write_trajectories.
struct CsvFormat {
  std::string vehicle_id_column = "vehicle_id";
  std::string time_column = "time";
  std::string position_column = "position";
  std::string speed_column = "speed";
  TimeUnit time_unit = TimeUnit::Seconds;
  LengthUnit position_unit = LengthUnit::Meters;
  SpeedUnit speed_unit = SpeedUnit::KilometersPerHour;
  // Subtracted in source units before conversion (e.g. an epoch timestamp).
  double time_origin = 0.0;
  double position_origin = 0.0;
  // Keep only rows whose named column equals the given text (e.g. a lane id).
  std::optional<std::string> filter_column;
  std::string filter_value;
  char delimiter = ',';
};

struct LoadResult {
  TrajectorySet trajectories;
  std::size_t rows_read = 0;
  std::size_t rows_filtered = 0;
  std::size_t rows_out_of_domain = 0;
  std::size_t rows_duplicate = 0;
};

LoadResult read_trajectories(std::istream& in, const CsvFormat& format, double segment_length_m,
                             double window_length_s);
LoadResult load_trajectories(const std::filesystem::path& path, const CsvFormat& format,
                             double segment_length_m, double window_length_s);

/// Canonical export: header "vehicle_id,time,position,speed", 6 decimals.
void write_trajectories(std::ostream& out, const TrajectorySet& trajectories);
void save_trajectories(const std::filesystem::path& path, const TrajectorySet& trajectories);

/// Keeps round(rate * vehicle_count) whole tracks chosen uniformly without
/// replacement; kept tracks stay in their original order.
TrajectorySet sample_penetration(const TrajectorySet& trajectories, double rate, std::uint64_t seed);

}  // namespace wavefill
