#include "wavefill/trajectory.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <unordered_map>

#include "wavefill/error.hpp"
#include "wavefill/io.hpp"

namespace wavefill {

namespace {

constexpr double kFeet = 0.3048;

void check_point(const TrajectoryPoint& p, double s_len, double w_len) {
  if (!(p.time_s >= 0.0 && p.time_s <= w_len) || !(p.position_m >= 0.0 && p.position_m <= s_len) ||
      !std::isfinite(p.speed_kmh) || p.speed_kmh < 0.0) {
    fail(ErrorKind::Parameter, "point of vehicle '" + p.vehicle_id + "' at t=" + format_fixed(p.time_s) +
                                   " s=" + format_fixed(p.position_m) + " is outside the domain");
  }
}

std::optional<double> parse_number(std::string_view field) {
  double value = 0.0;
  auto first = field.data();
  auto last = field.data() + field.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || !std::isfinite(value)) return std::nullopt;
  return value;
}

std::size_t column_of(const std::vector<std::string_view>& header, const std::string& name) {
  auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) fail(ErrorKind::Parse, "line 1: missing column '" + name + "'");
  return static_cast<std::size_t>(it - header.begin());
}

}  // namespace

TrajectorySet::TrajectorySet(double segment_length_m, double window_length_s, std::vector<Track> tracks)
    : segment_length_m_(segment_length_m), window_length_s_(window_length_s), tracks_(std::move(tracks)) {
  if (!(segment_length_m_ > 0.0) || !(window_length_s_ > 0.0)) {
    fail(ErrorKind::Parameter, "segment and window lengths must be positive");
  }
  for (const auto& track : tracks_) {
    for (std::size_t i = 0; i < track.size(); ++i) {
      check_point(track[i], segment_length_m_, window_length_s_);
      if (track[i].vehicle_id != track.front().vehicle_id) {
        fail(ErrorKind::Parameter, "track mixes vehicles '" + track.front().vehicle_id + "' and '" +
                                       track[i].vehicle_id + "'");
      }
      if (i > 0 && !(track[i].time_s > track[i - 1].time_s)) {
        fail(ErrorKind::Parameter, "vehicle '" + track[i].vehicle_id + "' times are not strictly increasing");
      }
    }
  }
}

std::size_t TrajectorySet::point_count() const {
  std::size_t n = 0;
  for (const auto& t : tracks_) n += t.size();
  return n;
}

TimeUnit parse_time_unit(const std::string& text) {
  if (text == "s") return TimeUnit::Seconds;
  if (text == "ms") return TimeUnit::Milliseconds;
  fail(ErrorKind::Parameter, "unknown time unit '" + text + "' (expected s or ms)");
}

LengthUnit parse_length_unit(const std::string& text) {
  if (text == "m") return LengthUnit::Meters;
  if (text == "ft") return LengthUnit::Feet;
  if (text == "km") return LengthUnit::Kilometers;
  fail(ErrorKind::Parameter, "unknown length unit '" + text + "' (expected m, ft or km)");
}

SpeedUnit parse_speed_unit(const std::string& text) {
  if (text == "kmh" || text == "km/h") return SpeedUnit::KilometersPerHour;
  if (text == "mps" || text == "m/s") return SpeedUnit::MetersPerSecond;
  if (text == "mph") return SpeedUnit::MilesPerHour;
  if (text == "ftps" || text == "ft/s") return SpeedUnit::FeetPerSecond;
  fail(ErrorKind::Parameter, "unknown speed unit '" + text + "' (expected kmh, mps, mph or ftps)");
}

const char* to_string(TimeUnit unit) { return unit == TimeUnit::Seconds ? "s" : "ms"; }

const char* to_string(LengthUnit unit) {
  switch (unit) {
    case LengthUnit::Meters: return "m";
    case LengthUnit::Feet: return "ft";
    case LengthUnit::Kilometers: return "km";
  }
  return "m";
}

const char* to_string(SpeedUnit unit) {
  switch (unit) {
    case SpeedUnit::KilometersPerHour: return "kmh";
    case SpeedUnit::MetersPerSecond: return "mps";
    case SpeedUnit::MilesPerHour: return "mph";
    case SpeedUnit::FeetPerSecond: return "ftps";
  }
  return "kmh";
}

double to_seconds(double value, TimeUnit unit) {
  return unit == TimeUnit::Milliseconds ? value / 1000.0 : value;
}

double to_meters(double value, LengthUnit unit) {
  switch (unit) {
    case LengthUnit::Meters: return value;
    case LengthUnit::Feet: return value * kFeet;
    case LengthUnit::Kilometers: return value * 1000.0;
  }
  return value;
}

double to_kmh(double value, SpeedUnit unit) {
  switch (unit) {
    case SpeedUnit::KilometersPerHour: return value;
    case SpeedUnit::MetersPerSecond: return value * 3.6;
    case SpeedUnit::MilesPerHour: return value * 1.609344;
    case SpeedUnit::FeetPerSecond: return value * kFeet * 3.6;
  }
  return value;
}

LoadResult read_trajectories(std::istream& in, const CsvFormat& format, double segment_length_m,
                             double window_length_s) {
  std::string header_line;
  if (!std::getline(in, header_line)) fail(ErrorKind::Parse, "line 1: missing header row");
  const auto header = split_fields(header_line, format.delimiter);
  const auto id_col = column_of(header, format.vehicle_id_column);
  const auto time_col = column_of(header, format.time_column);
  const auto pos_col = column_of(header, format.position_column);
  const auto speed_col = column_of(header, format.speed_column);
  std::optional<std::size_t> filter_col;
  if (format.filter_column) filter_col = column_of(header, *format.filter_column);
  const auto needed = std::max({id_col, time_col, pos_col, speed_col, filter_col.value_or(0)}) + 1;

  LoadResult result{TrajectorySet(segment_length_m, window_length_s)};
  std::vector<Track> tracks;
  std::unordered_map<std::string, std::size_t> index_of;

  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    ++result.rows_read;
    const auto fields = split_fields(line, format.delimiter);
    if (fields.size() < needed) {
      fail(ErrorKind::Parse, "line " + std::to_string(line_no) + ": expected at least " +
                                 std::to_string(needed) + " fields, found " + std::to_string(fields.size()));
    }
    if (filter_col && fields[*filter_col] != format.filter_value) {
      ++result.rows_filtered;
      continue;
    }
    auto number = [&](std::size_t col) {
      auto v = parse_number(fields[col]);
      if (!v) {
        fail(ErrorKind::Parse, "line " + std::to_string(line_no) + ": non-numeric value '" +
                                   std::string(fields[col]) + "' in column '" + std::string(header[col]) + "'");
      }
      return *v;
    };
    TrajectoryPoint p;
    p.vehicle_id = std::string(fields[id_col]);
    p.time_s = to_seconds(number(time_col) - format.time_origin, format.time_unit);
    p.position_m = to_meters(number(pos_col) - format.position_origin, format.position_unit);
    p.speed_kmh = to_kmh(number(speed_col), format.speed_unit);
    if (p.vehicle_id.empty()) fail(ErrorKind::Parse, "line " + std::to_string(line_no) + ": empty vehicle id");

    if (p.time_s < 0.0 || p.time_s > window_length_s || p.position_m < 0.0 || p.position_m > segment_length_m ||
        p.speed_kmh < 0.0) {
      ++result.rows_out_of_domain;
      continue;
    }
    auto [it, inserted] = index_of.try_emplace(p.vehicle_id, tracks.size());
    if (inserted) tracks.emplace_back();
    tracks[it->second].push_back(std::move(p));
  }

  std::size_t kept = 0;
  for (auto& track : tracks) {
    std::stable_sort(track.begin(), track.end(),
                     [](const TrajectoryPoint& a, const TrajectoryPoint& b) { return a.time_s < b.time_s; });
    auto last = std::unique(track.begin(), track.end(),
                            [](const TrajectoryPoint& a, const TrajectoryPoint& b) { return a.time_s == b.time_s; });
    result.rows_duplicate += static_cast<std::size_t>(track.end() - last);
    track.erase(last, track.end());
    kept += track.size();
  }
  if (kept == 0) fail(ErrorKind::EmptyDataset, "no rows inside the segment/window domain");
  result.trajectories = TrajectorySet(segment_length_m, window_length_s, std::move(tracks));
  return result;
}

LoadResult load_trajectories(const std::filesystem::path& path, const CsvFormat& format, double segment_length_m,
                             double window_length_s) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open trajectory file " + path.string());
  return read_trajectories(in, format, segment_length_m, window_length_s);
}

void write_trajectories(std::ostream& out, const TrajectorySet& trajectories) {
  out << "vehicle_id,time,position,speed\n";
  for (const auto& track : trajectories.tracks()) {
    for (const auto& p : track) {
      out << p.vehicle_id << ',' << format_fixed(p.time_s) << ',' << format_fixed(p.position_m) << ','
          << format_fixed(p.speed_kmh) << '\n';
    }
  }
}

void save_trajectories(const std::filesystem::path& path, const TrajectorySet& trajectories) {
  std::ostringstream ss;
  write_trajectories(ss, trajectories);
  write_atomic(path, ss.str());
}

TrajectorySet sample_penetration(const TrajectorySet& trajectories, double rate, std::uint64_t seed) {
  if (!(rate > 0.0 && rate <= 1.0)) fail(ErrorKind::Parameter, "penetration rate must lie in (0,1]");
  const auto n = trajectories.vehicle_count();
  const auto keep = static_cast<std::size_t>(std::llround(rate * static_cast<double>(n)));
  if (keep >= n) return trajectories;

  // Partial Fisher-Yates: the first `keep` slots end up a uniform sample.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < keep; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(order[i], order[pick(rng)]);
  }
  order.resize(keep);
  std::sort(order.begin(), order.end());

  std::vector<Track> tracks;
  tracks.reserve(keep);
  for (auto idx : order) tracks.push_back(trajectories.tracks()[idx]);
  return TrajectorySet(trajectories.segment_length_m(), trajectories.window_length_s(), std::move(tracks));
}

}  // namespace wavefill
