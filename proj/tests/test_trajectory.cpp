#include <doctest.h>

#include <set>
#include <sstream>

#include "wavefill/error.hpp"
#include "wavefill/trajectory.hpp"

using namespace wavefill;

namespace {

CsvFormat ngsim_format() {
  CsvFormat f;
  f.vehicle_id_column = "Vehicle_ID";
  f.time_column = "Global_Time";
  f.position_column = "Local_Y";
  f.speed_column = "v_Vel";
  f.time_unit = TimeUnit::Milliseconds;
  f.position_unit = LengthUnit::Feet;
  f.speed_unit = SpeedUnit::FeetPerSecond;
  f.time_origin = 1118846980200.0;
  f.filter_column = "Lane_ID";
  f.filter_value = "2";
  return f;
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::Io;
}

TrajectorySet fleet(int vehicles) {
  std::vector<Track> tracks;
  for (int v = 0; v < vehicles; ++v) {
    tracks.push_back({{std::to_string(v), 1.0 * v, 5.0, 60.0}, {std::to_string(v), 1.0 * v + 1.0, 20.0, 60.0}});
  }
  return TrajectorySet(100.0, 1000.0, std::move(tracks));
}

}  // namespace

TEST_CASE("unit conversions") {
  CHECK(to_seconds(1500.0, TimeUnit::Milliseconds) == doctest::Approx(1.5));
  CHECK(to_meters(1.0, LengthUnit::Feet) == doctest::Approx(0.3048));
  CHECK(to_meters(2.0, LengthUnit::Kilometers) == doctest::Approx(2000.0));
  CHECK(to_kmh(10.0, SpeedUnit::MetersPerSecond) == doctest::Approx(36.0));
  CHECK(to_kmh(1.0, SpeedUnit::MilesPerHour) == doctest::Approx(1.609344));
  CHECK(to_kmh(40.0, SpeedUnit::FeetPerSecond) == doctest::Approx(43.8912));
  CHECK(parse_speed_unit("km/h") == SpeedUnit::KilometersPerHour);
  CHECK(parse_speed_unit("ft/s") == SpeedUnit::FeetPerSecond);
  CHECK(parse_length_unit("ft") == LengthUnit::Feet);
  CHECK(parse_time_unit("ms") == TimeUnit::Milliseconds);
  CHECK(kind_of([] { parse_speed_unit("knots"); }) == ErrorKind::Parameter);
}

TEST_CASE("NGSIM-style file: units, origin, lane filter, domain and duplicates") {
  const auto r = load_trajectories(WAVEFILL_TEST_DATA "/ngsim_sample.csv", ngsim_format(), 621.0, 2400.0);
  CHECK(r.rows_read == 11);
  CHECK(r.rows_filtered == 2);
  CHECK(r.rows_out_of_domain == 3);
  CHECK(r.rows_duplicate == 1);
  const auto& ts = r.trajectories;
  REQUIRE(ts.vehicle_count() == 2);
  CHECK(ts.point_count() == 5);

  const auto& first = ts.tracks()[0];
  REQUIRE(first.size() == 4);
  CHECK(first[0].vehicle_id == "11");
  CHECK(first[0].time_s == doctest::Approx(0.0));
  CHECK(first[0].position_m == doctest::Approx(30.48));
  CHECK(first[0].speed_kmh == doctest::Approx(43.8912));
  for (std::size_t i = 1; i < first.size(); ++i) CHECK(first[i].time_s > first[i - 1].time_s);

  const auto& second = ts.tracks()[1];
  REQUIRE(second.size() == 1);
  CHECK(second[0].vehicle_id == "14");
  CHECK(second[0].time_s == doctest::Approx(0.4));
}

TEST_CASE("rows arrive out of order and are sorted per vehicle") {
  std::istringstream in("vehicle_id,time,position,speed\n7,3,30,50\n7,1,10,50\n8,2,5,40\n7,2,20,50\n");
  const auto r = read_trajectories(in, CsvFormat{}, 100.0, 10.0);
  REQUIRE(r.trajectories.vehicle_count() == 2);
  const auto& t = r.trajectories.tracks()[0];
  REQUIRE(t.size() == 3);
  CHECK(t[0].time_s == 1.0);
  CHECK(t[1].time_s == 2.0);
  CHECK(t[2].time_s == 3.0);
}

TEST_CASE("malformed input is reported with the offending line") {
  std::istringstream bad_number("vehicle_id,time,position,speed\n1,0,10,50\n1,abc,20,50\n");
  try {
    read_trajectories(bad_number, CsvFormat{}, 100.0, 10.0);
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Parse);
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }

  std::istringstream missing_col("vehicle_id,time,speed\n1,0,50\n");
  CHECK(kind_of([&] { read_trajectories(missing_col, CsvFormat{}, 100.0, 10.0); }) == ErrorKind::Parse);

  std::istringstream short_row("vehicle_id,time,position,speed\n1,0,10\n");
  CHECK(kind_of([&] { read_trajectories(short_row, CsvFormat{}, 100.0, 10.0); }) == ErrorKind::Parse);

  std::istringstream outside("vehicle_id,time,position,speed\n1,0,500,50\n");
  CHECK(kind_of([&] { read_trajectories(outside, CsvFormat{}, 100.0, 10.0); }) == ErrorKind::EmptyDataset);

  CHECK(kind_of([] { load_trajectories("/nonexistent/file.csv", CsvFormat{}, 1.0, 1.0); }) == ErrorKind::Io);
}

TEST_CASE("constructor enforces track invariants") {
  CHECK(kind_of([] { TrajectorySet(100.0, 10.0, {{{"a", 1.0, 5.0, 10.0}, {"a", 1.0, 6.0, 10.0}}}); }) ==
        ErrorKind::Parameter);
  CHECK(kind_of([] { TrajectorySet(100.0, 10.0, {{{"a", 1.0, 5.0, 10.0}, {"b", 2.0, 6.0, 10.0}}}); }) ==
        ErrorKind::Parameter);
  CHECK(kind_of([] { TrajectorySet(100.0, 10.0, {{{"a", 11.0, 5.0, 10.0}}}); }) == ErrorKind::Parameter);
  CHECK(kind_of([] { TrajectorySet(100.0, 10.0, {{{"a", 1.0, 5.0, -1.0}}}); }) == ErrorKind::Parameter);
  CHECK(kind_of([] { TrajectorySet(0.0, 10.0); }) == ErrorKind::Parameter);
}

TEST_CASE("canonical export reads back unchanged") {
  const auto ts = fleet(4);
  std::ostringstream out;
  write_trajectories(out, ts);
  std::istringstream in(out.str());
  const auto back = read_trajectories(in, CsvFormat{}, 100.0, 1000.0).trajectories;
  CHECK(back == ts);
}

TEST_CASE("penetration sampling") {
  const auto ts = fleet(40);

  SUBCASE("keeps round(rate * n) whole tracks in original order") {
    const auto s = sample_penetration(ts, 0.25, 99);
    REQUIRE(s.vehicle_count() == 10);
    std::set<std::string> ids;
    int previous = -1;
    for (const auto& t : s.tracks()) {
      CHECK(t.size() == 2);
      const int id = std::stoi(t.front().vehicle_id);
      CHECK(id > previous);
      previous = id;
      ids.insert(t.front().vehicle_id);
    }
    CHECK(ids.size() == 10);
  }

  SUBCASE("seeded and reproducible") {
    CHECK(sample_penetration(ts, 0.1, 5) == sample_penetration(ts, 0.1, 5));
    CHECK_FALSE(sample_penetration(ts, 0.5, 5) == sample_penetration(ts, 0.5, 6));
  }

  SUBCASE("full rate is the identity") { CHECK(sample_penetration(ts, 1.0, 3) == ts); }

  SUBCASE("rates outside (0,1] are rejected") {
    CHECK(kind_of([&] { sample_penetration(ts, 0.0, 1); }) == ErrorKind::Parameter);
    CHECK(kind_of([&] { sample_penetration(ts, 1.5, 1); }) == ErrorKind::Parameter);
  }

  SUBCASE("every vehicle is equally likely") {
    std::vector<int> hits(40, 0);
    for (std::uint64_t seed = 0; seed < 2000; ++seed) {
      const auto s = sample_penetration(ts, 0.25, seed);
      for (const auto& t : s.tracks()) ++hits[std::stoi(t.front().vehicle_id)];
    }
    // Expected 500 per vehicle; 5 sigma of a Binomial(2000, 0.25) is ~97.
    for (int h : hits) CHECK(std::abs(h - 500) < 100);
  }
}
