#include <doctest.h>

#include <random>

#include "support.hpp"
#include "wavefill/error.hpp"
#include "wavefill/io.hpp"
#include "wavefill/matrix_io.hpp"
#include "wavefill/serialize.hpp"

using namespace wavefill;

namespace {

StateMatrix sample_matrix() {
  // Oblique grid with all three cell states present.
  const GridSpec g{30.0, 20.0, 10.0, 5.0, -12.0};
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> s(0.0, 30.0), t(0.0, 20.0), v(0.0, 100.0);
  std::vector<Track> tracks;
  for (int k = 0; k < 12; ++k) tracks.push_back({{std::to_string(k), t(rng), s(rng), v(rng)}});
  return build_matrix(TrajectorySet(30.0, 20.0, std::move(tracks)), g);
}

}  // namespace

TEST_CASE("format_fixed") {
  CHECK(format_fixed(1.5) == "1.500000");
  CHECK(format_fixed(-0.0000001) == "0.000000");
  CHECK(format_fixed(std::nan(""), 3) == "nan");
  CHECK(format_fixed(2.0 / 3.0, 4) == "0.6667");
}

TEST_CASE("state matrix text round trip") {
  const auto m = sample_matrix();
  REQUIRE((m.mask.array() == CellState::OutOfDomain).count() > 0);
  REQUIRE(m.observed_count() > 0);
  const auto csv = state_matrix_csv(m);
  const auto side = state_matrix_sidecar(m);
  const auto back = parse_state_matrix(csv, side);
  CHECK(back.grid == m.grid);
  CHECK(back.mask == m.mask);
  CHECK(back.counts == m.counts);
  CHECK(state_matrix_csv(back) == csv);
  CHECK(state_matrix_sidecar(back) == side);
  for (Eigen::Index i = 0; i < m.values.size(); ++i) {
    const double a = m.values.data()[i], b = back.values.data()[i];
    if (std::isnan(a)) {
      CHECK(std::isnan(b));
    } else {
      CHECK(std::abs(a - b) <= 5e-7);
    }
  }
}

TEST_CASE("state matrix files") {
  support::TempDir dir("mio");
  const auto m = sample_matrix();
  save_state_matrix(dir.path() / "sub" / "m", m);
  CHECK(std::filesystem::exists(dir.path() / "sub" / "m.csv"));
  CHECK(std::filesystem::exists(dir.path() / "sub" / "m.json"));
  CHECK_FALSE(std::filesystem::exists(dir.path() / "sub" / "m.csv.tmp"));
  const auto back = load_state_matrix(dir.path() / "sub" / "m");
  CHECK(back.mask == m.mask);
}

TEST_CASE("malformed matrix files are rejected") {
  const auto m = sample_matrix();
  const auto csv = state_matrix_csv(m);
  const auto side = state_matrix_sidecar(m);
  CHECK_THROWS_AS(parse_state_matrix(csv, "{not json"), Error);
  CHECK_THROWS_AS(parse_state_matrix(csv, R"({"format": "other"})"), Error);
  CHECK_THROWS_AS(parse_state_matrix(csv.substr(0, csv.find('\n') + 1), side), Error);
  std::string bad = csv;
  bad.replace(0, bad.find(','), "abc");
  CHECK_THROWS_AS(parse_state_matrix(bad, side), Error);
  auto j = json::parse(side);
  j["mask_rle"] = json::array({json::array({0, 1})});
  CHECK_THROWS_AS(parse_state_matrix(csv, j.dump()), Error);
}

TEST_CASE("PGM heatmap layout") {
  Eigen::MatrixXd v(2, 3);
  v << 0, 60, 120, 30, 200, -5;
  support::BoolMatrix o = support::BoolMatrix::Constant(2, 3, true);
  o(0, 0) = false;
  const auto m = support::make_state(v, o);
  const auto pgm = heatmap_pgm(m, 120.0);
  const std::string header = "P5\n3 2\n255\n";
  REQUIRE(pgm.size() == header.size() + 6);
  CHECK(pgm.substr(0, header.size()) == header);
  const auto* px = reinterpret_cast<const unsigned char*>(pgm.data() + header.size());
  // Top image row is the last matrix row.
  CHECK(px[0] == 64);   // 30 km/h
  CHECK(px[1] == 255);  // clamped
  CHECK(px[2] == 0);    // clamped below
  CHECK(px[3] == 0);    // no value
  CHECK(px[4] == 128);  // 60 km/h
  CHECK(px[5] == 255);
  CHECK_THROWS_AS(heatmap_pgm(m, 0.0), Error);
}
