#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "wavefill/grid.hpp"
#include "wavefill/solver.hpp"
#include "wavefill/synthetic.hpp"

namespace support {

using BoolMatrix = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

// Rectangular 1 m x 1 s grid whose shape matches `values`.
inline wavefill::GridSpec unit_grid(Eigen::Index rows, Eigen::Index cols) {
  return {static_cast<double>(rows), static_cast<double>(cols), 1.0, 1.0, std::nullopt};
}

inline wavefill::StateMatrix make_state(const Eigen::MatrixXd& values, const BoolMatrix& observed) {
  wavefill::StateMatrix m;
  m.grid = unit_grid(values.rows(), values.cols());
  m.values = observed.select(values, Eigen::MatrixXd::Constant(values.rows(), values.cols(), std::nan("")));
  m.mask = wavefill::MaskMatrix::Constant(values.rows(), values.cols(), wavefill::CellState::Missing);
  m.counts = wavefill::CountMatrix::Zero(values.rows(), values.cols());
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (observed.data()[i]) {
      m.mask.data()[i] = wavefill::CellState::Observed;
      m.counts.data()[i] = 1;
    }
  }
  return m;
}

inline BoolMatrix random_mask(Eigen::Index rows, Eigen::Index cols, double fraction, std::mt19937_64& rng) {
  std::bernoulli_distribution keep(fraction);
  BoolMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = keep(rng);
  return m;
}

// The synthetic benchmark shared by the directional acceptance criteria:
// a 200 m segment over 30 minutes with three stop-and-go bands moving
// upstream at -18 km/h, binned at 10 m x 5 s.
struct Benchmark {
  wavefill::SyntheticFieldSpec field;
  double segment_length_m = 200.0;
  double window_length_s = 1800.0;
  int vehicle_count = 1500;
  double entry_headway_s = 1.0;
  wavefill::GridSpec grid;
  wavefill::SolverConfig solver;
};

inline Benchmark benchmark() {
  Benchmark b;
  b.field.free_flow_speed_kmh = 90.0;
  b.field.jam_speed_kmh = 5.0;
  b.field.wave_speed_kmh = -18.0;
  b.field.wave_band_count = 3;
  b.field.wave_band_width_s = 250.0;
  b.field.wave_spacing_s = 600.0;
  b.field.first_band_start_s = 150.0;
  b.field.noise_std_kmh = 8.0;
  b.field.seed = 7;
  b.grid = {b.segment_length_m, b.window_length_s, 10.0, 5.0, -18.0};
  // 20 rows: one singular value kept out of the threshold.
  b.solver.truncation_fraction = 0.05;
  return b;
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("wavefill-" + tag + "-" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace support

#ifdef DOCTEST_VERSION_STR
// Eigen's printer cannot format enum coefficients.
template <>
struct doctest::StringMaker<wavefill::MaskMatrix> {
  static doctest::String convert(const wavefill::MaskMatrix& m) {
    std::string out;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) out += static_cast<char>('0' + static_cast<int>(m(i, j)));
      out += '\n';
    }
    return out.c_str();
  }
};
#endif
