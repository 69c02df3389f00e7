#include "wavefill/matrix_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "wavefill/error.hpp"
#include "wavefill/io.hpp"
#include "wavefill/serialize.hpp"

namespace wavefill {

namespace {

template <typename Matrix, typename Encode>
json run_length(const Matrix& m, Encode encode) {
  json runs = json::array();
  bool open = false;
  std::int64_t current = 0;
  std::int64_t length = 0;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const auto v = encode(m(r, c));
      if (open && v == current) {
        ++length;
        continue;
      }
      if (open) runs.push_back({current, length});
      current = v;
      length = 1;
      open = true;
    }
  }
  if (open) runs.push_back({current, length});
  return runs;
}

template <typename Matrix, typename Decode>
void decode_runs(const json& runs, Matrix& m, Decode decode, const std::string& what) {
  Eigen::Index pos = 0;
  const Eigen::Index total = m.rows() * m.cols();
  if (!runs.is_array()) fail(ErrorKind::Parse, what + " must be an array of [value, run] pairs");
  for (const auto& run : runs) {
    if (!run.is_array() || run.size() != 2 || !run[0].is_number_integer() || !run[1].is_number_integer()) {
      fail(ErrorKind::Parse, what + " must be an array of [value, run] pairs");
    }
    const auto value = run[0].get<std::int64_t>();
    const auto length = run[1].get<std::int64_t>();
    if (length <= 0 || pos + length > total) fail(ErrorKind::Parse, what + " run lengths do not match the shape");
    for (std::int64_t k = 0; k < length; ++k, ++pos) m(pos / m.cols(), pos % m.cols()) = decode(value);
  }
  if (pos != total) fail(ErrorKind::Parse, what + " run lengths do not cover the matrix");
}

}  // namespace

std::string state_matrix_csv(const StateMatrix& m) {
  std::string out;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c > 0) out += ',';
      out += format_fixed(m.values(r, c));
    }
    out += '\n';
  }
  return out;
}

std::string state_matrix_sidecar(const StateMatrix& m) {
  json j;
  j["format"] = "wavefill-state-matrix";
  j["version"] = 1;
  j["grid"] = to_json(m.grid);
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  j["mask_codes"] = {{"observed", 0}, {"missing", 1}, {"out_of_domain", 2}};
  j["mask_rle"] = run_length(m.mask, [](CellState s) { return static_cast<std::int64_t>(s); });
  j["counts_rle"] = run_length(m.counts, [](std::int64_t n) { return n; });
  return dump(j);
}

StateMatrix parse_state_matrix(const std::string& csv, const std::string& sidecar) {
  json j;
  try {
    j = json::parse(sidecar);
  } catch (const json::exception& e) {
    fail(ErrorKind::Parse, std::string("matrix sidecar is not valid JSON: ") + e.what());
  }
  if (!j.is_object() || j.value("format", "") != "wavefill-state-matrix") {
    fail(ErrorKind::Parse, "matrix sidecar has an unexpected format tag");
  }
  StateMatrix m;
  try {
    m.grid = grid_from_json(j.at("grid"), "grid");
  } catch (const Error& e) {
    fail(ErrorKind::Parse, std::string("matrix sidecar: ") + e.what());
  }
  const auto rows = j.value("rows", Eigen::Index{-1});
  const auto cols = j.value("cols", Eigen::Index{-1});
  if (rows != m.grid.rows() || cols != m.grid.cols()) fail(ErrorKind::Parse, "matrix sidecar shape disagrees with its grid");

  m.mask.resize(rows, cols);
  m.counts.resize(rows, cols);
  decode_runs(j.at("mask_rle"), m.mask, [](std::int64_t v) {
    if (v < 0 || v > 2) fail(ErrorKind::Parse, "mask code out of range");
    return static_cast<CellState>(v);
  }, "mask_rle");
  decode_runs(j.at("counts_rle"), m.counts, [](std::int64_t v) { return v; }, "counts_rle");

  m.values.resize(rows, cols);
  std::istringstream in(csv);
  std::string line;
  Eigen::Index r = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    if (r >= rows) fail(ErrorKind::Parse, "matrix CSV has more than " + std::to_string(rows) + " rows");
    const auto fields = split_fields(line, ',');
    if (static_cast<Eigen::Index>(fields.size()) != cols) {
      fail(ErrorKind::Parse, "matrix CSV line " + std::to_string(r + 1) + ": expected " + std::to_string(cols) +
                                 " fields");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      const auto f = fields[static_cast<std::size_t>(c)];
      if (f == "nan") {
        m.values(r, c) = std::numeric_limits<double>::quiet_NaN();
        continue;
      }
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (ec != std::errc() || ptr != f.data() + f.size()) {
        fail(ErrorKind::Parse, "matrix CSV line " + std::to_string(r + 1) + ": non-numeric value '" +
                                   std::string(f) + "'");
      }
      m.values(r, c) = v;
    }
    ++r;
  }
  if (r != rows) fail(ErrorKind::Parse, "matrix CSV has " + std::to_string(r) + " rows, expected " + std::to_string(rows));
  return m;
}

void save_state_matrix(const std::filesystem::path& stem, const StateMatrix& m) {
  auto csv = stem;
  csv += ".csv";
  auto side = stem;
  side += ".json";
  write_atomic(csv, state_matrix_csv(m));
  write_atomic(side, state_matrix_sidecar(m));
}

StateMatrix load_state_matrix(const std::filesystem::path& stem) {
  auto csv = stem;
  csv += ".csv";
  auto side = stem;
  side += ".json";
  return parse_state_matrix(read_file(csv), read_file(side));
}

std::string heatmap_pgm(const StateMatrix& m, double v_max_kmh) {
  if (!(v_max_kmh > 0.0)) fail(ErrorKind::Parameter, "heatmap v_max must be positive");
  std::string out = "P5\n" + std::to_string(m.cols()) + " " + std::to_string(m.rows()) + "\n255\n";
  out.reserve(out.size() + static_cast<std::size_t>(m.rows() * m.cols()));
  for (Eigen::Index r = m.rows() - 1; r >= 0; --r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const double v = m.values(r, c);
      long level = 0;
      if (std::isfinite(v)) level = std::clamp(std::lround(255.0 * v / v_max_kmh), 0L, 255L);
      out.push_back(static_cast<char>(static_cast<unsigned char>(level)));
    }
  }
  return out;
}

void save_heatmap(const std::filesystem::path& path, const StateMatrix& m, double v_max_kmh) {
  write_atomic(path, heatmap_pgm(m, v_max_kmh));
}

}  // namespace wavefill
