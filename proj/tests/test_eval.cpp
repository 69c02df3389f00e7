#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "support.hpp"
#include "wavefill/error.hpp"
#include "wavefill/eval.hpp"

using namespace wavefill;

namespace {

TrajectorySet small_synthetic() {
  SyntheticFieldSpec f;
  f.wave_band_count = 2;
  f.wave_band_width_s = 100.0;
  f.wave_spacing_s = 250.0;
  f.first_band_start_s = 100.0;
  f.noise_std_kmh = 4.0;
  return generate_synthetic(f, 100.0, 600.0, 400, 1.5).trajectories;
}

SolverConfig quick_solver() {
  SolverConfig c;
  c.truncation_fraction = 0.1;
  c.max_iters = 200;
  return c;
}

}  // namespace

TEST_CASE("metrics over cells observed in the truth") {
  Eigen::MatrixXd t(2, 3), e(2, 3);
  t << 10, 20, 30, 40, 50, 60;
  e << 12, 20, 0, 37, 50, 61;
  support::BoolMatrix obs(2, 3);
  obs << true, true, false, true, true, true;
  const auto truth = support::make_state(t, obs);
  auto est = support::make_state(e, support::BoolMatrix::Constant(2, 3, true));
  const auto m = compute_metrics(est, truth);
  // Errors on evaluated cells: -2, 0, 3, 0, -1.
  CHECK(m.n_cells == 5);
  CHECK(m.rmse_kmh == doctest::Approx(std::sqrt(14.0 / 5.0)));
  CHECK(m.mae_kmh == doctest::Approx(6.0 / 5.0));
}

TEST_CASE("metric failures") {
  Eigen::MatrixXd v = Eigen::MatrixXd::Constant(2, 2, 50.0);
  const auto all = support::BoolMatrix::Constant(2, 2, true);
  const auto truth = support::make_state(v, all);

  auto est = support::make_state(v, all);
  est.values(1, 1) = std::nan("");
  CHECK_THROWS_AS(compute_metrics(est, truth), Error);

  const auto other = support::make_state(Eigen::MatrixXd::Constant(3, 2, 1.0), support::BoolMatrix::Constant(3, 2, true));
  CHECK_THROWS_AS(compute_metrics(other, truth), Error);

  const auto empty = support::make_state(v, support::BoolMatrix::Constant(2, 2, false));
  try {
    compute_metrics(truth, empty);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::EmptyObservation);
  }
}

TEST_CASE("summary statistics") {
  const std::vector<double> xs{7.56, 8.1, 6.9, 7.3, 9.02, 7.77};
  const auto s = summarize(xs);
  CHECK(s.mean == doctest::Approx(46.65 / 6.0).epsilon(1e-14));
  CHECK(std::abs(s.std - oracle::sample_std(xs)) < 1e-12);
  CHECK(summarize({4.0}).std == 0.0);
  CHECK(summarize({}).mean == 0.0);
}

TEST_CASE("seed derivation") {
  static_assert(splitmix64(0) == 0xE220A8397B1DCDAFULL);
  CHECK(derive_seed(42, SeedStream::Sampling, 0) != derive_seed(42, SeedStream::Corruption, 0));
  CHECK(derive_seed(42, SeedStream::Sampling, 0) != derive_seed(42, SeedStream::Sampling, 1));
  CHECK(derive_seed(42, SeedStream::Sampling, 3) ==
        splitmix64(splitmix64(42ULL ^ (1ULL << 32)) + 3));
}

TEST_CASE("geometry names") {
  CHECK(parse_eval_geometry("native") == EvalGeometry::Native);
  CHECK(std::string(to_string(EvalGeometry::Rectangular)) == "rectangular");
  CHECK_THROWS_AS(parse_eval_geometry("diagonal"), Error);
}

TEST_CASE("harness") {
  const auto ts = small_synthetic();
  const GridSpec grid{100.0, 600.0, 10.0, 5.0, -18.0};

  SUBCASE("thread count does not change results") {
    HarnessOptions one, three;
    three.threads = 3;
    const auto a = run_tse_sweep(ts, {grid, grid.rectangular()}, quick_solver(), {0.2, 0.4}, 3, 9, one);
    const auto b = run_tse_sweep(ts, {grid, grid.rectangular()}, quick_solver(), {0.2, 0.4}, 3, 9, three);
    REQUIRE(a.scenarios.size() == 4);
    for (std::size_t i = 0; i < a.scenarios.size(); ++i) {
      CHECK(a.scenarios[i].scenario.label == b.scenarios[i].scenario.label);
      for (std::size_t r = 0; r < 3; ++r) {
        CHECK(a.scenarios[i].repetitions[r].metrics == b.scenarios[i].repetitions[r].metrics);
        CHECK(a.scenarios[i].repetitions[r].iterations == b.scenarios[i].repetitions[r].iterations);
      }
    }
  }

  SUBCASE("a logged repetition replays bit-identically") {
    const auto report = run_rtse_sweep(ts, grid, quick_solver(), 0.4, {0, 3}, 2, 5);
    for (const auto& sr : report.scenarios) {
      for (const auto& rec : sr.repetitions) {
        const auto again =
            run_repetition(ts, sr.scenario, rec.repetition, rec.sample_seed, rec.corruption_seed, HarnessOptions{});
        CHECK(again.metrics == rec.metrics);
        CHECK(rec.sample_seed == derive_seed(5, SeedStream::Sampling, static_cast<std::uint64_t>(rec.repetition)));
      }
    }
    CHECK_FALSE(report.scenarios[0].repetitions[0].detection.has_value());
    CHECK(report.scenarios[1].repetitions[0].detection.has_value());
  }

  SUBCASE("scenarios share the vehicle sample of a repetition") {
    const auto report = run_wave_sensitivity(ts, grid, quick_solver(), {-12.0, -18.0}, 0.3, 2, 1);
    CHECK(report.scenarios[0].repetitions[1].sample_seed == report.scenarios[1].repetitions[1].sample_seed);
  }

  SUBCASE("native geometry scores on the estimation grid") {
    HarnessOptions native;
    native.geometry = EvalGeometry::Native;
    const Scenario sc{"x", grid, quick_solver(), 0.5, {}};
    const auto rec = run_repetition(ts, sc, 0, 1, 2, native);
    const auto truth = ground_truth_matrix(ts, grid);
    CHECK(rec.metrics.n_cells == truth.observed_count());
  }

  SUBCASE("ablation scenarios") {
    const auto report = run_ablations(ts, grid, quick_solver(), 1, 3, {}, 0.5, 2);
    REQUIRE(report.scenarios.size() == 4);
    CHECK(report.scenarios[0].scenario.label == "full model");
    CHECK_FALSE(report.scenarios[1].scenario.grid.oblique());
    CHECK(report.scenarios[2].scenario.solver.rank_surrogate == RankSurrogate::ConvexNuclear);
    CHECK_FALSE(report.scenarios[3].scenario.solver.sparse_term_enabled);
  }

  SUBCASE("failures carry the scenario and seeds") {
    try {
      run_rtse_sweep(ts, grid, quick_solver(), 0.2, {100000}, 1, 5);
      FAIL("expected a capacity error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Capacity);
      const std::string msg = e.what();
      CHECK(msg.find("repetition 0") != std::string::npos);
      CHECK(msg.find(std::to_string(derive_seed(5, SeedStream::Sampling, 0))) != std::string::npos);
    }
  }
}
