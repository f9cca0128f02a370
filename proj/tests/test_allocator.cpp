#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "llr/allocator.hpp"

using namespace llr;

namespace {

SimConfig poisson_base(double lambda_s, double cv, std::uint64_t packets) {
    SimConfig cfg;
    cfg.link_rate_bps = 1.0; // mu = 1 with unit packet sizes
    cfg.ds_arrivals = PoissonArrivals{lambda_s};
    if (cv == 0.0) {
        cfg.ds_sizes = DeterministicSizes{1.0};
        cfg.nds_sizes = DeterministicSizes{1.0};
    } else {
        cfg.ds_sizes = ExponentialSizes{1.0};
        cfg.nds_sizes = ExponentialSizes{1.0};
    }
    cfg.horizon.max_delivered = packets;
    return cfg;
}

} // namespace

TEST_CASE("sweep config validation") {
    const auto base = poisson_base(0.25, 1.0, 1000);
    CHECK_THROWS_AS(sweep_delays(base, {0.0, 0.5, 3, 1}), std::invalid_argument);
    CHECK_THROWS_AS(sweep_delays(base, {0.5, 0.5, 10, 1}), std::invalid_argument);
}

TEST_CASE("empirical max allocation recovers mu - 2 lambda_s") {
    // lambda_s = 0.25, cv = 1: analytic max allocation is 0.5
    const auto base = poisson_base(0.25, 1.0, 200'000);
    SweepConfig sweep{0.0, 0.66, 12, 101};
    const double est = empirical_max_alloc(base, sweep);
    CHECK(est == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("empirical max allocation error paths") {
    // outside the region already at lambda_b = 0
    SimConfig outside = poisson_base(0.6, 1.0, 50'000);
    CHECK_THROWS_AS(empirical_max_alloc(outside, {0.0, 0.3, 6, 1}),
                    out_of_region_error);
    // grid that never reaches the crossing
    const auto base = poisson_base(0.25, 1.0, 50'000);
    CHECK_THROWS_AS(empirical_max_alloc(base, {0.0, 0.2, 5, 1}), std::runtime_error);
}

TEST_CASE("empirical pfll recovers the analytic allocation") {
    const auto svc = ServiceModel::from_rate(1.0, 1.0);
    const auto base = poisson_base(0.1, 1.0, 400'000);
    SweepConfig sweep{0.0, 0.86, 23, 2024};
    const auto report = empirical_pfll(base, sweep, svc);
    CHECK(report.empirical_pfll == doctest::Approx(0.6).epsilon(0.05));
    CHECK(report.empirical_max == doctest::Approx(0.8).epsilon(0.05));
    CHECK(*report.analytic_pfll == doctest::Approx(0.6).epsilon(0.02));
    CHECK(report.empirical_pfll <= report.empirical_max);
    // f and g argmax agree within one grid step
    const double step = 0.86 / 22.0;
    CHECK(std::abs(report.empirical_pfll - report.g_argmax) <= step);
    // delays are ordered baseline <= pfll <= max (up to noise)
    CHECK(report.delay_at_zero_s <=
          report.delay_at_pfll_s + report.noise_tolerance);
    CHECK(report.delay_at_pfll_s <= report.delay_at_max_s + report.noise_tolerance);
    // both curves normalized to a unit peak, f pinned to 0 at the ends
    CHECK(report.f_curve.values.front() == doctest::Approx(0.0));
    CHECK(report.f_curve.values.back() == doctest::Approx(0.0));
    CHECK(*std::max_element(report.f_curve.values.begin(),
                            report.f_curve.values.end()) == doctest::Approx(1.0));
    CHECK(*std::max_element(report.g_curve.values.begin(),
                            report.g_curve.values.end()) == doctest::Approx(1.0));
}

TEST_CASE("report serialization round trip") {
    const auto base = poisson_base(0.2, 1.0, 40'000);
    SweepConfig sweep{0.0, 0.66, 8, 5};
    const auto report = empirical_pfll(base, sweep);
    std::ostringstream json_out, csv_out;
    write_report_json(json_out, report);
    write_curves_csv(csv_out, report);
    CHECK(json_out.str().find("empirical_pfll") != std::string::npos);
    // header plus one row per curve point
    std::size_t lines = 0;
    for (char c : csv_out.str())
        if (c == '\n') ++lines;
    CHECK(lines == report.g_curve.lambda_b_grid.size() + 1);
    CHECK(csv_out.str().rfind("lambda_b,g_hat,f_hat,mean_delay_s\n", 0) == 0);
}

TEST_CASE("compare_strategies") {
    const auto mm1 = ServiceModel::from_rate(1.0, 1.0);
    const auto [dr, tr] = compare_strategies(0.1, mm1);
    CHECK(dr == doctest::Approx(3.0));
    CHECK(tr == doctest::Approx(0.8 / 0.6));

    const auto md1 = ServiceModel::from_rate(1.0, 0.0);
    const auto [dr0, tr0] = compare_strategies(0.05, md1);
    CHECK(dr0 == doctest::Approx(5.40).epsilon(0.01));
    CHECK(tr0 == doctest::Approx(1.164).epsilon(0.01));

    // both ratios >= 1 across the region, throughput ratio grows near the edge
    double prev_tr = 0.0;
    for (int i = 1; i <= 9; ++i) {
        const double ls = 0.5 * i / 10.0;
        const auto [d, t] = compare_strategies(ls, mm1);
        CHECK(d >= 1.0);
        CHECK(t >= 1.0);
        CHECK(t > prev_tr);
        prev_tr = t;
    }
    // undefined at the boundary where the pfll allocation vanishes
    CHECK_THROWS_AS(compare_strategies(0.5, mm1), std::domain_error);
}

TEST_CASE("refine_argmax") {
    // exact quadratic: peak at 0.35
    std::vector<double> grid{0.1, 0.2, 0.3, 0.4, 0.5};
    std::vector<double> vals;
    for (double x : grid) vals.push_back(-(x - 0.35) * (x - 0.35));
    CHECK(refine_argmax(grid, vals) == doctest::Approx(0.35).epsilon(1e-12));
    // edge maximum falls back to the grid point
    std::vector<double> rising{0.0, 1.0, 2.0, 3.0, 4.0};
    CHECK(refine_argmax(grid, rising) == doctest::Approx(0.5));
}

TEST_CASE("percentile_impact ordering under background load") {
    auto base = poisson_base(0.25, 1.0, 150'000);
    base.ds_seed = 9;
    base.nds_seed = 10;
    const auto rows = percentile_impact(base, {0.0, 0.25, 0.5});
    REQUIRE(rows.size() == 3);
    // more background traffic pushes every percentile up
    CHECK(rows[1].p90_s > rows[0].p90_s);
    CHECK(rows[2].p90_s > rows[1].p90_s);
    CHECK(rows[2].p50_s > rows[0].p50_s);
    // M/M/1 p90 oracle at total load 0.5
    CHECK(rows[1].p90_s == doctest::Approx(-std::log(0.1) / 0.5).epsilon(0.05));
}
