#include "llr/allocator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

namespace llr {

namespace {

constexpr std::uint64_t kNdsSeedStride = 0xD1B54A32D192ED03ull;

SimConfig point_config(const SimConfig& base, const SweepConfig& sweep, double lambda_b,
                       std::uint64_t point_index) {
    SimConfig cfg = base;
    cfg.ds_seed = sweep.base_seed; // common random numbers for the DS stream
    cfg.nds_seed = sweep.base_seed ^ (kNdsSeedStride * (point_index + 1));
    if (lambda_b > 0.0) {
        cfg.nds_arrivals = PoissonArrivals{lambda_b};
    } else {
        cfg.nds_arrivals.reset();
    }
    return cfg;
}

SweepPoint run_point(const SimConfig& base, const SweepConfig& sweep, double lambda_b,
                     std::uint64_t point_index) {
    const SimResult r = run(point_config(base, sweep, lambda_b, point_index));
    SweepPoint p;
    p.lambda_b = lambda_b;
    p.lambda_b_measured = lambda_b > 0.0 ? r.arrival_rate(Flow::nds) : 0.0;
    p.mean_delay_s = r.ds.mean_delay();
    p.delay_stderr_s = r.ds.delay_stderr();
    // Rate of DS arrival events: for batched traffic the region budget is
    // the mean time between batches, not between packets.
    p.lambda_s_measured = r.event_rate(Flow::ds);
    p.ds_samples = r.ds.delays.size();
    return p;
}

void validate(const SweepConfig& sweep) {
    if (sweep.points < 5)
        throw std::invalid_argument("sweep: need at least 5 grid points");
    if (!(sweep.lambda_b_stop > sweep.lambda_b_start))
        throw std::invalid_argument("sweep: grid step must be > 0");
    if (sweep.lambda_b_start < 0.0)
        throw std::invalid_argument("sweep: negative lambda_b");
}

// Indices >= 1000 are reserved for refinement runs so their NDS seeds
// never collide with grid points.
constexpr std::uint64_t kRefineIndexBase = 1000;

struct Crossing {
    double lambda_b_plus;
    double delay_at_plus;
};

// Locates where the measured DS delay crosses the measured DS
// inter-arrival time, then tightens the bracket with secant steps.
Crossing find_crossing(const SimConfig& base, const SweepConfig& sweep,
                       const std::vector<SweepPoint>& points) {
    auto slack = [](const SweepPoint& p) {
        return p.mean_delay_s - 1.0 / p.lambda_s_measured; // <= 0 inside the region
    };
    if (slack(points.front()) > 0.0)
        throw out_of_region_error(
            "empirical_max_alloc: DS flow is outside the low-latency region at lambda_b=0");
    std::size_t lo = 0;
    while (lo + 1 < points.size() && slack(points[lo + 1]) <= 0.0) ++lo;
    if (lo + 1 == points.size())
        throw std::runtime_error(
            "empirical_max_alloc: the grid never violates the delay condition; extend it");

    double x_lo = points[lo].lambda_b, h_lo = slack(points[lo]);
    double x_hi = points[lo + 1].lambda_b, h_hi = slack(points[lo + 1]);
    double x_mid = x_lo, delay_mid = points[lo].mean_delay_s;
    for (int iter = 0; iter < 2; ++iter) {
        x_mid = x_lo + (x_hi - x_lo) * (-h_lo) / (h_hi - h_lo);
        const SweepPoint p = run_point(base, sweep, x_mid, kRefineIndexBase + iter);
        delay_mid = p.mean_delay_s;
        const double h_mid = slack(p);
        if (h_mid <= 0.0) {
            x_lo = x_mid;
            h_lo = h_mid;
        } else {
            x_hi = x_mid;
            h_hi = h_mid;
        }
    }
    const double x_final = x_lo + (x_hi - x_lo) * (-h_lo) / (h_hi - h_lo);
    return {x_final, delay_mid};
}

} // namespace

std::vector<SweepPoint> sweep_delays(const SimConfig& base, const SweepConfig& sweep) {
    validate(sweep);
    std::vector<SweepPoint> points;
    points.reserve(static_cast<std::size_t>(sweep.points));
    const double step =
        (sweep.lambda_b_stop - sweep.lambda_b_start) / (sweep.points - 1);
    for (int i = 0; i < sweep.points; ++i) {
        const double lambda_b = sweep.lambda_b_start + step * i;
        points.push_back(run_point(base, sweep, lambda_b, static_cast<std::uint64_t>(i)));
    }
    return points;
}

double empirical_max_alloc(const SimConfig& base, const SweepConfig& sweep) {
    const auto points = sweep_delays(base, sweep);
    return find_crossing(base, sweep, points).lambda_b_plus;
}

double refine_argmax(const std::vector<double>& grid, const std::vector<double>& values) {
    if (grid.size() != values.size() || grid.empty())
        throw std::invalid_argument("refine_argmax: bad curve");
    const std::size_t i = static_cast<std::size_t>(
        std::max_element(values.begin(), values.end()) - values.begin());
    if (i == 0 || i + 1 == grid.size()) return grid[i];
    const double x0 = grid[i - 1], x1 = grid[i], x2 = grid[i + 1];
    const double y0 = values[i - 1], y1 = values[i], y2 = values[i + 1];
    const double d01 = x1 - x0, d12 = x1 - x2;
    const double denom = d01 * (y1 - y2) - d12 * (y1 - y0);
    if (std::abs(denom) < 1e-300) return x1;
    const double vertex =
        x1 - 0.5 * (d01 * d01 * (y1 - y2) - d12 * d12 * (y1 - y0)) / denom;
    return std::clamp(vertex, x0, x2);
}

AllocationReport empirical_pfll(const SimConfig& base, const SweepConfig& sweep,
                                std::optional<ServiceModel> svc) {
    auto points = sweep_delays(base, sweep);
    if (points.front().lambda_b > 0.0) {
        // The f and g curves need the no-background baseline.
        points.insert(points.begin(),
                      run_point(base, sweep, 0.0, kRefineIndexBase + 10));
    }
    const Crossing crossing = find_crossing(base, sweep, points);

    AllocationReport report;
    report.points = points;
    report.lambda_s_measured = points.front().lambda_s_measured;
    report.empirical_max = crossing.lambda_b_plus;
    report.delay_at_zero_s = points.front().mean_delay_s;

    // Measured delay at the max allocation itself (also the f anchor).
    const SweepPoint at_plus =
        run_point(base, sweep, crossing.lambda_b_plus, kRefineIndexBase + 11);
    report.delay_at_max_s = at_plus.mean_delay_s;

    std::vector<double> grid, f_vals, g_vals, delays;
    double max_se = 0.0;
    for (const auto& p : points) {
        if (p.lambda_b > crossing.lambda_b_plus) break;
        grid.push_back(p.lambda_b);
        delays.push_back(p.mean_delay_s);
        f_vals.push_back(p.lambda_b * (at_plus.mean_delay_s - p.mean_delay_s));
        g_vals.push_back(p.lambda_b_measured / p.lambda_s_measured -
                         (p.mean_delay_s - report.delay_at_zero_s) /
                             report.delay_at_zero_s);
        max_se = std::max(max_se, p.delay_stderr_s);
    }
    // Close both curves at the max allocation; f vanishes there by
    // construction.
    grid.push_back(crossing.lambda_b_plus);
    delays.push_back(at_plus.mean_delay_s);
    f_vals.push_back(0.0);
    g_vals.push_back(at_plus.lambda_b_measured / at_plus.lambda_s_measured -
                     (at_plus.mean_delay_s - report.delay_at_zero_s) /
                         report.delay_at_zero_s);
    max_se = std::max(max_se, at_plus.delay_stderr_s);
    report.noise_tolerance = 2.0 * max_se;

    report.empirical_pfll = refine_argmax(grid, f_vals);
    report.g_argmax = refine_argmax(grid, g_vals);

    // Unimodality check: count local maxima of f separated by more than
    // the noise tolerance (in f units, scaled by the rate at the peak).
    {
        const double tol = report.noise_tolerance * report.empirical_pfll;
        int maxima = 0;
        for (std::size_t i = 1; i + 1 < f_vals.size(); ++i) {
            if (f_vals[i] > f_vals[i - 1] + tol && f_vals[i] > f_vals[i + 1] + tol)
                ++maxima;
        }
        report.unimodal_warning = maxima > 1;
    }

    const SweepPoint at_pfll =
        run_point(base, sweep, report.empirical_pfll, kRefineIndexBase + 12);
    report.delay_at_pfll_s = at_pfll.mean_delay_s;

    GainCurve f_curve, g_curve;
    f_curve.lambda_b_grid = grid;
    f_curve.values = f_vals;
    f_curve.argmax_rate = report.empirical_pfll;
    g_curve.lambda_b_grid = grid;
    g_curve.values = g_vals;
    g_curve.argmax_rate = report.g_argmax;
    if (!f_vals.empty()) {
        f_curve.argmax_value = *std::max_element(f_vals.begin(), f_vals.end());
        g_curve.argmax_value = *std::max_element(g_vals.begin(), g_vals.end());
    }
    report.f_curve = normalize_curve(f_curve);
    report.g_curve = normalize_curve(g_curve);

    if (svc) {
        report.analytic_max = max_alloc(report.lambda_s_measured, *svc);
        report.analytic_pfll = pfll_alloc(report.lambda_s_measured, *svc);
    }
    return report;
}

std::pair<double, double> compare_strategies(double lambda_s, const ServiceModel& svc) {
    const double lb_plus = max_alloc(lambda_s, svc);
    const double lb_star = pfll_alloc(lambda_s, svc);
    if (!(lb_star > 0.0))
        throw std::domain_error(
            "compare_strategies: PFLL allocation is zero at this lambda_s; "
            "ratios are undefined");
    const double d_plus = mean_delay({lambda_s, lb_plus}, svc);
    const double d_star = mean_delay({lambda_s, lb_star}, svc);
    return {d_plus / d_star, lb_plus / lb_star};
}

std::vector<PercentileRow> percentile_impact(const SimConfig& base,
                                             const std::vector<double>& lambda_b_points) {
    std::vector<PercentileRow> rows;
    rows.reserve(lambda_b_points.size());
    std::uint64_t index = 0;
    for (double lambda_b : lambda_b_points) {
        SimConfig cfg = base;
        cfg.nds_seed = base.nds_seed ^ (kNdsSeedStride * (index + 1));
        if (lambda_b > 0.0) {
            cfg.nds_arrivals = PoissonArrivals{lambda_b};
        } else {
            cfg.nds_arrivals.reset();
        }
        const SimResult r = run(cfg);
        rows.push_back({lambda_b, delay_percentile(r, Flow::ds, 0.5),
                        delay_percentile(r, Flow::ds, 0.9),
                        delay_percentile(r, Flow::ds, 0.99)});
        ++index;
    }
    return rows;
}

void write_report_json(std::ostream& out, const AllocationReport& report) {
    nlohmann::ordered_json j;
    j["lambda_s_measured"] = report.lambda_s_measured;
    if (report.analytic_max) j["analytic_max"] = *report.analytic_max;
    if (report.analytic_pfll) j["analytic_pfll"] = *report.analytic_pfll;
    j["empirical_max"] = report.empirical_max;
    j["empirical_pfll"] = report.empirical_pfll;
    j["g_argmax"] = report.g_argmax;
    j["delay_at_zero_s"] = report.delay_at_zero_s;
    j["delay_at_pfll_s"] = report.delay_at_pfll_s;
    j["delay_at_max_s"] = report.delay_at_max_s;
    j["noise_tolerance"] = report.noise_tolerance;
    j["unimodal_warning"] = report.unimodal_warning;
    j["g_curve"] = {{"lambda_b", report.g_curve.lambda_b_grid},
                    {"values", report.g_curve.values}};
    j["f_curve"] = {{"lambda_b", report.f_curve.lambda_b_grid},
                    {"values", report.f_curve.values}};
    nlohmann::ordered_json pts = nlohmann::ordered_json::array();
    for (const auto& p : report.points) {
        pts.push_back({{"lambda_b", p.lambda_b},
                       {"lambda_b_measured", p.lambda_b_measured},
                       {"mean_delay_s", p.mean_delay_s},
                       {"delay_stderr_s", p.delay_stderr_s},
                       {"lambda_s_measured", p.lambda_s_measured},
                       {"ds_samples", p.ds_samples}});
    }
    j["points"] = std::move(pts);
    out << j.dump(2) << '\n';
}

void write_curves_csv(std::ostream& out, const AllocationReport& report) {
    out << "lambda_b,g_hat,f_hat,mean_delay_s\n";
    char buf[160];
    for (std::size_t i = 0; i < report.g_curve.lambda_b_grid.size(); ++i) {
        const double lb = report.g_curve.lambda_b_grid[i];
        double delay = report.delay_at_max_s;
        for (const auto& p : report.points) {
            if (p.lambda_b == lb) {
                delay = p.mean_delay_s;
                break;
            }
        }
        std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.10g,%.10g\n", lb,
                      report.g_curve.values[i], report.f_curve.values[i], delay);
        out << buf;
    }
}

} // namespace llr
