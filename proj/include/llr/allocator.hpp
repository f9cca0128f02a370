#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include "llr/queueing.hpp"
#include "llr/sim.hpp"

namespace llr {

// Grid of NDS rates to simulate, plus the per-point seed policy: the DS
// stream keeps the base seed across all points (common random numbers),
// the NDS stream gets a per-point offset.
struct SweepConfig {
    double lambda_b_start = 0.0;
    double lambda_b_stop = 0.0;
    int points = 0; // >= 5
    std::uint64_t base_seed = 1;
};

struct SweepPoint {
    double lambda_b = 0.0;          // nominal NDS rate, packets/second
    double lambda_b_measured = 0.0; // delivered NDS packets / duration
    double mean_delay_s = 0.0;      // DS mean sojourn
    double delay_stderr_s = 0.0;
    double lambda_s_measured = 0.0; // DS arrivals / duration
    std::uint64_t ds_samples = 0;
};

struct AllocationReport {
    double lambda_s_measured = 0.0;
    std::optional<double> analytic_max;
    std::optional<double> analytic_pfll;
    double empirical_max = 0.0;
    double empirical_pfll = 0.0;
    double g_argmax = 0.0; // refined argmax of the measured gain curve
    GainCurve g_curve;     // normalized
    GainCurve f_curve;     // normalized
    std::vector<SweepPoint> points;
    double delay_at_zero_s = 0.0;
    double delay_at_pfll_s = 0.0;
    double delay_at_max_s = 0.0;
    double noise_tolerance = 0.0; // 2x stderr of the mean delay estimates
    bool unimodal_warning = false;
};

// Simulates each grid point and records the measured DS delay. The
// lambda_b = 0 point runs without an NDS flow.
std::vector<SweepPoint> sweep_delays(const SimConfig& base, const SweepConfig& sweep);

// Largest NDS rate whose measured DS mean delay stays below the measured
// DS mean inter-arrival time. Refines the bracketing grid interval with
// secant steps (extra simulations) before returning.
double empirical_max_alloc(const SimConfig& base, const SweepConfig& sweep);

// Full empirical pipeline: sweep, f and g curves from measured delays,
// argmax with parabolic refinement. When svc is given the analytic
// allocations are filled in for comparison.
AllocationReport empirical_pfll(const SimConfig& base, const SweepConfig& sweep,
                                std::optional<ServiceModel> svc = std::nullopt);

// (delay ratio, throughput ratio) between the max and the
// proportional-fair allocation; both >= 1 inside the region.
std::pair<double, double> compare_strategies(double lambda_s, const ServiceModel& svc);

struct PercentileRow {
    double lambda_b = 0.0;
    double p50_s = 0.0;
    double p90_s = 0.0;
    double p99_s = 0.0;
};

// DS delay percentiles at the requested NDS rates, one seeded run each.
std::vector<PercentileRow> percentile_impact(const SimConfig& base,
                                             const std::vector<double>& lambda_b_points);

// Vertex of the parabola through the three grid points around the
// discrete argmax; falls back to the grid point at the edges.
double refine_argmax(const std::vector<double>& grid, const std::vector<double>& values);

void write_report_json(std::ostream& out, const AllocationReport& report);
// Plot-ready curves: lambda_b,g_hat,f_hat,mean_delay_s.
void write_curves_csv(std::ostream& out, const AllocationReport& report);

} // namespace llr
