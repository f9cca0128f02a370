#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "llr/traffic.hpp"

namespace llr {

enum class Flow { ds, nds };

struct HorizonSpec {
    double max_time_s = std::numeric_limits<double>::infinity();
    std::uint64_t max_delivered = std::numeric_limits<std::uint64_t>::max();
};

struct SimConfig {
    double link_rate_bps = 1.0;
    ArrivalModel ds_arrivals;
    SizeModel ds_sizes;
    std::optional<ArrivalModel> nds_arrivals;
    SizeModel nds_sizes = ExponentialSizes{10000.0};
    HorizonSpec horizon;
    double warmup_fraction = 0.1; // in [0, 0.5]
    std::uint64_t ds_seed = 1;
    std::uint64_t nds_seed = 2;
    std::uint64_t queue_abort_threshold = 10'000'000;
    double batch_gap_threshold_s = kDefaultBatchGapThreshold;
    bool record_packets = false;
};

struct PacketLog {
    Flow flow;
    double arrival_s;
    double departure_s;
};

struct FlowStats {
    std::vector<double> delays; // post-warmup sojourn times, seconds
    std::uint64_t arrived = 0;
    // Arrival events: packets whose gap to the previous arrival of the
    // same flow is at least the batch gap threshold, so a batch counts
    // once. Equals `arrived` for non-batched traffic.
    std::uint64_t arrival_events = 0;
    std::uint64_t delivered = 0;
    double delivered_bits = 0.0;
    std::uint64_t warmup_discarded = 0;

    double mean_delay() const;
    double delay_stderr() const; // sd of samples / sqrt(n)
};

struct SimResult {
    FlowStats ds;
    FlowStats nds;
    double duration_s = 0.0; // simulated time at the last processed event

    double arrival_rate(Flow f) const; // arrived packets / duration
    double event_rate(Flow f) const;   // arrival events (batches) / duration
    // Per-packet log, populated only when SimConfig::record_packets.
    std::vector<PacketLog> packets;
};

// Runs the FIFO link simulation to the configured horizon. Deterministic
// given the seeds. Throws queue_overflow_error when the backlog crosses
// the abort threshold, trace_error when no packet arrives in the horizon.
SimResult run(const SimConfig& config);

// Empirical delay cdf evaluated at the grid points.
std::vector<double> delay_cdf(const SimResult& result, Flow flow,
                              const std::vector<double>& grid_s);

// Nearest-rank percentile, 0 < p < 1.
double delay_percentile(const SimResult& result, Flow flow, double p);

} // namespace llr
