#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "llr/errors.hpp"

namespace llr {

// One packet of a trace. Timestamps are seconds since trace start,
// sizes are stored in bits (the on-disk format uses bytes).
struct TraceRecord {
    double timestamp = 0.0;
    double size_bits = 0.0;
};

struct PoissonArrivals {
    double rate = 0.0; // packets/second
};

struct TraceReplayArrivals {
    std::shared_ptr<const std::vector<TraceRecord>> records;
    bool loop = false;
};

struct BatchSizeDist {
    enum class Kind { deterministic, geometric };
    Kind kind = Kind::deterministic;
    double mean = 1.0; // packets per batch event, >= 1
};

struct BatchPoissonArrivals {
    double batch_rate = 0.0; // batch events/second
    BatchSizeDist batch_size;
    double intra_batch_gap = 10e-6; // spacing of packets within a batch
};

using ArrivalModel =
    std::variant<PoissonArrivals, TraceReplayArrivals, BatchPoissonArrivals>;

struct ExponentialSizes {
    double mean_bits = 0.0;
};
struct DeterministicSizes {
    double bits = 0.0;
};
// Sizes taken from the replayed trace records, in replay order.
struct EmpiricalSizes {};

using SizeModel = std::variant<ExponentialSizes, DeterministicSizes, EmpiricalSizes>;

// Trace characterization. Inter-arrival statistics are measured between
// batch starts, where a batch is a maximal run of packets whose
// consecutive gaps stay below the gap threshold.
struct TraceStats {
    double load_bps = 0.0;
    double mean_iat_s = 0.0;     // E[tau], between batch starts
    double cv_iat = 0.0;         // C_tau
    double mean_size_bytes = 0.0;
    double cv_service = 0.0;     // C_S against link_rate_bps
    double mean_batch_size = 0.0;
    double link_rate_bps = 0.0;  // rate the service-time cv was computed with
    std::size_t packet_count = 0;
    std::size_t batch_count = 0;
};

constexpr double kDefaultBatchGapThreshold = 100e-6;

// CSV trace I/O. Header `timestamp_s,size_bytes`, one packet per row.
// Records come back sorted by timestamp; *reordered is set when the
// input was out of order.
std::vector<TraceRecord> load_trace(std::istream& in, bool* reordered = nullptr);
std::vector<TraceRecord> load_trace_file(const std::string& path, bool* reordered = nullptr);
void write_trace(std::ostream& out, const std::vector<TraceRecord>& records);
void write_trace_file(const std::string& path, const std::vector<TraceRecord>& records);

TraceStats trace_stats(const std::vector<TraceRecord>& records, double link_rate_bps,
                       double batch_gap_threshold = kDefaultBatchGapThreshold);

// Next batch of arrivals: epoch plus packet count. Single packets are
// batches of one.
struct ArrivalEvent {
    double time = 0.0;
    int count = 1;
};

// Stateful generator over an ArrivalModel. Holds its own RNG; instances
// are not shareable across threads. next() returns nullopt when a
// non-looping trace is exhausted.
class ArrivalGenerator {
public:
    ArrivalGenerator(ArrivalModel model, std::uint64_t seed);

    std::optional<ArrivalEvent> next();

private:
    ArrivalModel model_;
    std::mt19937_64 rng_;
    double now_ = 0.0;
    std::size_t trace_index_ = 0;
    std::uint64_t loop_count_ = 0;
};

// Flattens batch events into per-packet arrivals with sizes attached.
// For TraceReplayArrivals + EmpiricalSizes the sizes come from the
// replayed records themselves.
class PacketSource {
public:
    struct Arrival {
        double time = 0.0;
        double size_bits = 0.0;
    };

    PacketSource(ArrivalModel arrivals, SizeModel sizes, std::uint64_t seed);

    std::optional<Arrival> next();

private:
    double draw_size();

    ArrivalGenerator gen_;
    SizeModel sizes_;
    std::mt19937_64 size_rng_;
    std::shared_ptr<const std::vector<TraceRecord>> trace_; // for empirical sizes
    std::size_t trace_index_ = 0;
    double intra_gap_ = 0.0;
    // packets of the current batch not yet emitted
    double batch_time_ = 0.0;
    int batch_left_ = 0;
};

// Builds a batch-arrival trace whose measured statistics match the
// target on load, E[tau], E[Ls] and E[sigma]. Batch sizes are shifted
// geometric (mean E[sigma]), packet sizes deterministic at E[Ls], and
// inter-batch gaps shifted exponential with a floor that keeps batches
// separable at the default gap threshold. C_tau and C_S are emergent.
std::vector<TraceRecord> synthesize_trace(const TraceStats& target, double duration_s,
                                          std::uint64_t seed,
                                          double intra_batch_gap = 70e-6,
                                          double batch_gap_floor = 250e-6);

// Reference downlink workload profiles of a cloud-gaming stream, one
// per video resolution.
namespace profiles {
TraceStats cloud_gaming_720p();
TraceStats cloud_gaming_1080p();
TraceStats cloud_gaming_2160p();
// Lookup by name ("720p", "1080p", "2160p").
TraceStats by_name(const std::string& name);
} // namespace profiles

} // namespace llr
