#include "llr/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace llr {

namespace {

constexpr std::uint64_t kSeedMix = 0x9E3779B97F4A7C15ull;

double parse_double_field(const std::string& field, std::size_t line_no, const char* what) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(field, &pos);
    } catch (const std::exception&) {
        throw trace_error("trace line " + std::to_string(line_no) + ": bad " + what + " '" +
                          field + "'");
    }
    if (pos != field.size())
        throw trace_error("trace line " + std::to_string(line_no) + ": bad " + what + " '" +
                          field + "'");
    return v;
}

} // namespace

std::vector<TraceRecord> load_trace(std::istream& in, bool* reordered) {
    if (reordered) *reordered = false;
    std::string line;
    if (!std::getline(in, line))
        throw trace_error("empty trace file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "timestamp_s,size_bytes")
        throw trace_error("trace header must be 'timestamp_s,size_bytes', got '" + line + "'");

    std::vector<TraceRecord> records;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw trace_error("trace line " + std::to_string(line_no) + ": missing comma");
        const double ts = parse_double_field(line.substr(0, comma), line_no, "timestamp");
        const double bytes = parse_double_field(line.substr(comma + 1), line_no, "size");
        if (!(bytes > 0.0))
            throw trace_error("trace line " + std::to_string(line_no) + ": size must be > 0");
        records.push_back({ts, bytes * 8.0});
    }
    if (records.empty())
        throw trace_error("trace has a header but no packets");

    if (!std::is_sorted(records.begin(), records.end(),
                        [](const TraceRecord& a, const TraceRecord& b) {
                            return a.timestamp < b.timestamp;
                        })) {
        if (reordered) *reordered = true;
        std::stable_sort(records.begin(), records.end(),
                         [](const TraceRecord& a, const TraceRecord& b) {
                             return a.timestamp < b.timestamp;
                         });
    }
    return records;
}

std::vector<TraceRecord> load_trace_file(const std::string& path, bool* reordered) {
    std::ifstream in(path);
    if (!in) throw trace_error("cannot open trace file '" + path + "'");
    return load_trace(in, reordered);
}

void write_trace(std::ostream& out, const std::vector<TraceRecord>& records) {
    out << "timestamp_s,size_bytes\n";
    char buf[64];
    for (const auto& r : records) {
        std::snprintf(buf, sizeof buf, "%.9f,%lld\n", r.timestamp,
                      static_cast<long long>(std::llround(r.size_bits / 8.0)));
        out << buf;
    }
}

void write_trace_file(const std::string& path, const std::vector<TraceRecord>& records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw trace_error("cannot open '" + path + "' for writing");
    write_trace(out, records);
}

TraceStats trace_stats(const std::vector<TraceRecord>& records, double link_rate_bps,
                       double batch_gap_threshold) {
    if (records.size() < 2)
        throw trace_error("trace_stats: need at least 2 records");
    if (!(link_rate_bps > 0.0))
        throw std::invalid_argument("trace_stats: link rate must be > 0");

    // Batch segmentation: a new batch starts whenever the gap to the
    // previous packet reaches the threshold.
    std::vector<double> batch_starts;
    batch_starts.push_back(records.front().timestamp);
    for (std::size_t i = 1; i < records.size(); ++i) {
        if (records[i].timestamp - records[i - 1].timestamp >= batch_gap_threshold)
            batch_starts.push_back(records[i].timestamp);
    }
    if (batch_starts.size() < 2)
        throw trace_error("trace_stats: fewer than 2 batches at this gap threshold");

    std::vector<double> gaps(batch_starts.size() - 1);
    for (std::size_t i = 1; i < batch_starts.size(); ++i)
        gaps[i - 1] = batch_starts[i] - batch_starts[i - 1];

    auto mean_of = [](const std::vector<double>& v) {
        return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    };
    auto cv_of = [&](const std::vector<double>& v, double m) {
        double ss = 0.0;
        for (double x : v) ss += (x - m) * (x - m);
        return std::sqrt(ss / static_cast<double>(v.size())) / m;
    };

    std::vector<double> sizes(records.size());
    double total_bits = 0.0;
    for (std::size_t i = 0; i < records.size(); ++i) {
        sizes[i] = records[i].size_bits;
        total_bits += records[i].size_bits;
    }

    const double duration = records.back().timestamp - records.front().timestamp;
    if (!(duration > 0.0))
        throw trace_error("trace_stats: zero trace duration");

    TraceStats s;
    s.link_rate_bps = link_rate_bps;
    s.packet_count = records.size();
    s.batch_count = batch_starts.size();
    s.load_bps = total_bits / duration;
    s.mean_iat_s = mean_of(gaps);
    s.cv_iat = cv_of(gaps, s.mean_iat_s);
    const double mean_bits = mean_of(sizes);
    s.mean_size_bytes = mean_bits / 8.0;
    s.cv_service = cv_of(sizes, mean_bits); // link rate cancels in the ratio
    s.mean_batch_size =
        static_cast<double>(records.size()) / static_cast<double>(batch_starts.size());
    return s;
}

ArrivalGenerator::ArrivalGenerator(ArrivalModel model, std::uint64_t seed)
    : model_(std::move(model)), rng_(seed) {
    if (const auto* p = std::get_if<PoissonArrivals>(&model_)) {
        if (!(p->rate > 0.0))
            throw std::invalid_argument("PoissonArrivals: rate must be > 0");
    } else if (const auto* t = std::get_if<TraceReplayArrivals>(&model_)) {
        if (!t->records || t->records->empty())
            throw std::invalid_argument("TraceReplayArrivals: empty trace");
    } else if (const auto* b = std::get_if<BatchPoissonArrivals>(&model_)) {
        if (!(b->batch_rate > 0.0))
            throw std::invalid_argument("BatchPoissonArrivals: batch rate must be > 0");
        if (!(b->batch_size.mean >= 1.0))
            throw std::invalid_argument("BatchPoissonArrivals: mean batch size must be >= 1");
    }
}

std::optional<ArrivalEvent> ArrivalGenerator::next() {
    if (const auto* p = std::get_if<PoissonArrivals>(&model_)) {
        std::exponential_distribution<double> exp_gap(p->rate);
        now_ += exp_gap(rng_);
        return ArrivalEvent{now_, 1};
    }
    if (const auto* t = std::get_if<TraceReplayArrivals>(&model_)) {
        const auto& recs = *t->records;
        if (trace_index_ == recs.size()) {
            if (!t->loop) return std::nullopt;
            trace_index_ = 0;
            ++loop_count_;
        }
        const double wrap = recs.back().timestamp; // loop offset per pass
        const double ts =
            recs[trace_index_].timestamp + static_cast<double>(loop_count_) * wrap;
        ++trace_index_;
        return ArrivalEvent{ts, 1};
    }
    const auto& b = std::get<BatchPoissonArrivals>(model_);
    std::exponential_distribution<double> exp_gap(b.batch_rate);
    now_ += exp_gap(rng_);
    int count = 1;
    if (b.batch_size.kind == BatchSizeDist::Kind::deterministic) {
        count = static_cast<int>(std::llround(b.batch_size.mean));
    } else if (b.batch_size.mean > 1.0) {
        std::geometric_distribution<int> extra(1.0 / b.batch_size.mean);
        count = 1 + extra(rng_);
    }
    return ArrivalEvent{now_, count};
}

PacketSource::PacketSource(ArrivalModel arrivals, SizeModel sizes, std::uint64_t seed)
    : gen_(arrivals, seed), sizes_(sizes), size_rng_(seed ^ kSeedMix) {
    if (const auto* t = std::get_if<TraceReplayArrivals>(&arrivals)) trace_ = t->records;
    if (const auto* b = std::get_if<BatchPoissonArrivals>(&arrivals))
        intra_gap_ = b->intra_batch_gap;
    if (std::holds_alternative<EmpiricalSizes>(sizes_) && !trace_)
        throw std::invalid_argument("EmpiricalSizes requires trace-replay arrivals");
    if (const auto* e = std::get_if<ExponentialSizes>(&sizes_)) {
        if (!(e->mean_bits > 0.0))
            throw std::invalid_argument("ExponentialSizes: mean must be > 0");
    }
    if (const auto* d = std::get_if<DeterministicSizes>(&sizes_)) {
        if (!(d->bits > 0.0))
            throw std::invalid_argument("DeterministicSizes: size must be > 0");
    }
}

double PacketSource::draw_size() {
    if (const auto* e = std::get_if<ExponentialSizes>(&sizes_)) {
        std::exponential_distribution<double> d(1.0 / e->mean_bits);
        return d(size_rng_);
    }
    if (const auto* d = std::get_if<DeterministicSizes>(&sizes_)) return d->bits;
    const auto& recs = *trace_;
    const double bits = recs[trace_index_ % recs.size()].size_bits;
    ++trace_index_;
    return bits;
}

std::optional<PacketSource::Arrival> PacketSource::next() {
    if (batch_left_ == 0) {
        auto ev = gen_.next();
        if (!ev) return std::nullopt;
        batch_time_ = ev->time;
        batch_left_ = ev->count;
    } else {
        batch_time_ += intra_gap_;
    }
    --batch_left_;
    return Arrival{batch_time_, draw_size()};
}

std::vector<TraceRecord> synthesize_trace(const TraceStats& target, double duration_s,
                                          std::uint64_t seed, double intra_batch_gap,
                                          double batch_gap_floor) {
    if (!(target.load_bps > 0.0) || !(target.mean_iat_s > 0.0) ||
        !(target.mean_size_bytes > 0.0) || !(target.mean_batch_size >= 1.0))
        throw std::invalid_argument("synthesize_trace: target stats must be positive");
    if (!(duration_s > 0.0))
        throw std::invalid_argument("synthesize_trace: duration must be > 0");

    const double size_bits = std::llround(target.mean_size_bytes) * 8.0;
    const double implied_load =
        size_bits * target.mean_batch_size / target.mean_iat_s;
    if (std::abs(implied_load - target.load_bps) / target.load_bps > 0.05)
        throw std::invalid_argument(
            "synthesize_trace: load, E[tau], E[Ls] and E[sigma] are inconsistent "
            "(implied load " +
            std::to_string(implied_load) + " b/s vs target " +
            std::to_string(target.load_bps) + " b/s)");
    const double mean_shift =
        batch_gap_floor + (target.mean_batch_size - 1.0) * intra_batch_gap;
    if (target.mean_iat_s <= mean_shift)
        throw std::invalid_argument(
            "synthesize_trace: E[tau] too small for the batch gap floor");

    std::mt19937_64 rng(seed);
    std::vector<TraceRecord> records;
    records.reserve(static_cast<std::size_t>(
        duration_s / target.mean_iat_s * target.mean_batch_size * 1.2 + 16));

    const bool geometric = target.mean_batch_size > 1.0;
    std::geometric_distribution<int> extra(
        geometric ? 1.0 / target.mean_batch_size : 0.5);

    // Shifted-exponential batch gaps: the shift leaves room for the
    // previous batch's packets plus a floor above the gap threshold.
    // The exponential mean compensates for the average shift, so the
    // unconditional mean gap is exactly E[tau].
    std::exponential_distribution<double> gap(
        1.0 / (target.mean_iat_s - mean_shift));

    double t = 0.0;
    int prev_sigma = 1;
    while (true) {
        const double shift =
            batch_gap_floor + static_cast<double>(prev_sigma - 1) * intra_batch_gap;
        t += shift + gap(rng);
        if (t > duration_s) break;
        const int sigma = geometric ? 1 + extra(rng) : 1;
        for (int j = 0; j < sigma; ++j)
            records.push_back({t + j * intra_batch_gap, size_bits});
        prev_sigma = sigma;
    }
    if (records.size() < 2)
        throw std::invalid_argument("synthesize_trace: duration too short");
    return records;
}

namespace profiles {

TraceStats cloud_gaming_720p() {
    TraceStats s;
    s.load_bps = 10.25e6;
    s.mean_iat_s = 1.700e-3;
    s.cv_iat = 0.97;
    s.mean_size_bytes = 997.5;
    s.cv_service = 0.40;
    s.mean_batch_size = 2.18;
    s.link_rate_bps = 100e6;
    return s;
}

TraceStats cloud_gaming_1080p() {
    TraceStats s;
    s.load_bps = 27.47e6;
    s.mean_iat_s = 1.417e-3;
    s.cv_iat = 0.94;
    s.mean_size_bytes = 1123.2;
    s.cv_service = 0.23;
    s.mean_batch_size = 4.33;
    s.link_rate_bps = 100e6;
    return s;
}

TraceStats cloud_gaming_2160p() {
    TraceStats s;
    s.load_bps = 39.89e6;
    s.mean_iat_s = 1.293e-3;
    s.cv_iat = 2.87;
    s.mean_size_bytes = 1144.2;
    s.cv_service = 0.19;
    s.mean_batch_size = 5.74;
    s.link_rate_bps = 100e6;
    return s;
}

TraceStats by_name(const std::string& name) {
    if (name == "720p") return cloud_gaming_720p();
    if (name == "1080p") return cloud_gaming_1080p();
    if (name == "2160p") return cloud_gaming_2160p();
    throw std::invalid_argument("unknown profile '" + name + "' (expected 720p|1080p|2160p)");
}

} // namespace profiles

} // namespace llr
