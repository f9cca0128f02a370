#include "llr/sim.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <deque>
#include <numeric>
#include <stdexcept>

namespace llr {

double FlowStats::mean_delay() const {
    if (delays.empty()) throw std::runtime_error("no delay samples");
    return std::accumulate(delays.begin(), delays.end(), 0.0) /
           static_cast<double>(delays.size());
}

double FlowStats::delay_stderr() const {
    if (delays.size() < 2) return 0.0;
    const double m = mean_delay();
    double ss = 0.0;
    for (double d : delays) ss += (d - m) * (d - m);
    const double n = static_cast<double>(delays.size());
    return std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
}

double SimResult::arrival_rate(Flow f) const {
    if (!(duration_s > 0.0)) throw std::runtime_error("zero simulated duration");
    const auto& fs = f == Flow::ds ? ds : nds;
    return static_cast<double>(fs.arrived) / duration_s;
}

double SimResult::event_rate(Flow f) const {
    if (!(duration_s > 0.0)) throw std::runtime_error("zero simulated duration");
    const auto& fs = f == Flow::ds ? ds : nds;
    return static_cast<double>(fs.arrival_events) / duration_s;
}

namespace {

struct QueuedPacket {
    double arrival;
    double size_bits;
    Flow flow;
};

struct PendingArrival {
    double time;
    double size_bits;
    bool valid = false;
};

void refill(PendingArrival& p, PacketSource& src, double max_time) {
    p.valid = false;
    if (auto a = src.next()) {
        if (a->time <= max_time) {
            p = {a->time, a->size_bits, true};
        }
    }
}

void discard_warmup(FlowStats& fs, double fraction) {
    const auto cut = static_cast<std::size_t>(
        std::floor(fraction * static_cast<double>(fs.delays.size())));
    fs.warmup_discarded = cut;
    fs.delays.erase(fs.delays.begin(), fs.delays.begin() + static_cast<long>(cut));
}

} // namespace

SimResult run(const SimConfig& config) {
    if (!(config.link_rate_bps > 0.0))
        throw std::invalid_argument("run: link rate must be > 0");
    if (config.warmup_fraction < 0.0 || config.warmup_fraction > 0.5)
        throw std::invalid_argument("run: warmup fraction must be in [0, 0.5]");

    PacketSource ds_src(config.ds_arrivals, config.ds_sizes, config.ds_seed);
    std::optional<PacketSource> nds_src;
    if (config.nds_arrivals)
        nds_src.emplace(*config.nds_arrivals, config.nds_sizes, config.nds_seed);

    const double max_time = config.horizon.max_time_s;

    PendingArrival next_ds, next_nds;
    refill(next_ds, ds_src, max_time);
    if (nds_src) refill(next_nds, *nds_src, max_time);

    SimResult result;
    std::deque<QueuedPacket> queue; // excludes the packet in service
    bool busy = false;
    QueuedPacket in_service{};
    double departure_time = 0.0;
    double now = 0.0;
    std::uint64_t delivered_total = 0;
    std::uint64_t in_system_ds = 0, in_system_nds = 0;
    double last_ds_arrival = 0.0, last_nds_arrival = 0.0;

    auto start_service = [&](const QueuedPacket& p, double at) {
        assert(!busy);
        in_service = p;
        busy = true;
        departure_time = at + p.size_bits / config.link_rate_bps;
    };

    while (true) {
        // Next event: a departure or the earliest pending arrival.
        // Departures are processed first at equal timestamps; at equal
        // arrival times the DS packet enters the queue first.
        const bool have_arrival = next_ds.valid || next_nds.valid;
        double arrival_time = 0.0;
        bool arrival_is_ds = false;
        if (have_arrival) {
            if (next_ds.valid &&
                (!next_nds.valid || next_ds.time <= next_nds.time)) {
                arrival_time = next_ds.time;
                arrival_is_ds = true;
            } else {
                arrival_time = next_nds.time;
            }
        }

        if (busy && (!have_arrival || departure_time <= arrival_time)) {
            // Departure.
            if (departure_time > max_time) break; // in-flight packets excluded
            now = departure_time;
            auto& fs = in_service.flow == Flow::ds ? result.ds : result.nds;
            fs.delays.push_back(now - in_service.arrival);
            ++fs.delivered;
            fs.delivered_bits += in_service.size_bits;
            (in_service.flow == Flow::ds ? in_system_ds : in_system_nds) -= 1;
            if (config.record_packets)
                result.packets.push_back({in_service.flow, in_service.arrival, now});
            busy = false;
            if (!queue.empty()) {
                start_service(queue.front(), now);
                queue.pop_front();
            }
            ++delivered_total;
            if (delivered_total >= config.horizon.max_delivered) break;
            continue;
        }

        if (!have_arrival) break; // sources exhausted, nothing in flight
        now = arrival_time;
        PendingArrival& slot = arrival_is_ds ? next_ds : next_nds;
        const QueuedPacket pkt{slot.time, slot.size_bits,
                               arrival_is_ds ? Flow::ds : Flow::nds};
        auto& fs = arrival_is_ds ? result.ds : result.nds;
        double& last = arrival_is_ds ? last_ds_arrival : last_nds_arrival;
        if (fs.arrived == 0 || now - last >= config.batch_gap_threshold_s)
            ++fs.arrival_events;
        last = now;
        ++fs.arrived;
        (arrival_is_ds ? in_system_ds : in_system_nds) += 1;
        if (busy) {
            queue.push_back(pkt);
            if (queue.size() > config.queue_abort_threshold)
                throw queue_overflow_error(
                    "queue exceeded abort threshold; configuration is effectively unstable");
        } else {
            assert(queue.empty()); // work conservation
            start_service(pkt, now);
        }
        if (arrival_is_ds) {
            refill(next_ds, ds_src, max_time);
        } else {
            refill(next_nds, *nds_src, max_time);
        }
    }

    result.duration_s = std::isfinite(max_time) ? std::min(now, max_time) : now;
    if (result.ds.arrived + result.nds.arrived == 0)
        throw std::runtime_error("run: no packets arrived within the horizon");

    // Conservation per flow: everything that came in is delivered,
    // queued, or in service.
    std::uint64_t queued_ds = 0, queued_nds = 0;
    for (const auto& p : queue) (p.flow == Flow::ds ? queued_ds : queued_nds) += 1;
    if (busy) (in_service.flow == Flow::ds ? queued_ds : queued_nds) += 1;
    assert(result.ds.arrived == result.ds.delivered + queued_ds);
    assert(result.nds.arrived == result.nds.delivered + queued_nds);
    assert(in_system_ds == queued_ds && in_system_nds == queued_nds);
    (void)queued_ds;
    (void)queued_nds;

    discard_warmup(result.ds, config.warmup_fraction);
    discard_warmup(result.nds, config.warmup_fraction);
    return result;
}

std::vector<double> delay_cdf(const SimResult& result, Flow flow,
                              const std::vector<double>& grid_s) {
    const auto& fs = flow == Flow::ds ? result.ds : result.nds;
    if (fs.delays.empty()) throw std::runtime_error("delay_cdf: no samples");
    std::vector<double> sorted = fs.delays;
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> cdf;
    cdf.reserve(grid_s.size());
    const double n = static_cast<double>(sorted.size());
    for (double t : grid_s) {
        const auto k = std::upper_bound(sorted.begin(), sorted.end(), t) - sorted.begin();
        cdf.push_back(static_cast<double>(k) / n);
    }
    return cdf;
}

double delay_percentile(const SimResult& result, Flow flow, double p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::invalid_argument("delay_percentile: p must be in (0, 1)");
    const auto& fs = flow == Flow::ds ? result.ds : result.nds;
    if (fs.delays.empty()) throw std::runtime_error("delay_percentile: no samples");
    std::vector<double> sorted = fs.delays;
    std::sort(sorted.begin(), sorted.end());
    const auto n = sorted.size();
    const auto rank = static_cast<std::size_t>(
        std::ceil(p * static_cast<double>(n)));
    return sorted[std::max<std::size_t>(rank, 1) - 1];
}

} // namespace llr
