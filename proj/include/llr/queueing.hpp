#pragma once

#include <functional>
#include <vector>

#include "llr/errors.hpp"

namespace llr {

// Service time distribution summarized by its mean and coefficient of
// variation. mu is the service rate in packets/second, theta the
// variability factor that scales the M/M/1 delay into the M/G/1 one.
struct ServiceModel {
    double mean_service_time; // E[S], seconds/packet
    double cv;                // C_S, dimensionless

    ServiceModel(double mean_service_time_s, double cv_);

    static ServiceModel from_rate(double mu_pps, double cv_) {
        return ServiceModel(1.0 / mu_pps, cv_);
    }

    double mu() const { return 1.0 / mean_service_time; }
    double theta() const { return 0.5 * (1.0 + cv * cv); }
    double second_moment() const {
        return mean_service_time * mean_service_time * (1.0 + cv * cv);
    }
};

// Offered load on the link: one delay-sensitive (DS) and one background
// (NDS) flow, both in packets/second.
struct LinkLoad {
    double lambda_s = 0.0;
    double lambda_b = 0.0;

    double total() const { return lambda_s + lambda_b; }
    double utilization(const ServiceModel& svc) const { return total() / svc.mu(); }
};

// One sweep of an objective (g or f) over a grid of NDS rates.
struct GainCurve {
    std::vector<double> lambda_b_grid;
    std::vector<double> values;
    double argmax_rate = 0.0;
    double argmax_value = 0.0;
};

// Ratio between the mean delay of an M/G/1 and an M/M/1 queue at the
// same utilization: 1 - a + a*theta.
double gamma_ratio(double load_total, const ServiceModel& svc);

// Mean sojourn time (queueing + transmission); identical for both flows
// under FIFO with a shared service distribution.
double mean_delay(const LinkLoad& load, const ServiceModel& svc);

// Mean number of DS packets in the link (Little's theorem).
double mean_packets(const LinkLoad& load, const ServiceModel& svc);

// True iff the DS flow's mean delay does not exceed its mean
// inter-arrival time (and the link is stable).
bool in_llr(const LinkLoad& load, const ServiceModel& svc);

// Highest DS rate that stays inside the low-latency region when alone
// on the link: mu / (1 + sqrt(theta)).
double llr_limit(const ServiceModel& svc);

// Fraction of capacity that must stay idle per unit of DS load:
// theta / gamma_ratio(lambda_s). Note the argument is the DS rate only.
double beta(double lambda_s, const ServiceModel& svc);

// Capacity multiplier of the max allocation: kappa_plus * lambda_s is
// the minimum capacity the DS flow claims to stay low-latency.
double kappa_plus(double lambda_s, const ServiceModel& svc);

// Capacity multiplier of the proportional-fair allocation.
double kappa_star(double lambda_s, const ServiceModel& svc);

// Largest NDS rate that keeps the DS flow at the low-latency boundary.
double max_alloc(double lambda_s, const ServiceModel& svc);

// NDS rate maximizing the throughput-gain minus delay-loss trade-off.
double pfll_alloc(double lambda_s, const ServiceModel& svc);

// Relative link throughput gain from adding NDS traffic: lambda_b/lambda_s.
double throughput_gain(const LinkLoad& load);

// Relative DS delay increase caused by the NDS traffic.
double delay_loss(const LinkLoad& load, const ServiceModel& svc);

// Throughput-delay trade-off g = throughput_gain - delay_loss.
double gain(const LinkLoad& load, const ServiceModel& svc);

// Closed-form derivative of g with respect to lambda_b.
double gain_derivative(const LinkLoad& load, const ServiceModel& svc);

using DelayFn = std::function<double(double /*lambda_b*/)>;

// Alternative objective computable from measured delays alone:
// f = lambda_b * (delay_at(lambda_b_plus) - delay_at(lambda_b)).
// Shares its argmax with g when delay_at is the analytic mean delay.
double f_alt(double lambda_b, const DelayFn& delay_at, double lambda_b_plus);

// Evaluate fn over the grid and record the discrete argmax.
GainCurve build_curve(std::vector<double> lambda_b_grid,
                      const std::function<double(double)>& fn);

// Divide all values by the curve maximum so the peak is exactly 1.
GainCurve normalize_curve(const GainCurve& curve);

} // namespace llr
