#include "llr/queueing.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace llr {

namespace {
constexpr double kBoundaryTol = 1e-12;

double clamp_tiny_negative(double x) {
    if (x < 0.0 && x > -kBoundaryTol) return 0.0;
    return x;
}
} // namespace

ServiceModel::ServiceModel(double mean_service_time_s, double cv_)
    : mean_service_time(mean_service_time_s), cv(cv_) {
    if (!(mean_service_time > 0.0))
        throw std::invalid_argument("ServiceModel: mean service time must be > 0");
    if (!(cv >= 0.0))
        throw std::invalid_argument("ServiceModel: coefficient of variation must be >= 0");
}

double gamma_ratio(double load_total, const ServiceModel& svc) {
    if (load_total < 0.0)
        throw std::invalid_argument("gamma_ratio: negative arrival rate");
    const double a = load_total / svc.mu();
    return 1.0 - a + a * svc.theta();
}

double mean_delay(const LinkLoad& load, const ServiceModel& svc) {
    if (load.lambda_s < 0.0 || load.lambda_b < 0.0)
        throw std::invalid_argument("mean_delay: negative arrival rate");
    const double mu = svc.mu();
    const double lambda = load.total();
    if (lambda >= mu)
        throw unstable_link_error("mean_delay: utilization >= 1 (lambda=" +
                                  std::to_string(lambda) + ", mu=" + std::to_string(mu) + ")");
    return gamma_ratio(lambda, svc) / (mu - lambda);
}

double mean_packets(const LinkLoad& load, const ServiceModel& svc) {
    return load.lambda_s * mean_delay(load, svc);
}

bool in_llr(const LinkLoad& load, const ServiceModel& svc) {
    if (!(load.lambda_s > 0.0))
        throw std::invalid_argument("in_llr: lambda_s must be > 0");
    if (load.total() >= svc.mu()) return false;
    return 1.0 / load.lambda_s >= mean_delay(load, svc) - kBoundaryTol;
}

double llr_limit(const ServiceModel& svc) {
    return svc.mu() / (1.0 + std::sqrt(svc.theta()));
}

double beta(double lambda_s, const ServiceModel& svc) {
    if (lambda_s < 0.0)
        throw std::invalid_argument("beta: negative lambda_s");
    return svc.theta() / gamma_ratio(lambda_s, svc);
}

double kappa_plus(double lambda_s, const ServiceModel& svc) {
    return 1.0 + beta(lambda_s, svc);
}

double kappa_star(double lambda_s, const ServiceModel& svc) {
    if (!(lambda_s > 0.0))
        throw std::invalid_argument("kappa_star: lambda_s must be > 0");
    const double mu = svc.mu();
    if (!(lambda_s < mu))
        throw std::invalid_argument("kappa_star: lambda_s must be < mu");
    return 1.0 + std::sqrt(beta(lambda_s, svc) * (mu - lambda_s) / lambda_s);
}

namespace {
void check_in_region(double lambda_s, const ServiceModel& svc, const char* op) {
    if (!(lambda_s > 0.0))
        throw std::invalid_argument(std::string(op) + ": lambda_s must be > 0");
    const double limit = llr_limit(svc);
    if (lambda_s > limit + kBoundaryTol)
        throw out_of_region_error(std::string(op) + ": lambda_s " + std::to_string(lambda_s) +
                                  " exceeds LLR limit " + std::to_string(limit));
}
} // namespace

double max_alloc(double lambda_s, const ServiceModel& svc) {
    check_in_region(lambda_s, svc, "max_alloc");
    const double mu = svc.mu();
    const double v = (mu - lambda_s) / gamma_ratio(lambda_s, svc) - lambda_s;
    return std::max(clamp_tiny_negative(v), 0.0);
}

double pfll_alloc(double lambda_s, const ServiceModel& svc) {
    check_in_region(lambda_s, svc, "pfll_alloc");
    const double mu = svc.mu();
    const double v = mu - lambda_s - std::sqrt(beta(lambda_s, svc) * lambda_s * (mu - lambda_s));
    return std::max(clamp_tiny_negative(v), 0.0);
}

double throughput_gain(const LinkLoad& load) {
    if (!(load.lambda_s > 0.0))
        throw std::invalid_argument("throughput_gain: lambda_s must be > 0");
    return load.lambda_b / load.lambda_s;
}

double delay_loss(const LinkLoad& load, const ServiceModel& svc) {
    const double mu = svc.mu();
    if (load.total() >= mu)
        throw unstable_link_error("delay_loss: utilization >= 1");
    return beta(load.lambda_s, svc) * load.lambda_b / (mu - load.total());
}

double gain(const LinkLoad& load, const ServiceModel& svc) {
    if (!(load.lambda_s > 0.0))
        throw std::invalid_argument("gain: lambda_s must be > 0");
    const double mu = svc.mu();
    if (load.total() >= mu)
        throw unstable_link_error("gain: utilization >= 1");
    return load.lambda_b *
           (1.0 / load.lambda_s - beta(load.lambda_s, svc) / (mu - load.total()));
}

double gain_derivative(const LinkLoad& load, const ServiceModel& svc) {
    if (!(load.lambda_s > 0.0))
        throw std::invalid_argument("gain_derivative: lambda_s must be > 0");
    const double mu = svc.mu();
    if (load.total() >= mu)
        throw unstable_link_error("gain_derivative: utilization >= 1");
    const double rem = mu - load.total();
    return 1.0 / load.lambda_s -
           beta(load.lambda_s, svc) * (mu - load.lambda_s) / (rem * rem);
}

double f_alt(double lambda_b, const DelayFn& delay_at, double lambda_b_plus) {
    if (lambda_b < 0.0)
        throw std::invalid_argument("f_alt: negative lambda_b");
    if (lambda_b > lambda_b_plus + kBoundaryTol)
        throw out_of_region_error("f_alt: lambda_b exceeds the max allocation");
    return lambda_b * (delay_at(lambda_b_plus) - delay_at(lambda_b));
}

GainCurve build_curve(std::vector<double> lambda_b_grid,
                      const std::function<double(double)>& fn) {
    GainCurve c;
    c.lambda_b_grid = std::move(lambda_b_grid);
    c.values.reserve(c.lambda_b_grid.size());
    for (double x : c.lambda_b_grid) c.values.push_back(fn(x));
    if (!c.values.empty()) {
        auto it = std::max_element(c.values.begin(), c.values.end());
        c.argmax_value = *it;
        c.argmax_rate = c.lambda_b_grid[static_cast<std::size_t>(it - c.values.begin())];
    }
    return c;
}

GainCurve normalize_curve(const GainCurve& curve) {
    if (curve.values.empty())
        throw std::invalid_argument("normalize_curve: empty curve");
    const double m = *std::max_element(curve.values.begin(), curve.values.end());
    if (!(m > 0.0))
        throw std::domain_error("normalize_curve: degenerate curve (no positive value)");
    GainCurve out = curve;
    for (double& v : out.values) v /= m;
    out.argmax_value = curve.argmax_value / m;
    return out;
}

} // namespace llr
