#include "pqcsim/queueing.hpp"

#include <cmath>
#include <stdexcept>

#include "pqcsim/mc_engine.hpp"

namespace pqcsim {

double erlang_c(int c, double a) {
    if (c < 1) throw std::domain_error("erlang_c: c must be >= 1");
    if (a < 0.0) throw std::domain_error("erlang_c: offered load must be >= 0");
    if (a >= c) throw std::domain_error("erlang_c: unstable regime (a >= c)");
    if (a == 0.0) return 0.0;
    // Erlang-B recurrence, then B -> C.
    double b = 1.0;
    for (int k = 1; k <= c; ++k) b = a * b / (k + a * b);
    return c * b / (c - a * (1.0 - b));
}

QueueAssessment mmc_assess(const QueueParams& q) {
    if (q.lambda < 0.0 || !(q.mu > 0.0) || q.c < 1) throw std::domain_error("mmc_assess: invalid queue parameters");
    QueueAssessment r;
    r.offered_erlangs = q.lambda / q.mu;
    r.rho = r.offered_erlangs / q.c;
    if (r.rho >= 1.0) {
        r.saturated = true;
        r.erlang_c = 1.0;
        r.mean_wait_us = kSaturationSentinelUs;
        return r;
    }
    r.erlang_c = erlang_c(q.c, r.offered_erlangs);
    r.mean_wait_us = r.erlang_c / (q.c * q.mu - q.lambda) * 1e6;
    return r;
}

double wait_quantile_us(const QueueParams& q, double p) {
    auto a = mmc_assess(q);
    if (a.saturated) return kSaturationSentinelUs;
    if (p <= 1.0 - a.erlang_c) return 0.0;
    return std::log(a.erlang_c / (1.0 - p)) / (q.c * q.mu - q.lambda) * 1e6;
}

double saturation_boundary(double mu, int c) {
    if (!(mu > 0.0) || c < 1) throw std::domain_error("saturation_boundary: invalid parameters");
    return c * mu;
}

int min_servers(double lambda, double mu, const ServerCriterion& criterion, int c_max) {
    if (!(lambda > 0.0) || !(mu > 0.0)) throw std::domain_error("min_servers: lambda and mu must be positive");
    for (int c = 1; c <= c_max; ++c) {
        auto a = mmc_assess({lambda, mu, c});
        if (a.saturated) continue;
        if (criterion.kind == ServerCriterion::Kind::stability) return c;
        if (a.mean_wait_us / 1000.0 <= criterion.bound_ms) return c;
    }
    throw std::runtime_error("min_servers: no server count up to limit meets the criterion");
}

DosMetrics dos_metrics(double lambda, double mu, int c, double duration_s, const QueueParams& baseline) {
    double capacity = c * mu;
    if (lambda < capacity) throw std::domain_error("dos_metrics: queue is stable (rho < 1)");
    if (!(duration_s > 0.0)) throw std::domain_error("dos_metrics: duration must be positive");
    DosMetrics m;
    m.surplus_ops_s = lambda - capacity;
    m.queued_count = m.surplus_ops_s * duration_s;
    m.last_wait_s = m.queued_count / capacity;
    m.mean_wait_s = 0.5 * m.last_wait_s;
    double rho = lambda / capacity;
    m.utilisation_ratio = rho / mmc_assess(baseline).rho;
    return m;
}

HourlyProfile hourly_profile(const AlgorithmProfile& algo, const ScenarioSpec& scenario, int c,
                             const TrafficConfig& traffic) {
    HourlyProfile out;
    for (int h = 0; h < 24; ++h) {
        double lam = institutional_rate(h, traffic, scenario);
        auto a = mmc_assess({lam, algo.service_rate(), c});
        out.lambda.push_back(lam);
        out.hours.push_back(a);
        if (a.saturated) ++out.saturated_hours;
        if (a.rho > out.peak_rho) {
            out.peak_rho = a.rho;
            out.peak_hour = h;
        }
    }
    return out;
}

std::vector<SweepRow> tps_sweep(const AlgorithmProfile& algo, int c, const std::vector<double>& lambdas) {
    std::vector<SweepRow> rows;
    for (double l : lambdas) rows.push_back({algo.name, l, mmc_assess({l, algo.service_rate(), c})});
    return rows;
}

DegradedResult degraded_compare(const AlgorithmProfile& algo, const std::vector<double>& base_ms, double lambda,
                                int c_normal, int c_degraded) {
    auto qn = mmc_assess({lambda, algo.service_rate(), c_normal});
    auto qd = mmc_assess({lambda, algo.service_rate(), c_degraded});
    std::vector<double> normal(base_ms), degraded(base_ms);
    for (auto& v : normal) v += qn.mean_wait_ms();
    for (auto& v : degraded) v += qd.mean_wait_ms();
    DegradedResult r;
    r.p99_normal = percentile(normal, 0.99);
    r.p99_degraded = percentile(degraded, 0.99);
    r.delta = r.p99_degraded - r.p99_normal;
    r.rho_normal = qn.rho;
    r.rho_degraded = qd.rho;
    r.meaningful = !qn.saturated && !qd.saturated;
    return r;
}

}  // namespace pqcsim
