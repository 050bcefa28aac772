#pragma once

#include <string>
#include <vector>

#include "pqcsim/latency_db.hpp"
#include "pqcsim/traffic_gen.hpp"

namespace pqcsim {

inline constexpr double kSaturationSentinelUs = 10'000'000.0;

struct QueueParams {
    double lambda = 0.0;  // TPS
    double mu = 1.0;      // ops/s per server
    int c = 1;
};

struct QueueAssessment {
    double rho = 0.0;
    double offered_erlangs = 0.0;
    double erlang_c = 0.0;
    double mean_wait_us = 0.0;
    bool saturated = false;

    double mean_wait_ms() const { return mean_wait_us / 1000.0; }
};

double erlang_c(int c, double a);
QueueAssessment mmc_assess(const QueueParams& q);
// p-quantile of the queue wait (µs); sentinel when saturated.
double wait_quantile_us(const QueueParams& q, double p);

double saturation_boundary(double mu, int c);

struct ServerCriterion {
    enum class Kind { stability, wait_below } kind = Kind::stability;
    double bound_ms = 0.0;

    static ServerCriterion stability() { return {}; }
    static ServerCriterion wait_below(double ms) { return {Kind::wait_below, ms}; }
};

int min_servers(double lambda, double mu, const ServerCriterion& criterion, int c_max = 100000);

struct DosMetrics {
    double surplus_ops_s = 0.0;
    double queued_count = 0.0;
    double last_wait_s = 0.0;
    double mean_wait_s = 0.0;
    double utilisation_ratio = 0.0;
};

DosMetrics dos_metrics(double lambda, double mu, int c, double duration_s, const QueueParams& baseline);

struct HourlyProfile {
    std::vector<double> lambda;  // per-hour institutional TPS
    std::vector<QueueAssessment> hours;
    int saturated_hours = 0;
    double peak_rho = 0.0;
    int peak_hour = 0;
};

HourlyProfile hourly_profile(const AlgorithmProfile& algo, const ScenarioSpec& scenario, int c,
                             const TrafficConfig& traffic);

struct SweepRow {
    std::string algo;
    double x = 0.0;  // TPS or hour
    QueueAssessment q;
};

std::vector<SweepRow> tps_sweep(const AlgorithmProfile& algo, int c, const std::vector<double>& lambdas);

struct DegradedResult {
    double p99_normal = 0.0;
    double p99_degraded = 0.0;
    double delta = 0.0;
    double rho_normal = 0.0;
    double rho_degraded = 0.0;
    bool meaningful = true;
};

// base_ms: route latencies without the queue-wait term; the wait for each server count is added.
DegradedResult degraded_compare(const AlgorithmProfile& algo, const std::vector<double>& base_ms, double lambda,
                                int c_normal = 2, int c_degraded = 1);

}  // namespace pqcsim
