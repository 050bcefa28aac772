#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pqcsim/random.hpp"

namespace pqcsim {

double normal_quantile(double p);

struct LogNormalParams {
    double mu_ln = 0.0;
    double sigma_ln = 0.0;

    double mean() const;
    double stddev() const;
    double quantile(double p) const;
    double value_at(double z) const;
};

LogNormalParams fit_lognormal(double mean, double std);
double sample_lognormal(const LogNormalParams& params, RandomStream& rng);

enum class Mode { classical, pqc_only, hybrid };

std::string to_string(Mode m);
Mode parse_mode(const std::string& s);

struct EmpiricalStat {
    double mean_us = 0.0;
    double std_us = 0.0;
    double min_us = 0.0;
    double max_us = 0.0;
};

void validate(const EmpiricalStat& s);

struct AlgorithmProfile {
    std::string name;
    Mode mode = Mode::pqc_only;
    double sign_mean_us = 0.0;
    double sign_cv = 0.25;
    double verify_mean_us = 0.0;  // per-hop verification, part of the route latency
    double verify_cv = 0.25;
    double service_mean_us = 0.0;
    int pk_bytes = 0;
    int sig_bytes = 0;
    std::optional<double> delta_p99_ref_ms;
    std::optional<double> sign_p99_ref_ms;
    std::string classical;  // linked classical profile for hybrid mode

    LogNormalParams sign_params() const { return fit_lognormal(sign_mean_us, sign_mean_us * sign_cv); }
    LogNormalParams verify_params() const { return fit_lognormal(verify_mean_us, verify_mean_us * verify_cv); }
    double service_rate() const { return 1e6 / service_mean_us; }
};

// Throws std::invalid_argument listing every violated field.
void validate(const AlgorithmProfile& p);
void validate_profiles(const std::vector<AlgorithmProfile>& profiles);

double derive_service_mean_from_rho(double lambda, int c, double rho);

std::vector<AlgorithmProfile> builtin_profiles();

const AlgorithmProfile& find_profile(const std::vector<AlgorithmProfile>& profiles, const std::string& name);
const AlgorithmProfile* linked_classical(const std::vector<AlgorithmProfile>& profiles, const AlgorithmProfile& p);

bool is_saturating(const AlgorithmProfile& p, double lambda, int c);

}  // namespace pqcsim
