#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "pqcsim/latency_db.hpp"

namespace pqcsim {

double mean(const std::vector<double>& v);
double variance(const std::vector<double>& v, int ddof = 1);
double stddev(const std::vector<double>& v, int ddof = 1);

// Trailing partial block is dropped; the dropped count is returned through `dropped`.
std::vector<double> block_maxima(const std::vector<double>& samples, std::size_t block_size = 50,
                                 std::size_t* dropped = nullptr);

struct GevFit {
    double xi = 0.0;
    double loc = 0.0;
    double scale = 1.0;
    int n_blocks = 0;
    double loglik = 0.0;
};

double gev_loglik(const std::vector<double>& x, double xi, double loc, double scale);
// With `start`, a single local search from that fit replaces the multi-start (used by the bootstrap).
GevFit fit_gev_mle(const std::vector<double>& maxima, const GevFit* start = nullptr);
double gev_quantile(const GevFit& fit, double q);

enum class TailClass { Gumbel, Frechet, Weibull };
std::string to_string(TailClass t);
TailClass classify_tail(double xi);

struct BootstrapResult {
    std::vector<std::pair<double, double>> ci;  // one interval per requested quantile
    int failures = 0;
    int resamples = 0;
};

BootstrapResult bootstrap_quantiles(const std::vector<double>& maxima, const std::vector<double>& qs,
                                    int n_resamples, double confidence, std::uint64_t seed);
std::pair<double, double> bootstrap_ci(const std::vector<double>& maxima, double q, int n_resamples = 500,
                                       double confidence = 0.95, std::uint64_t seed = 42);

struct GevReport {
    GevFit fit;
    double q99 = 0.0, q999 = 0.0, q9999 = 0.0;
    std::pair<double, double> ci999, ci9999;
    TailClass tail_class = TailClass::Gumbel;
    int bootstrap_failures = 0;
    int bootstrap_resamples = 0;
    std::size_t dropped = 0;
    bool indicative = true;  // consecutive-transaction blocks are not i.i.d.
};

GevReport gev_report(const std::vector<double>& samples, std::size_t block_size, int n_resamples,
                     std::uint64_t seed, bool daily_maxima_mode = false);

double kolmogorov_sf(double lambda);
std::pair<double, double> ks_test_lognormal(const std::vector<double>& samples, const LogNormalParams& params);
std::pair<double, bool> ad_test_log_normality(const std::vector<double>& samples);
inline constexpr double kAdCritical5pct = 0.787;

LogNormalParams fit_lognormal_mle(const std::vector<double>& samples);

struct GofReport {
    double ks_stat = 0.0, ks_p = 1.0;
    double ad_stat = 0.0, ad_critical_5pct = kAdCritical5pct;
    bool reject_ks = false, reject_ad = false;
};

GofReport gof_report(const std::vector<double>& samples);

struct CandidateFit {
    std::string name;
    bool available = true;
    double loglik = 0.0;
    double aic = 0.0, bic = 0.0, delta_aic = 0.0;
    std::vector<double> params;
};

struct ModelComparison {
    std::vector<CandidateFit> candidates;  // ranked by AIC, unavailable last
    const CandidateFit& find(const std::string& name) const;
};

CandidateFit fit_candidate(const std::string& name, const std::vector<double>& samples);
ModelComparison aic_bic_compare(const std::vector<double>& samples,
                                const std::vector<std::string>& candidates = {"lognormal", "gamma", "weibull",
                                                                              "inverse-gaussian"});

struct EffectSize {
    double cohens_d = 0.0;
    std::string magnitude;
    double mw_u = 0.0;
    double mw_p = 1.0;
};

std::string magnitude_label(double d);
EffectSize cohens_d(const std::vector<double>& a, const std::vector<double>& baseline);
std::pair<double, double> mann_whitney_u(const std::vector<double>& a, const std::vector<double>& b);
EffectSize effect_size(const std::vector<double>& a, const std::vector<double>& baseline);

std::pair<double, double> anova_eta2(const std::vector<std::vector<double>>& groups);

}  // namespace pqcsim
