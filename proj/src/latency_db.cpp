#include "pqcsim/latency_db.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include <boost/math/special_functions/erf.hpp>

namespace pqcsim {

double LogNormalParams::mean() const { return std::exp(mu_ln + 0.5 * sigma_ln * sigma_ln); }

double LogNormalParams::stddev() const {
    double s2 = sigma_ln * sigma_ln;
    return mean() * std::sqrt(std::expm1(s2));
}

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("normal_quantile: p must be in (0,1)");
    return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * p);
}

double LogNormalParams::quantile(double p) const { return value_at(normal_quantile(p)); }

double LogNormalParams::value_at(double z) const { return std::exp(mu_ln + sigma_ln * z); }

LogNormalParams fit_lognormal(double mean, double std) {
    if (!(mean > 0.0)) throw std::domain_error("fit_lognormal: mean must be positive");
    if (!(std >= 0.0)) throw std::domain_error("fit_lognormal: std must be non-negative");
    double cv = std / mean;
    double s2 = std::log1p(cv * cv);
    return {std::log(mean) - 0.5 * s2, std::sqrt(s2)};
}

double sample_lognormal(const LogNormalParams& params, RandomStream& rng) {
    return params.value_at(rng.normal());
}

std::string to_string(Mode m) {
    switch (m) {
        case Mode::classical: return "classical";
        case Mode::pqc_only: return "pqc-only";
        case Mode::hybrid: return "hybrid";
    }
    return "unknown";
}

Mode parse_mode(const std::string& s) {
    if (s == "classical") return Mode::classical;
    if (s == "pqc-only") return Mode::pqc_only;
    if (s == "hybrid") return Mode::hybrid;
    throw std::invalid_argument("unknown mode '" + s + "'");
}

void validate(const EmpiricalStat& s) {
    if (!(s.min_us <= s.mean_us && s.mean_us <= s.max_us) || s.std_us < 0.0)
        throw std::invalid_argument("empirical stat violates min <= mean <= max, std >= 0");
}

void validate(const AlgorithmProfile& p) {
    std::ostringstream err;
    if (p.name.empty()) err << "  name is empty\n";
    if (!(p.sign_mean_us > 0.0)) err << "  " << p.name << ": sign_mean_us must be > 0\n";
    if (!(p.sign_cv >= 0.0)) err << "  " << p.name << ": sign_cv must be >= 0\n";
    if (!(p.verify_mean_us >= 0.0)) err << "  " << p.name << ": verify_mean_us must be >= 0\n";
    if (!(p.verify_cv >= 0.0)) err << "  " << p.name << ": verify_cv must be >= 0\n";
    if (!(p.service_mean_us >= p.sign_mean_us))
        err << "  " << p.name << ": service_mean_us must be >= sign_mean_us\n";
    if (p.pk_bytes <= 0) err << "  " << p.name << ": pk_bytes must be > 0\n";
    if (p.sig_bytes <= 0) err << "  " << p.name << ": sig_bytes must be > 0\n";
    if (p.mode == Mode::hybrid && p.classical.empty())
        err << "  " << p.name << ": hybrid profile needs a linked classical profile\n";
    auto msg = err.str();
    if (!msg.empty()) throw std::invalid_argument("invalid algorithm profile:\n" + msg);
}

void validate_profiles(const std::vector<AlgorithmProfile>& profiles) {
    std::ostringstream err;
    for (const auto& p : profiles) {
        try {
            validate(p);
        } catch (const std::invalid_argument& e) {
            err << e.what();
        }
        if (p.mode == Mode::hybrid && !p.classical.empty()) {
            const AlgorithmProfile* c = nullptr;
            for (const auto& q : profiles)
                if (q.name == p.classical) c = &q;
            if (!c)
                err << "  " << p.name << ": linked classical profile '" << p.classical << "' not found\n";
            else if (c->mode != Mode::classical)
                err << "  " << p.name << ": linked profile '" << p.classical << "' is not classical\n";
        }
    }
    for (std::size_t i = 0; i < profiles.size(); ++i)
        for (std::size_t j = i + 1; j < profiles.size(); ++j)
            if (profiles[i].name == profiles[j].name) err << "  duplicate profile '" << profiles[i].name << "'\n";
    auto msg = err.str();
    if (!msg.empty()) throw std::invalid_argument(msg);
}

double derive_service_mean_from_rho(double lambda, int c, double rho) {
    if (!(lambda > 0.0) || c < 1 || !(rho > 0.0))
        throw std::domain_error("derive_service_mean_from_rho: inputs must be positive");
    return c * rho / lambda * 1e6;
}

namespace {

// Table 4 utilisations at lambda = 13.5 TPS, c = 2 give the service means.
constexpr double kLambda = 13.5;
constexpr int kServers = 2;
// Per-hop sign+verify of the classical baseline: (1.69 - 1.16) ms over four hops.
constexpr double kEcdsaHopUs = 132.5;

AlgorithmProfile make(const std::string& name, Mode mode, double rho, int pk, int sig, double delta_ref) {
    AlgorithmProfile p;
    p.name = name;
    p.mode = mode;
    p.service_mean_us = derive_service_mean_from_rho(kLambda, kServers, rho);
    p.sign_mean_us = p.service_mean_us;
    p.pk_bytes = pk;
    p.sig_bytes = sig;
    p.delta_p99_ref_ms = delta_ref;
    // Verification fills the rest of the per-hop budget so four hops reproduce the reference delta.
    p.verify_mean_us = kEcdsaHopUs + delta_ref * 1000.0 / 4.0 - p.sign_mean_us;
    return p;
}

}  // namespace

std::vector<AlgorithmProfile> builtin_profiles() {
    std::vector<AlgorithmProfile> v;
    v.push_back(make("ECDSA-P256", Mode::classical, 0.0002, 64, 72, 0.0));
    v.back().sign_p99_ref_ms = 0.15;
    v.push_back(make("Falcon-512", Mode::pqc_only, 0.0009, 897, 666, 0.30));
    v.push_back(make("ML-DSA-44", Mode::pqc_only, 0.0012, 1312, 2420, 0.62));
    v.push_back(make("Falcon-1024", Mode::pqc_only, 0.0018, 1793, 1280, 0.90));
    v.push_back(make("ML-DSA-65", Mode::pqc_only, 0.0019, 1952, 3293, 1.16));
    v.push_back(make("ML-DSA-87", Mode::pqc_only, 0.0023, 2592, 4595, 1.57));

    // Hybrid: ML-DSA-65 draws per hop plus the linked classical profile's draws.
    AlgorithmProfile h = make("ML-DSA-65-Hybrid", Mode::hybrid, 0.0021, 1952, 3293, 1.69);
    h.sign_mean_us = v[4].sign_mean_us;
    h.verify_mean_us = v[4].verify_mean_us;
    h.classical = "ECDSA-P256";
    v.push_back(h);

    AlgorithmProfile s;
    s.name = "SPHINCS+-SHA2-128s";
    s.mode = Mode::pqc_only;
    s.service_mean_us = derive_service_mean_from_rho(kLambda, kServers, 1.8855);
    s.sign_mean_us = 279330.0;
    s.sign_cv = 7618.0 / 279330.0;
    s.verify_mean_us = 0.0;  // folded into the composite service time
    s.pk_bytes = 32;
    s.sig_bytes = 7856;
    s.delta_p99_ref_ms = 9986.5;
    s.sign_p99_ref_ms = 297.0;
    v.push_back(s);
    return v;
}

const AlgorithmProfile& find_profile(const std::vector<AlgorithmProfile>& profiles, const std::string& name) {
    for (const auto& p : profiles)
        if (p.name == name) return p;
    throw std::invalid_argument("unknown algorithm '" + name + "'");
}

const AlgorithmProfile* linked_classical(const std::vector<AlgorithmProfile>& profiles, const AlgorithmProfile& p) {
    if (p.mode != Mode::hybrid) return nullptr;
    return &find_profile(profiles, p.classical);
}

bool is_saturating(const AlgorithmProfile& p, double lambda, int c) {
    return lambda * p.service_mean_us * 1e-6 / c >= 1.0;
}

}  // namespace pqcsim
