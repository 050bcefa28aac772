#include "pqcsim/traffic_gen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace pqcsim {

namespace {

double norm_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double norm_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

}  // namespace

double TimeOfDayProfile::density(double hour) const {
    if (hour < 0.0 || hour >= 24.0) return 0.0;
    double num = 0.0, mass = 0.0;
    for (const auto& c : components) {
        num += c.weight * norm_pdf((hour - c.mean_hour) / c.std_hour) / c.std_hour;
        mass += c.weight * (norm_cdf((24.0 - c.mean_hour) / c.std_hour) - norm_cdf(-c.mean_hour / c.std_hour));
    }
    return num / mass;
}

double TimeOfDayProfile::sample_hour(RandomStream& rng) const {
    for (;;) {
        double u = rng.uniform();
        std::size_t k = 0;
        double acc = components[0].weight;
        while (u > acc && k + 1 < components.size()) acc += components[++k].weight;
        double h = components[k].mean_hour + components[k].std_hour * rng.normal();
        if (h >= 0.0 && h < 24.0) return h;
    }
}

TimeOfDayProfile default_time_of_day_profile() {
    // Morning business peak near 10:00, lunch and afternoon shoulders, evening PayID peak,
    // small overnight batch component and a broad background.
    return {{{0.04, 2.5, 3.0},
             {0.30, 10.0, 1.3334},
             {0.16, 13.5, 2.0},
             {0.16, 16.0, 2.2},
             {0.20, 20.0, 1.6},
             {0.14, 12.0, 5.5}}};
}

std::string to_string(Route r) {
    switch (r) {
        case Route::NPP: return "NPP";
        case Route::RTGS: return "RTGS";
        case Route::SWIFT: return "SWIFT";
        case Route::INTRABANK: return "INTRABANK";
    }
    return "?";
}

std::vector<ScenarioSpec> default_scenarios() {
    return {{"normal", 0.762, 5.2e6, 8.6e6, 9500, 550, ""},
            {"christmas", 0.082, 8.9e6, 8.6e6, 9500, 550, "christmas"},
            {"taxtime", 0.082, 6.3e6, 8.6e6, 9500, 550, ""},
            {"crash", 0.019, 5.9e6, 8.6e6, 32000, 550, "crash"},
            {"eofy", 0.055, 6.0e6, 8.6e6, 19000, 550, ""}};
}

LogNormalParams amount_params_for_exceedance(double threshold, double fraction, double sigma_ln) {
    double z = normal_quantile(1.0 - fraction);
    return {std::log(threshold) - z * sigma_ln, sigma_ln};
}

std::map<std::string, double> default_tls_overheads(const std::vector<AlgorithmProfile>& profiles) {
    std::map<std::string, double> m;
    double base = 0.0;
    for (const auto& p : profiles)
        if (p.mode == Mode::classical) base = p.sign_mean_us;
    for (const auto& p : profiles) {
        double sign = p.sign_mean_us;
        if (p.mode == Mode::hybrid) sign += find_profile(profiles, p.classical).sign_mean_us;
        m[p.name] = std::max(0.0, sign - base) / 1000.0;
        if (p.mode == Mode::classical) m[p.name] = 0.0;
    }
    if (m.count("Falcon-512")) m["Falcon-512"] = 0.9;
    if (m.count("SPHINCS+-SHA2-128s")) m["SPHINCS+-SHA2-128s"] = 276.8;
    return m;
}

TrafficConfig default_traffic_config(const std::vector<AlgorithmProfile>& profiles) {
    TrafficConfig cfg;
    cfg.scenarios = default_scenarios();
    cfg.profile = default_time_of_day_profile();
    cfg.amount = amount_params_for_exceedance(250000.0, 0.01, 2.5);
    cfg.tls_overhead_ms = default_tls_overheads(profiles);
    return cfg;
}

void validate(const TrafficConfig& cfg) {
    std::ostringstream err;
    double wsum = 0.0;
    if (cfg.scenarios.empty()) err << "  traffic.scenarios: empty scenario table\n";
    for (const auto& s : cfg.scenarios) {
        wsum += s.weight;
        if (s.weight < 0.0) err << "  traffic.scenarios." << s.name << ": negative weight\n";
        if (!(s.npp_per_day > 0 && s.intrabank_per_day > 0 && s.rtgs_per_day > 0 && s.swift_per_day > 0))
            err << "  traffic.scenarios." << s.name << ": all volumes must be > 0\n";
        if (!s.multi_day_family.empty() && s.multi_day_family != "christmas" && s.multi_day_family != "crash")
            err << "  traffic.scenarios." << s.name << ": unknown multi_day_family '" << s.multi_day_family << "'\n";
    }
    if (!cfg.scenarios.empty() && std::abs(wsum - 1.0) > 1e-9)
        err << "  traffic.scenarios: weights sum to " << wsum << ", expected 1\n";
    double msum = 0.0;
    if (cfg.profile.components.empty()) err << "  traffic.profile: no mixture components\n";
    for (const auto& c : cfg.profile.components) {
        msum += c.weight;
        if (!(c.std_hour > 0.0)) err << "  traffic.profile: std_hour must be > 0\n";
    }
    if (!cfg.profile.components.empty() && std::abs(msum - 1.0) > 1e-9)
        err << "  traffic.profile: component weights sum to " << msum << ", expected 1\n";
    if (!(cfg.amount.sigma_ln >= 0.0)) err << "  traffic.amount.sigma_ln must be >= 0\n";
    if (!(cfg.reroute_threshold_aud > 0.0)) err << "  traffic.reroute_threshold_aud must be > 0\n";
    if (cfg.tls_reconnect_rate < 0.0 || cfg.tls_reconnect_rate > 1.0)
        err << "  traffic.tls_reconnect_rate outside [0,1]\n";
    if (cfg.payid_rate < 0.0 || cfg.payid_rate > 1.0) err << "  traffic.payid_rate outside [0,1]\n";
    if (!(cfg.payid.sigma_ln >= 0.0)) err << "  traffic.payid.sigma_ln must be >= 0\n";
    if (!(cfg.base_npp_per_day > 0.0)) err << "  traffic.base_npp_per_day must be > 0\n";
    if (!(cfg.institutional_tps >= 0.0)) err << "  traffic.institutional_tps must be >= 0\n";
    auto msg = err.str();
    if (!msg.empty()) throw std::invalid_argument(msg);
}

const ScenarioSpec& find_scenario(const std::vector<ScenarioSpec>& scenarios, const std::string& name) {
    for (const auto& s : scenarios)
        if (s.name == name) return s;
    throw std::invalid_argument("unknown scenario '" + name + "'");
}

ScenarioSpec sample_scenario(const std::vector<ScenarioSpec>& scenarios, RandomStream& rng) {
    double sum = 0.0;
    for (const auto& s : scenarios) sum += s.weight;
    if (scenarios.empty() || std::abs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("scenario weights must sum to 1");
    double u = rng.uniform();
    double acc = 0.0;
    for (const auto& s : scenarios) {
        acc += s.weight;
        if (u < acc) return s;
    }
    return scenarios.back();
}

double intraday_rate(double hour, const TimeOfDayProfile& profile, double daily_volume) {
    if (hour < 0.0 || hour >= 24.0) throw std::domain_error("intraday_rate: hour must be in [0,24)");
    return daily_volume * profile.density(hour) / 3600.0;
}

double route_volume_scale(const TrafficConfig& cfg, const ScenarioSpec& scenario) {
    return scenario.npp_per_day / cfg.base_npp_per_day;
}

double institutional_rate(double hour, const TrafficConfig& cfg, const ScenarioSpec& scenario) {
    return cfg.institutional_tps * route_volume_scale(cfg, scenario) * 24.0 * cfg.profile.density(hour);
}

std::vector<Transaction> generate_day(const ScenarioSpec& scenario, std::size_t n_sample, const TrafficConfig& cfg,
                                      const InstitutionSampler& institutions, RandomStream& rng) {
    if (n_sample == 0) throw std::invalid_argument("generate_day: n_sample must be > 0");
    double vols[4] = {scenario.npp_per_day, scenario.rtgs_per_day, scenario.swift_per_day,
                      scenario.intrabank_per_day};
    double vtot = vols[0] + vols[1] + vols[2] + vols[3];
    std::vector<Transaction> txs(n_sample);
    for (auto& t : txs) {
        t.hour = cfg.profile.sample_hour(rng);
        t.origin = static_cast<std::uint16_t>(institutions.sample_index(rng));
        t.dest = static_cast<std::uint16_t>(institutions.sample_index(rng));
        t.amount = sample_lognormal(cfg.amount, rng);
        double u_route = rng.uniform();
        double u_payid = rng.uniform();
        double u_tls = rng.uniform();
        t.route = Route::NPP;
        if (cfg.proportional_routes) {
            double acc = 0.0;
            Route order[4] = {Route::NPP, Route::RTGS, Route::SWIFT, Route::INTRABANK};
            for (int k = 0; k < 4; ++k) {
                acc += vols[k] / vtot;
                t.route = order[k];
                if (u_route < acc) break;
            }
        }
        if (t.route == Route::NPP && t.amount > cfg.reroute_threshold_aud) t.route = Route::RTGS;
        t.needs_payid = t.route == Route::NPP && u_payid < cfg.payid_rate;
        t.tls_reconnect = t.route == Route::NPP && u_tls < cfg.tls_reconnect_rate;
    }
    std::stable_sort(txs.begin(), txs.end(), [](const Transaction& a, const Transaction& b) { return a.hour < b.hour; });
    for (std::size_t i = 0; i < txs.size(); ++i) txs[i].id = static_cast<std::uint32_t>(i);
    return txs;
}

double payid_latency(RandomStream& rng, const LogNormalParams& params) { return sample_lognormal(params, rng); }

double tls_reconnect_overhead(const AlgorithmProfile& algo, const TrafficConfig& cfg) {
    auto it = cfg.tls_overhead_ms.find(algo.name);
    if (it == cfg.tls_overhead_ms.end())
        throw std::invalid_argument("no TLS reconnect overhead configured for '" + algo.name + "'");
    return it->second;
}

void write_transactions_csv(const std::string& path, const std::vector<Transaction>& txs,
                            const std::vector<Institution>& institutions) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "id,route,origin,dest,hour,amount,needs_payid,tls_reconnect\n";
    out.setf(std::ios::fixed);
    for (const auto& t : txs) {
        out.precision(4);
        out << t.id << ',' << to_string(t.route) << ',' << institutions[t.origin].name << ','
            << institutions[t.dest].name << ',' << t.hour << ',';
        out.precision(2);
        out << t.amount << ',' << (t.needs_payid ? 1 : 0) << ',' << (t.tls_reconnect ? 1 : 0) << '\n';
    }
}

}  // namespace pqcsim
