#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "pqcsim/latency_db.hpp"
#include "pqcsim/network_model.hpp"
#include "pqcsim/random.hpp"
#include "pqcsim/scenario.hpp"

namespace pqcsim {

struct MixtureComponent {
    double weight = 0.0;
    double mean_hour = 0.0;
    double std_hour = 1.0;
};

struct TimeOfDayProfile {
    std::vector<MixtureComponent> components;

    // Mixture density over [0, 24), renormalised for the truncation (integrates to 1).
    double density(double hour) const;
    double sample_hour(RandomStream& rng) const;
};

TimeOfDayProfile default_time_of_day_profile();

enum class Route { NPP, RTGS, SWIFT, INTRABANK };
std::string to_string(Route r);

struct Transaction {
    std::uint32_t id = 0;
    Route route = Route::NPP;
    std::uint16_t origin = 0;  // index into the configured institution set
    std::uint16_t dest = 0;
    double hour = 0.0;
    double amount = 0.0;
    bool needs_payid = false;
    bool tls_reconnect = false;
};

struct TrafficConfig {
    std::vector<ScenarioSpec> scenarios;
    TimeOfDayProfile profile;
    LogNormalParams amount;  // AUD
    double reroute_threshold_aud = 250000.0;
    double tls_reconnect_rate = 0.001;
    double payid_rate = 1.0;
    LogNormalParams payid{2.0, 0.47};
    bool proportional_routes = false;
    double base_npp_per_day = 5.2e6;
    double institutional_tps = 13.5;  // Big 4 per-institution daily-average NPP rate
    std::map<std::string, double> tls_overhead_ms;
};

std::vector<ScenarioSpec> default_scenarios();
LogNormalParams amount_params_for_exceedance(double threshold, double fraction, double sigma_ln);
std::map<std::string, double> default_tls_overheads(const std::vector<AlgorithmProfile>& profiles);
TrafficConfig default_traffic_config(const std::vector<AlgorithmProfile>& profiles);
void validate(const TrafficConfig& cfg);

const ScenarioSpec& find_scenario(const std::vector<ScenarioSpec>& scenarios, const std::string& name);
ScenarioSpec sample_scenario(const std::vector<ScenarioSpec>& scenarios, RandomStream& rng);

// Network-wide arrival rate (TPS) at the given hour for a day carrying daily_volume transactions.
double intraday_rate(double hour, const TimeOfDayProfile& profile, double daily_volume);
// Per-institution rate: the Big 4 daily-average rate scaled by the scenario volume and the hourly shape.
double institutional_rate(double hour, const TrafficConfig& cfg, const ScenarioSpec& scenario);
double route_volume_scale(const TrafficConfig& cfg, const ScenarioSpec& scenario);

std::vector<Transaction> generate_day(const ScenarioSpec& scenario, std::size_t n_sample, const TrafficConfig& cfg,
                                      const InstitutionSampler& institutions, RandomStream& rng);

double payid_latency(RandomStream& rng, const LogNormalParams& params = {2.0, 0.47});
double tls_reconnect_overhead(const AlgorithmProfile& algo, const TrafficConfig& cfg);

void write_transactions_csv(const std::string& path, const std::vector<Transaction>& txs,
                            const std::vector<Institution>& institutions);

}  // namespace pqcsim
