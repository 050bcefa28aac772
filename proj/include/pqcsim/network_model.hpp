#pragma once

#include <string>
#include <vector>

#include "pqcsim/latency_db.hpp"
#include "pqcsim/random.hpp"
#include "pqcsim/scenario.hpp"

namespace pqcsim {

struct HopSpec {
    std::string label;
    double mean_ms = 0.0;
    double cv = 0.0;

    LogNormalParams params() const { return fit_lognormal(mean_ms, mean_ms * cv); }
};

struct Institution {
    std::string name;
    double share = 0.0;
    std::string city;
};

struct CityHubLatency {
    std::string city;
    double one_way_ms = 0.0;
};

struct Ar1State {
    double x = 0.0;
    double alpha = 0.30;
    double sigma_ar = 0.15;
    double sigma_eps = 1.0;
};

struct NetworkConfig {
    std::vector<HopSpec> tiers;
    std::vector<Institution> institutions;
    std::vector<CityHubLatency> cities;
    Ar1State ar1;
    double jitter_floor_ms = 0.01;
    // Tier draws making up one NPP route, in order.
    std::vector<std::string> npp_hops{"intrabank", "hub", "intrabank"};
    // When false the hub draw is taken to already contain the city legs.
    bool city_legs_additive = false;
    // Destination leg uses the origin city (same-city settlement pair).
    bool mirror_origin_city = true;

    const HopSpec& tier(const std::string& label) const;
    double city_leg_ms(const std::string& city) const;
};

NetworkConfig default_network_config();
std::vector<Institution> default_institutions(int n_regionals = 9);
void validate(const NetworkConfig& cfg);

Ar1State ar1_step(const Ar1State& state, RandomStream& rng);
Ar1State ar1_step(const Ar1State& state, double eps);
double apply_jitter(double base_ms, const Ar1State& state, double floor_ms = 0.01);
double jitter_multiplier(const Ar1State& state);
Ar1State carry_over_or_reset(const Ar1State& state, const ScenarioSpec& prev, const ScenarioSpec& next);

class InstitutionSampler {
public:
    explicit InstitutionSampler(std::vector<Institution> institutions);
    const Institution& sample(RandomStream& rng) const;
    std::size_t sample_index(RandomStream& rng) const;
    const std::vector<Institution>& institutions() const { return inst_; }

private:
    std::vector<Institution> inst_;
    std::vector<double> cumulative_;
};

Institution sample_institution(const std::vector<Institution>& institutions, RandomStream& rng);

class NetworkModel {
public:
    explicit NetworkModel(NetworkConfig cfg);

    const NetworkConfig& config() const { return cfg_; }
    double geographic_ms(const Institution& origin, const Institution& dest) const;
    double npp_route_latency(const Institution& origin, const Institution& dest, RandomStream& rng,
                             const Ar1State& ar1) const;

private:
    NetworkConfig cfg_;
    std::vector<LogNormalParams> hops_;
};

}  // namespace pqcsim
