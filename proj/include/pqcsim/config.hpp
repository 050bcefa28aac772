#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "pqcsim/decision_models.hpp"
#include "pqcsim/latency_db.hpp"
#include "pqcsim/mc_engine.hpp"
#include "pqcsim/network_model.hpp"
#include "pqcsim/traffic_gen.hpp"

namespace pqcsim {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct DecisionConfig {
    std::vector<RouteSpec> routes = default_routes();
    std::vector<FormatLimit> limits = default_format_limits();
    double cdi_threshold = 0.04;
    HndlParams hndl;
    double storage_usd_per_gb_month = 0.004;
    std::vector<double> storage_bytes_per_record{1000.0, 2000.0};
    std::vector<long long> becs_batch_sizes{1000, 50000, 100000};
    bool ecdsa_sec1 = false;
    MigrationBreakdown migration;
    int projection_years = 5;
};

struct AnalysisConfig {
    std::size_t block_size = 50;
    int bootstrap_resamples = 500;
    bool daily_maxima = false;
    double sweep_tps_max = 20.0;
    double sweep_tps_step = 0.1;
    int growth_days = 100;
    std::string growth_algorithm = "ML-DSA-65";
};

struct SimConfig {
    std::vector<AlgorithmProfile> profiles;
    NetworkConfig network;
    TrafficConfig traffic;
    RunConfig run;
    DecisionConfig decision;
    AnalysisConfig analysis;
    std::map<std::string, std::string> provenance;  // where each default comes from

    Simulator make_simulator() const;
};

SimConfig default_config();
// Applies file values on top of defaults; an empty or missing-content file yields the defaults.
SimConfig load_config(const std::string& path);
SimConfig config_from_json(const nlohmann::json& j);
// Throws ConfigError listing every violated invariant.
void validate(const SimConfig& cfg);
nlohmann::json config_echo(const SimConfig& cfg);

}  // namespace pqcsim
