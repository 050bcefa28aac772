#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "pqcsim/latency_db.hpp"
#include "pqcsim/network_model.hpp"
#include "pqcsim/queueing.hpp"
#include "pqcsim/traffic_gen.hpp"

namespace pqcsim {

enum class HsmTier { software, pcie, network };
double hsm_overhead_ms(HsmTier tier);
HsmTier parse_hsm_tier(const std::string& s);
std::string to_string(HsmTier tier);

struct RunConfig {
    std::uint64_t master_seed = 42;
    int n_days = 1000;
    std::size_t n_sample = 10000;
    std::vector<std::string> algorithms;  // empty selects every profile
    double sla_npp_ms = 2000.0;
    double sla_rits_ms = 30000.0;
    double sla_swift_ms = 86'400'000.0;
    double hsm_overhead_per_hop_ms = 0.0;
    int c_servers = 2;
    int npp_sign_hops = 4;
    int workers = 0;  // 0 = hardware concurrency
    std::string scenario_override;
    // Scale the route arrival rate with the day's NPP volume (otherwise the base rate is used every day).
    bool scale_lambda_with_volume = true;
};

void validate(const RunConfig& cfg);

enum class StreamPurpose : std::uint64_t { scenario = 1, traffic = 2, network = 3, signing = 4, bootstrap = 5 };

std::uint64_t day_seed(std::uint64_t master_seed, std::uint64_t day_index, StreamPurpose purpose);

double percentile(std::vector<double> samples, double q);
// In-place selection of several quantiles; reorders data.
std::vector<double> percentiles_inplace(std::vector<double>& data, const std::vector<double>& qs);
std::pair<double, double> ci_mean_t(const std::vector<double>& values, double confidence = 0.95);
double t_critical(double df, double confidence = 0.95);

struct DayResult {
    int day_index = 0;
    std::string scenario;
    double p50_ms = 0.0;
    double p95_ms = 0.0;
    double p99_ms = 0.0;
    double sla_compliance = 0.0;
    double min_ms = 0.0;
    double max_ms = 0.0;
    std::size_t n = 0;
    std::size_t violations = 0;
};

struct AlgorithmCorpus {
    std::string algo;
    std::vector<DayResult> days;
    double mean_p50 = 0.0;
    double mean_p95 = 0.0;
    double mean_p99 = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    double compliance = 0.0;  // transaction-weighted over the corpus
    std::size_t n_tx = 0;
    std::size_t n_violations = 0;

    std::vector<double> daily_p99() const;
};

// One day's NPP latencies kept for the tail and goodness-of-fit analyses.
struct RepresentativeDay {
    int day_index = -1;
    std::string scenario;
    std::vector<std::string> algos;
    std::vector<std::vector<double>> latency_ms;     // per algorithm, time order
    std::vector<std::vector<double>> no_payid_ms;    // PayID and queue wait removed
    std::vector<std::string> origin_city;
};

struct CorpusResult {
    std::vector<std::string> scenarios;  // per day
    std::vector<AlgorithmCorpus> algos;
    RepresentativeDay rep;

    const AlgorithmCorpus& find(const std::string& name) const;
};

// Algorithm-independent randomness for one simulated day.
struct DayDraws {
    std::vector<Transaction> txs;   // NPP transactions only, time order
    std::vector<double> network_ms;  // jittered route latency
    std::vector<double> payid_ms;    // jittered PayID lookup, 0 when not needed
    std::vector<double> z;           // standard normals for signing draws, 4 per hop per tx
    Ar1State end_state;
};

class Simulator {
public:
    Simulator(std::vector<AlgorithmProfile> profiles, NetworkConfig network, TrafficConfig traffic, RunConfig run);

    const RunConfig& run_config() const { return run_; }
    const TrafficConfig& traffic() const { return traffic_; }
    const NetworkModel& network() const { return network_; }
    const std::vector<AlgorithmProfile>& profiles() const { return profiles_; }
    std::vector<const AlgorithmProfile*> selected() const;

    std::vector<ScenarioSpec> scenario_sequence() const;
    double route_lambda(const ScenarioSpec& scenario) const;
    double queue_wait_ms(const AlgorithmProfile& algo, const ScenarioSpec& scenario) const;
    double crypto_ms(const AlgorithmProfile& algo, const double* z) const;

    DayDraws draw_day(int day_index, const ScenarioSpec& scenario, const Ar1State& start) const;

    // Draws its own randomness from rng and advances ar1 once.
    double simulate_transaction(const Transaction& tx, const AlgorithmProfile& algo, const ScenarioSpec& scenario,
                                RandomStream& rng, Ar1State& ar1) const;
    DayResult simulate_day(int day_index, const ScenarioSpec& scenario, const AlgorithmProfile& algo,
                           const Ar1State& start) const;
    DayResult simulate_day(int day_index, const AlgorithmProfile& algo) const;

    CorpusResult run_corpus() const;

private:
    struct AlgoCache {
        LogNormalParams sign, verify, cls_sign, cls_verify;
        bool has_verify = false, hybrid = false, cls_has_verify = false;
        double tls_ms = 0.0;
    };
    const AlgoCache& cache(const AlgorithmProfile& algo) const;
    double crypto_ms(const AlgoCache& c, const double* z) const;
    std::vector<double> latencies(const DayDraws& d, const AlgorithmProfile& algo, const ScenarioSpec& s,
                                  bool with_payid, bool with_queue) const;
    DayResult summarise(int day_index, const std::string& scenario, std::vector<double> lat) const;

    std::vector<AlgorithmProfile> profiles_;
    std::vector<AlgoCache> caches_;
    NetworkModel network_;
    TrafficConfig traffic_;
    RunConfig run_;
    InstitutionSampler institutions_;
};

}  // namespace pqcsim
