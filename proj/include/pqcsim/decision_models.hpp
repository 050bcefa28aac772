#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pqcsim/latency_db.hpp"
#include "pqcsim/queueing.hpp"

namespace pqcsim {

struct CdiRecord {
    std::string algo;
    double delta_p99_ms = 0.0;
    double p99_e2e_ms = 0.0;
    double cdi = 0.0;
    bool passes_threshold = true;
};

CdiRecord cdi(double delta_p99_ms, double p99_e2e_ms, const std::string& algo = "", double threshold = 0.04);

enum class Verdict { PASS, SIG_FAIL, COMBINED_FAIL };
std::string to_string(Verdict v);

struct FormatLimit {
    std::string name;
    int bytes = 0;
};

std::vector<FormatLimit> default_format_limits();

struct FormatVerdict {
    std::string algo;
    std::string limit_name;
    int limit_bytes = 0;
    int sig_bytes = 0;       // signature bytes on the wire (hybrid adds the classical signature)
    int combined_bytes = 0;  // public key + signature(s)
    Verdict verdict = Verdict::PASS;
};

std::vector<FormatVerdict> format_compliance(const AlgorithmProfile& profile, const AlgorithmProfile* classical = nullptr,
                                             const std::vector<FormatLimit>& limits = default_format_limits());

struct RouteSpec {
    std::string name;
    double fixed_overhead_ms = 0.0;
    double sla_ms = 0.0;
    double lambda_tps = 0.0;
};

std::vector<RouteSpec> default_routes();
const RouteSpec& find_route(const std::vector<RouteSpec>& routes, const std::string& name);

struct RouteResult {
    std::string route;
    std::string algo;
    double sign_p99_ms = 0.0;
    double queue_wait_ms = 0.0;
    double route_p99_ms = 0.0;
    double delta_vs_baseline = 0.0;
    double cdi_route = 0.0;
    bool sla_pass = true;
};

RouteResult route_p99(const RouteSpec& route, double sign_p99_ms, const QueueAssessment& queue,
                      double baseline_route_p99_ms);

// ECDSA sign p99 + NPP delta for most profiles; a direct sign p99 reference where one is given.
double route_sign_p99(const AlgorithmProfile& profile, const AlgorithmProfile& baseline,
                      std::optional<double> measured_delta_ms = std::nullopt);

std::vector<RouteResult> route_table(const RouteSpec& route, const std::vector<AlgorithmProfile>& profiles, int c,
                                     const std::map<std::string, double>& measured_deltas = {});

double becs_amortised(double sign_ms, long long batch_size);

std::vector<std::pair<int, long long>> volume_projection(double base_tx_per_day, double rate, int years,
                                                         int base_year = 2026);

struct HndlRow {
    int year = 0;
    long long tx_per_day = 0;
    long long records = 0;
    int retained_until = 0;
    std::string exposed;  // yes, no, partial
    double expected_exposed_records = 0.0;
    long long cumulative = 0;             // fully exposed years only
    long long cumulative_upper_bound = 0;  // includes the partial year in full
};

struct HndlParams {
    int base_year = 2026;
    double base_volume = 5.2e6;
    double rate = 0.156;
    int crqc_year = 2030;
    int retention_years = 7;
    int days_per_year = 365;
    bool leap_years = false;
    double partial_fraction = 0.5;
};

std::vector<HndlRow> hndl_exposure(const HndlParams& p = {});

double storage_cost(double records, double bytes_per_record, double usd_per_gb_month = 0.004);

struct MigrationPhase {
    int phase = 0;
    int year = 0;
    std::string label;
    double cost_usd_m = 0.0;
    bool recurring = false;
    double becs_fraction = 0.0;
    double low_usd_m = 0.0;
    double high_usd_m = 0.0;
};

struct MigrationBreakdown {
    int big4_count = 4;
    double big4_each_usd_m = 3.7;
    int regional_count = 9;
    double regional_each_usd_m = 0.733;
    double sensitivity = 0.5;
};

std::vector<MigrationPhase> migration_cost_table(const MigrationBreakdown& b = {});

double sla_headroom(double p99_ms, double sla_ms);

}  // namespace pqcsim
