#include "pqcsim/decision_models.hpp"

#include <cmath>
#include <stdexcept>

namespace pqcsim {

CdiRecord cdi(double delta_p99_ms, double p99_e2e_ms, const std::string& algo, double threshold) {
    if (!(p99_e2e_ms > 0.0)) throw std::domain_error("cdi: p99_e2e must be positive");
    if (delta_p99_ms < 0.0) throw std::domain_error("cdi: delta must be non-negative");
    CdiRecord r;
    r.algo = algo;
    r.delta_p99_ms = delta_p99_ms;
    r.p99_e2e_ms = p99_e2e_ms;
    r.cdi = delta_p99_ms / p99_e2e_ms;
    r.passes_threshold = r.cdi < threshold;
    return r;
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::PASS: return "PASS";
        case Verdict::SIG_FAIL: return "SIG_FAIL";
        case Verdict::COMBINED_FAIL: return "COMBINED_FAIL";
    }
    return "?";
}

std::vector<FormatLimit> default_format_limits() {
    return {{"SWIFT_MT_2048", 2048}, {"NPP_PAYID_65536", 65536}, {"TLS_RECORD_16384", 16384}};
}

std::vector<FormatVerdict> format_compliance(const AlgorithmProfile& profile, const AlgorithmProfile* classical,
                                             const std::vector<FormatLimit>& limits) {
    if (profile.pk_bytes <= 0 || profile.sig_bytes <= 0) throw std::invalid_argument("format_compliance: invalid sizes");
    int sig = profile.sig_bytes;
    int combined = profile.pk_bytes + profile.sig_bytes;
    if (profile.mode == Mode::hybrid) {
        if (!classical) throw std::invalid_argument("format_compliance: hybrid profile needs its classical profile");
        sig += classical->sig_bytes;
        combined += classical->sig_bytes;
    }
    std::vector<FormatVerdict> out;
    for (const auto& l : limits) {
        FormatVerdict v;
        v.algo = profile.name;
        v.limit_name = l.name;
        v.limit_bytes = l.bytes;
        v.sig_bytes = sig;
        v.combined_bytes = combined;
        if (sig > l.bytes)
            v.verdict = Verdict::SIG_FAIL;
        else if (combined > l.bytes)
            v.verdict = Verdict::COMBINED_FAIL;
        out.push_back(v);
    }
    return out;
}

std::vector<RouteSpec> default_routes() {
    return {{"NPP", 0.0, 2000.0, 13.5}, {"RITS", 14.0 + 263.0, 30000.0, 0.022}, {"SWIFT", 192.0 + 645.0, 86'400'000.0, 0.001}};
}

const RouteSpec& find_route(const std::vector<RouteSpec>& routes, const std::string& name) {
    for (const auto& r : routes)
        if (r.name == name) return r;
    throw std::invalid_argument("unknown route '" + name + "'");
}

RouteResult route_p99(const RouteSpec& route, double sign_p99_ms, const QueueAssessment& queue,
                      double baseline_route_p99_ms) {
    RouteResult r;
    r.route = route.name;
    r.sign_p99_ms = sign_p99_ms;
    r.queue_wait_ms = queue.mean_wait_ms();
    r.route_p99_ms = sign_p99_ms + route.fixed_overhead_ms + r.queue_wait_ms;
    r.delta_vs_baseline = r.route_p99_ms - baseline_route_p99_ms;
    r.cdi_route = r.delta_vs_baseline / r.route_p99_ms;
    r.sla_pass = r.route_p99_ms <= route.sla_ms;
    return r;
}

double route_sign_p99(const AlgorithmProfile& profile, const AlgorithmProfile& baseline,
                      std::optional<double> measured_delta_ms) {
    if (profile.sign_p99_ref_ms) return *profile.sign_p99_ref_ms;
    if (!baseline.sign_p99_ref_ms) throw std::invalid_argument("baseline profile has no sign p99 reference");
    double delta = measured_delta_ms ? *measured_delta_ms : profile.delta_p99_ref_ms.value_or(0.0);
    return *baseline.sign_p99_ref_ms + delta;
}

std::vector<RouteResult> route_table(const RouteSpec& route, const std::vector<AlgorithmProfile>& profiles, int c,
                                     const std::map<std::string, double>& measured_deltas) {
    const AlgorithmProfile* base = nullptr;
    for (const auto& p : profiles)
        if (p.mode == Mode::classical) base = &p;
    if (!base) throw std::invalid_argument("route_table: no classical baseline profile");
    auto sign_of = [&](const AlgorithmProfile& p) {
        auto it = measured_deltas.find(p.name);
        std::optional<double> d;
        if (it != measured_deltas.end()) d = it->second;
        return route_sign_p99(p, *base, d);
    };
    auto queue_of = [&](const AlgorithmProfile& p) { return mmc_assess({route.lambda_tps, p.service_rate(), c}); };
    double base_p99 = route_p99(route, sign_of(*base), queue_of(*base), 0.0).route_p99_ms;
    std::vector<RouteResult> out;
    for (const auto& p : profiles) {
        auto r = route_p99(route, sign_of(p), queue_of(p), base_p99);
        r.algo = p.name;
        out.push_back(r);
    }
    return out;
}

double becs_amortised(double sign_ms, long long batch_size) {
    if (batch_size < 1) throw std::domain_error("becs_amortised: batch size must be >= 1");
    return sign_ms / static_cast<double>(batch_size);
}

std::vector<std::pair<int, long long>> volume_projection(double base_tx_per_day, double rate, int years,
                                                         int base_year) {
    if (!(base_tx_per_day > 0.0)) throw std::domain_error("volume_projection: base must be positive");
    std::vector<std::pair<int, long long>> out;
    for (int k = 0; k < years; ++k)
        out.push_back({base_year + k, std::llround(base_tx_per_day * std::pow(1.0 + rate, k))});
    return out;
}

namespace {
bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }
}  // namespace

std::vector<HndlRow> hndl_exposure(const HndlParams& p) {
    if (p.crqc_year < p.base_year) throw std::domain_error("hndl_exposure: crqc_year before base_year");
    auto vols = volume_projection(p.base_volume, p.rate, p.crqc_year - p.base_year + 1, p.base_year);
    std::vector<HndlRow> rows;
    long long cum = 0;
    double upper = 0;
    for (const auto& [year, tx] : vols) {
        HndlRow r;
        r.year = year;
        r.tx_per_day = tx;
        int days = p.leap_years && is_leap(year) ? 366 : p.days_per_year;
        r.records = tx * days;
        r.retained_until = year + p.retention_years;
        if (year == p.crqc_year && p.retention_years > 0) {
            r.exposed = "partial";
            r.expected_exposed_records = p.partial_fraction * r.records;
            upper += r.records;
        } else if (year < p.crqc_year && year + p.retention_years > p.crqc_year) {
            r.exposed = "yes";
            r.expected_exposed_records = static_cast<double>(r.records);
            cum += r.records;
            upper += r.records;
        } else {
            r.exposed = "no";
        }
        r.cumulative = cum;
        r.cumulative_upper_bound = static_cast<long long>(upper);
        rows.push_back(r);
    }
    return rows;
}

double storage_cost(double records, double bytes_per_record, double usd_per_gb_month) {
    if (records < 0 || bytes_per_record < 0 || usd_per_gb_month < 0)
        throw std::domain_error("storage_cost: inputs must be non-negative");
    return records * bytes_per_record / 1e9 * usd_per_gb_month * 12.0;
}

std::vector<MigrationPhase> migration_cost_table(const MigrationBreakdown& b) {
    double phase1 = b.big4_count * b.big4_each_usd_m + b.regional_count * b.regional_each_usd_m;
    phase1 = std::round(phase1 * 10.0) / 10.0;
    auto band = [&](double v) { return std::make_pair(std::round(v * (1 - b.sensitivity) * 10) / 10, std::round(v * (1 + b.sensitivity) * 10) / 10); };
    std::vector<MigrationPhase> v{
        {0, 2025, "Pre-migration baseline", 90.0, true, 0.35, 90.0, 90.0},
        {1, 2026, "Hybrid deploy", phase1, false, 0.28, band(phase1).first, band(phase1).second},
        {2, 2027, "PQC selective", 7.6, false, 0.15, band(7.6).first, band(7.6).second},
        {3, 2028, "Full PQC", 1.5, true, 0.05, band(1.5).first, band(1.5).second}};
    return v;
}

double sla_headroom(double p99_ms, double sla_ms) { return sla_ms - p99_ms; }

}  // namespace pqcsim
