#include "pqcsim/mc_engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <boost/math/distributions/students_t.hpp>

namespace pqcsim {

double hsm_overhead_ms(HsmTier tier) {
    switch (tier) {
        case HsmTier::software: return 0.0;
        case HsmTier::pcie: return 0.5;
        case HsmTier::network: return 2.0;
    }
    return 0.0;
}

HsmTier parse_hsm_tier(const std::string& s) {
    if (s == "software") return HsmTier::software;
    if (s == "pcie") return HsmTier::pcie;
    if (s == "network") return HsmTier::network;
    throw std::invalid_argument("unknown HSM tier '" + s + "' (expected software, pcie or network)");
}

std::string to_string(HsmTier tier) {
    switch (tier) {
        case HsmTier::software: return "software";
        case HsmTier::pcie: return "pcie";
        case HsmTier::network: return "network";
    }
    return "?";
}

void validate(const RunConfig& cfg) {
    std::ostringstream err;
    if (cfg.n_days < 1) err << "  run.n_days must be >= 1\n";
    if (cfg.n_sample < 1) err << "  run.n_sample must be >= 1\n";
    if (!(cfg.sla_npp_ms > 0 && cfg.sla_rits_ms > 0 && cfg.sla_swift_ms > 0)) err << "  run.sla_ms must be > 0\n";
    if (cfg.hsm_overhead_per_hop_ms < 0) err << "  run.hsm_overhead_per_hop_ms must be >= 0\n";
    if (cfg.c_servers < 1) err << "  run.c_servers must be >= 1\n";
    if (cfg.npp_sign_hops < 1) err << "  run.npp_sign_hops must be >= 1\n";
    if (cfg.workers < 0) err << "  run.workers must be >= 0\n";
    auto msg = err.str();
    if (!msg.empty()) throw std::invalid_argument(msg);
}

std::uint64_t day_seed(std::uint64_t master_seed, std::uint64_t day_index, StreamPurpose purpose) {
    return hash_seed({master_seed, static_cast<std::uint64_t>(purpose), day_index});
}

std::vector<double> percentiles_inplace(std::vector<double>& data, const std::vector<double>& qs) {
    if (data.empty()) throw std::domain_error("percentile of an empty sample");
    std::vector<double> out;
    const std::size_t n = data.size();
    for (double q : qs) {
        if (q < 0.0 || q > 1.0) throw std::domain_error("percentile: q must be in [0,1]");
        double h = (n - 1) * q;
        auto lo = static_cast<std::size_t>(std::floor(h));
        std::nth_element(data.begin(), data.begin() + lo, data.end());
        double v = data[lo];
        if (lo + 1 < n && h > lo) {
            double next = *std::min_element(data.begin() + lo + 1, data.end());
            v += (h - lo) * (next - v);
        }
        out.push_back(v);
    }
    return out;
}

double percentile(std::vector<double> samples, double q) { return percentiles_inplace(samples, {q})[0]; }

double t_critical(double df, double confidence) {
    boost::math::students_t dist(df);
    return boost::math::quantile(boost::math::complement(dist, (1.0 - confidence) / 2.0));
}

std::pair<double, double> ci_mean_t(const std::vector<double>& values, double confidence) {
    const std::size_t n = values.size();
    if (n < 2) throw std::domain_error("ci_mean_t: need at least two values");
    double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    double half = t_critical(n - 1.0, confidence) * std::sqrt(ss / (n - 1.0)) / std::sqrt(double(n));
    return {mean - half, mean + half};
}

std::vector<double> AlgorithmCorpus::daily_p99() const {
    std::vector<double> v;
    for (const auto& d : days) v.push_back(d.p99_ms);
    return v;
}

const AlgorithmCorpus& CorpusResult::find(const std::string& name) const {
    for (const auto& a : algos)
        if (a.algo == name) return a;
    throw std::invalid_argument("algorithm '" + name + "' not in corpus");
}

Simulator::Simulator(std::vector<AlgorithmProfile> profiles, NetworkConfig network, TrafficConfig traffic,
                     RunConfig run)
    : profiles_(std::move(profiles)),
      network_(std::move(network)),
      traffic_(std::move(traffic)),
      run_(std::move(run)),
      institutions_(network_.config().institutions) {
    validate_profiles(profiles_);
    validate(traffic_);
    validate(run_);
    for (const auto& name : run_.algorithms) find_profile(profiles_, name);
    if (!run_.scenario_override.empty()) find_scenario(traffic_.scenarios, run_.scenario_override);
    for (const auto& p : profiles_) {
        AlgoCache c;
        c.sign = p.sign_params();
        c.has_verify = p.verify_mean_us > 0.0;
        if (c.has_verify) c.verify = p.verify_params();
        if (const auto* cl = linked_classical(profiles_, p)) {
            c.hybrid = true;
            c.cls_sign = cl->sign_params();
            c.cls_has_verify = cl->verify_mean_us > 0.0;
            if (c.cls_has_verify) c.cls_verify = cl->verify_params();
        }
        c.tls_ms = tls_reconnect_overhead(p, traffic_);
        caches_.push_back(c);
    }
}

const Simulator::AlgoCache& Simulator::cache(const AlgorithmProfile& algo) const {
    for (std::size_t i = 0; i < profiles_.size(); ++i)
        if (profiles_[i].name == algo.name) return caches_[i];
    throw std::invalid_argument("algorithm '" + algo.name + "' not configured");
}

std::vector<const AlgorithmProfile*> Simulator::selected() const {
    std::vector<const AlgorithmProfile*> out;
    if (run_.algorithms.empty()) {
        for (const auto& p : profiles_) out.push_back(&p);
    } else {
        for (const auto& n : run_.algorithms) out.push_back(&find_profile(profiles_, n));
    }
    return out;
}

std::vector<ScenarioSpec> Simulator::scenario_sequence() const {
    std::vector<ScenarioSpec> seq;
    if (!run_.scenario_override.empty()) {
        seq.assign(run_.n_days, find_scenario(traffic_.scenarios, run_.scenario_override));
        return seq;
    }
    RandomStream rng(day_seed(run_.master_seed, 0, StreamPurpose::scenario));
    for (int d = 0; d < run_.n_days; ++d) seq.push_back(sample_scenario(traffic_.scenarios, rng));
    return seq;
}

double Simulator::route_lambda(const ScenarioSpec& scenario) const {
    double scale = run_.scale_lambda_with_volume ? route_volume_scale(traffic_, scenario) : 1.0;
    return traffic_.institutional_tps * scale;
}

double Simulator::queue_wait_ms(const AlgorithmProfile& algo, const ScenarioSpec& scenario) const {
    return mmc_assess({route_lambda(scenario), algo.service_rate(), run_.c_servers}).mean_wait_ms();
}

double Simulator::crypto_ms(const AlgorithmProfile& algo, const double* z) const {
    return crypto_ms(cache(algo), z);
}

double Simulator::crypto_ms(const AlgoCache& c, const double* z) const {
    double us = 0.0;
    for (int h = 0; h < run_.npp_sign_hops; ++h, z += 4) {
        us += c.sign.value_at(z[0]);
        if (c.has_verify) us += c.verify.value_at(z[1]);
        if (c.hybrid) {
            us += c.cls_sign.value_at(z[2]);
            if (c.cls_has_verify) us += c.cls_verify.value_at(z[3]);
        }
    }
    return us / 1000.0;
}

DayDraws Simulator::draw_day(int day_index, const ScenarioSpec& scenario, const Ar1State& start) const {
    DayDraws d;
    RandomStream rt(day_seed(run_.master_seed, day_index, StreamPurpose::traffic));
    auto all = generate_day(scenario, run_.n_sample, traffic_, institutions_, rt);
    for (const auto& t : all)
        if (t.route == Route::NPP) d.txs.push_back(t);

    const auto& inst = institutions_.institutions();
    const double floor = network_.config().jitter_floor_ms;
    RandomStream rn(day_seed(run_.master_seed, day_index, StreamPurpose::network));
    Ar1State ar = start;
    d.network_ms.reserve(d.txs.size());
    d.payid_ms.reserve(d.txs.size());
    for (const auto& t : d.txs) {
        ar = ar1_step(ar, rn);
        d.network_ms.push_back(network_.npp_route_latency(inst[t.origin], inst[t.dest], rn, ar));
        d.payid_ms.push_back(t.needs_payid ? apply_jitter(payid_latency(rn, traffic_.payid), ar, floor) : 0.0);
    }
    d.end_state = ar;

    RandomStream rs(day_seed(run_.master_seed, day_index, StreamPurpose::signing));
    d.z.resize(d.txs.size() * 4 * run_.npp_sign_hops);
    for (auto& v : d.z) v = rs.normal();
    return d;
}

double Simulator::simulate_transaction(const Transaction& tx, const AlgorithmProfile& algo,
                                       const ScenarioSpec& scenario, RandomStream& rng, Ar1State& ar1) const {
    const auto& inst = institutions_.institutions();
    ar1 = ar1_step(ar1, rng);
    double total = network_.npp_route_latency(inst[tx.origin], inst[tx.dest], rng, ar1);
    if (tx.needs_payid)
        total += apply_jitter(payid_latency(rng, traffic_.payid), ar1, network_.config().jitter_floor_ms);
    std::vector<double> z(4 * run_.npp_sign_hops);
    for (auto& v : z) v = rng.normal();
    total += crypto_ms(algo, z.data());
    total += run_.npp_sign_hops * run_.hsm_overhead_per_hop_ms;
    if (tx.tls_reconnect) total += cache(algo).tls_ms;
    total += queue_wait_ms(algo, scenario);
    return total;
}

std::vector<double> Simulator::latencies(const DayDraws& d, const AlgorithmProfile& algo, const ScenarioSpec& s,
                                         bool with_payid, bool with_queue) const {
    const AlgoCache& c = cache(algo);
    const double fixed = run_.npp_sign_hops * run_.hsm_overhead_per_hop_ms + (with_queue ? queue_wait_ms(algo, s) : 0.0);
    const std::size_t stride = 4 * run_.npp_sign_hops;
    std::vector<double> out(d.txs.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        double v = d.network_ms[i] + crypto_ms(c, &d.z[i * stride]) + fixed;
        if (with_payid) v += d.payid_ms[i];
        if (d.txs[i].tls_reconnect) v += c.tls_ms;
        out[i] = v;
    }
    return out;
}

DayResult Simulator::summarise(int day_index, const std::string& scenario, std::vector<double> lat) const {
    DayResult r;
    r.day_index = day_index;
    r.scenario = scenario;
    r.n = lat.size();
    if (lat.empty()) return r;
    r.min_ms = lat.front();
    r.max_ms = lat.front();
    for (double v : lat) {
        if (v > run_.sla_npp_ms) ++r.violations;
        r.min_ms = std::min(r.min_ms, v);
        r.max_ms = std::max(r.max_ms, v);
    }
    r.sla_compliance = 1.0 - double(r.violations) / double(r.n);
    auto p = percentiles_inplace(lat, {0.50, 0.95, 0.99});
    r.p50_ms = p[0];
    r.p95_ms = p[1];
    r.p99_ms = p[2];
    return r;
}

DayResult Simulator::simulate_day(int day_index, const ScenarioSpec& scenario, const AlgorithmProfile& algo,
                                  const Ar1State& start) const {
    auto d = draw_day(day_index, scenario, start);
    return summarise(day_index, scenario.name, latencies(d, algo, scenario, true, true));
}

DayResult Simulator::simulate_day(int day_index, const AlgorithmProfile& algo) const {
    auto seq = scenario_sequence();
    if (day_index < 0 || day_index >= int(seq.size())) throw std::out_of_range("simulate_day: day index");
    // Rebuild the carry-over state from the start of the day's chain.
    int first = day_index;
    while (first > 0 && !seq[first].multi_day_family.empty() &&
           seq[first - 1].multi_day_family == seq[first].multi_day_family)
        --first;
    Ar1State ar = network_.config().ar1;
    ar.x = 0.0;
    for (int d = first; d < day_index; ++d) ar = draw_day(d, seq[d], ar).end_state;
    return simulate_day(day_index, seq[day_index], algo, ar);
}

CorpusResult Simulator::run_corpus() const {
    const auto seq = scenario_sequence();
    const auto algos = selected();
    const int n_days = run_.n_days;

    std::vector<std::pair<int, int>> chains;  // [first, last)
    for (int d = 0; d < n_days;) {
        int e = d + 1;
        while (e < n_days && !seq[d].multi_day_family.empty() && seq[e].multi_day_family == seq[d].multi_day_family)
            ++e;
        chains.push_back({d, e});
        d = e;
    }

    int rep = 0;
    for (int d = 0; d < n_days; ++d)
        if (seq[d].name == "normal") {
            rep = d;
            break;
        }

    CorpusResult out;
    for (const auto& s : seq) out.scenarios.push_back(s.name);
    out.algos.resize(algos.size());
    for (std::size_t a = 0; a < algos.size(); ++a) {
        out.algos[a].algo = algos[a]->name;
        out.algos[a].days.resize(n_days);
    }
    out.rep.day_index = rep;
    out.rep.scenario = seq[rep].name;
    out.rep.latency_ms.resize(algos.size());
    out.rep.no_payid_ms.resize(algos.size());
    for (const auto* a : algos) out.rep.algos.push_back(a->name);

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < chains.size(); k = next++) {
            Ar1State ar = network_.config().ar1;
            ar.x = 0.0;
            for (int d = chains[k].first; d < chains[k].second; ++d) {
                if (d > chains[k].first) ar = carry_over_or_reset(ar, seq[d - 1], seq[d]);
                auto draws = draw_day(d, seq[d], ar);
                ar = draws.end_state;
                for (std::size_t a = 0; a < algos.size(); ++a) {
                    auto lat = latencies(draws, *algos[a], seq[d], true, true);
                    if (d == rep) {
                        out.rep.latency_ms[a] = lat;
                        out.rep.no_payid_ms[a] = latencies(draws, *algos[a], seq[d], false, false);
                        if (a == 0)
                            for (const auto& t : draws.txs)
                                out.rep.origin_city.push_back(network_.config().institutions[t.origin].city);
                    }
                    out.algos[a].days[d] = summarise(d, seq[d].name, std::move(lat));
                }
            }
        }
    };
    int n_workers = run_.workers > 0 ? run_.workers : int(std::max(1u, std::thread::hardware_concurrency()));
    n_workers = std::min<int>(n_workers, int(chains.size()));
    if (n_workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    for (auto& ac : out.algos) {
        double s50 = 0, s95 = 0, s99 = 0;
        for (const auto& d : ac.days) {
            s50 += d.p50_ms;
            s95 += d.p95_ms;
            s99 += d.p99_ms;
            ac.n_tx += d.n;
            ac.n_violations += d.violations;
        }
        ac.mean_p50 = s50 / n_days;
        ac.mean_p95 = s95 / n_days;
        ac.mean_p99 = s99 / n_days;
        if (n_days >= 2) {
            std::tie(ac.ci_lo, ac.ci_hi) = ci_mean_t(ac.daily_p99());
        } else {
            ac.ci_lo = ac.ci_hi = ac.mean_p99;
        }
        ac.compliance = ac.n_tx ? 1.0 - double(ac.n_violations) / double(ac.n_tx) : 0.0;
    }
    return out;
}

}  // namespace pqcsim
