#include "pqcsim/config.hpp"

#include <fstream>
#include <sstream>

namespace pqcsim {

using nlohmann::json;

namespace {

template <typename T>
void take(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

void take_lognormal(const json& j, const char* key, LogNormalParams& p) {
    if (!j.contains(key)) return;
    take(j.at(key), "mu_ln", p.mu_ln);
    take(j.at(key), "sigma_ln", p.sigma_ln);
}

void apply_profile(const json& r, AlgorithmProfile& p) {
    take(r, "name", p.name);
    if (r.contains("mode")) p.mode = parse_mode(r.at("mode").get<std::string>());
    take(r, "sign_mean_us", p.sign_mean_us);
    take(r, "sign_cv", p.sign_cv);
    take(r, "verify_mean_us", p.verify_mean_us);
    take(r, "verify_cv", p.verify_cv);
    take(r, "service_mean_us", p.service_mean_us);
    take(r, "pk_bytes", p.pk_bytes);
    take(r, "sig_bytes", p.sig_bytes);
    if (r.contains("delta_p99_ref_ms")) p.delta_p99_ref_ms = r.at("delta_p99_ref_ms").get<double>();
    if (r.contains("sign_p99_ref_ms")) p.sign_p99_ref_ms = r.at("sign_p99_ref_ms").get<double>();
    take(r, "classical", p.classical);
}

json profile_json(const AlgorithmProfile& p) {
    json r{{"name", p.name},
           {"mode", to_string(p.mode)},
           {"sign_mean_us", p.sign_mean_us},
           {"sign_cv", p.sign_cv},
           {"verify_mean_us", p.verify_mean_us},
           {"verify_cv", p.verify_cv},
           {"service_mean_us", p.service_mean_us},
           {"pk_bytes", p.pk_bytes},
           {"sig_bytes", p.sig_bytes}};
    if (p.delta_p99_ref_ms) r["delta_p99_ref_ms"] = *p.delta_p99_ref_ms;
    if (p.sign_p99_ref_ms) r["sign_p99_ref_ms"] = *p.sign_p99_ref_ms;
    if (!p.classical.empty()) r["classical"] = p.classical;
    return r;
}

std::map<std::string, std::string> default_provenance() {
    return {
        {"profiles.service_mean_us", "published: reconstructed from the utilisation table at 13.5 TPS, c=2"},
        {"profiles.sign_cv", "assumption: CV 0.25 (SPHINCS+ uses its published std of 7,618 us)"},
        {"profiles.verify_mean_us", "calibrated: per-hop verification sized so four hops reproduce the published delta p99"},
        {"profiles.sizes", "published: key and signature size table"},
        {"network.tiers", "published: intrabank 1.2/0.25, hub 9.8/0.48, interbank 14.6/0.58, rits 2.8/0.22, swift 96/0.88"},
        {"network.institutions", "published: Big 4 market shares; residual 7.3% split across 9 regionals (assumption)"},
        {"network.cities", "published: SYD 0.8 ms, MEL 9.2 ms, BNE 5.8 ms to the hub"},
        {"network.city_legs_additive", "calibrated: false, the hub draw carries the city legs (see README)"},
        {"network.ar1", "published: alpha 0.30, sigma_ar 0.15; calibrated: sigma_eps 1.5 reproduces the baseline p50/p95/p99"},
        {"traffic.scenarios", "published: weights and daily volumes of the five day types"},
        {"traffic.profile", "calibrated: six-component mixture anchored on 35 TPS (normal) and 60.2 TPS (Christmas) at 10:00"},
        {"traffic.amount", "assumption: lognormal amounts with 1% of NPP payments above AUD 250,000"},
        {"traffic.payid", "published: LN(2.0, 0.47)"},
        {"traffic.tls_reconnect_rate", "published: 0.1% of NPP transactions"},
        {"traffic.tls_overhead_ms", "published for Falcon-512 and SPHINCS+; others use their marginal sign time over ECDSA"},
        {"run.master_seed", "published: seed 42"},
        {"run.n_days", "published: 1,000 days of 10,000 transactions"},
        {"run.sla_ms", "published: NPP 2,000 ms; RITS 30 s and SWIFT 24 h are stated assumptions"},
        {"run.hsm", "published: software 0, PCIe 0.5, network 2.0 ms per hop"},
        {"decision.routes", "published: RITS 277 ms and SWIFT 837 ms fixed overheads; route arrival rates"},
        {"decision.hndl", "published: 2026 base 5.2M/day, 15.6% growth, CRQC 2030, 7-year retention"},
        {"decision.storage", "published: USD 0.004/GB/month, 1-2 KB per record"},
        {"decision.migration", "published: parametric phase cost estimates"},
        {"analysis", "published: block size 50, 500 bootstrap resamples"},
    };
}

}  // namespace

SimConfig default_config() {
    SimConfig c;
    c.profiles = builtin_profiles();
    c.network = default_network_config();
    c.traffic = default_traffic_config(c.profiles);
    c.provenance = default_provenance();
    return c;
}

Simulator SimConfig::make_simulator() const { return Simulator(profiles, network, traffic, run); }

SimConfig config_from_json(const json& j) {
    SimConfig c = default_config();
    if (j.is_null()) return c;
    if (!j.is_object()) throw ConfigError("configuration root must be an object");
    try {
        if (j.contains("profiles")) {
            for (const auto& r : j.at("profiles")) {
                std::string name = r.at("name").get<std::string>();
                auto it = std::find_if(c.profiles.begin(), c.profiles.end(), [&](auto& p) { return p.name == name; });
                if (it != c.profiles.end()) {
                    apply_profile(r, *it);
                } else {
                    AlgorithmProfile p;
                    apply_profile(r, p);
                    c.profiles.push_back(p);
                }
            }
            c.provenance["profiles"] = "file";
        }
        if (j.contains("network")) {
            const auto& n = j.at("network");
            if (n.contains("tiers")) {
                c.network.tiers.clear();
                for (const auto& t : n.at("tiers"))
                    c.network.tiers.push_back({t.at("label").get<std::string>(), t.at("mean_ms").get<double>(),
                                               t.at("cv").get<double>()});
            }
            if (n.contains("n_regionals")) c.network.institutions = default_institutions(n.at("n_regionals").get<int>());
            if (n.contains("institutions")) {
                c.network.institutions.clear();
                for (const auto& i : n.at("institutions"))
                    c.network.institutions.push_back({i.at("name").get<std::string>(), i.at("share").get<double>(),
                                                      i.at("city").get<std::string>()});
            }
            if (n.contains("cities")) {
                c.network.cities.clear();
                for (const auto& x : n.at("cities"))
                    c.network.cities.push_back({x.at("city").get<std::string>(), x.at("one_way_ms").get<double>()});
            }
            if (n.contains("ar1")) {
                const auto& a = n.at("ar1");
                take(a, "alpha", c.network.ar1.alpha);
                take(a, "sigma_ar", c.network.ar1.sigma_ar);
                take(a, "sigma_eps", c.network.ar1.sigma_eps);
            }
            take(n, "jitter_floor_ms", c.network.jitter_floor_ms);
            take(n, "npp_hops", c.network.npp_hops);
            take(n, "city_legs_additive", c.network.city_legs_additive);
            take(n, "mirror_origin_city", c.network.mirror_origin_city);
            c.provenance["network"] = "file";
        }
        c.traffic.tls_overhead_ms = default_tls_overheads(c.profiles);
        if (j.contains("traffic")) {
            const auto& t = j.at("traffic");
            if (t.contains("scenarios")) {
                c.traffic.scenarios.clear();
                for (const auto& s : t.at("scenarios")) {
                    ScenarioSpec sc;
                    take(s, "name", sc.name);
                    take(s, "weight", sc.weight);
                    take(s, "npp_per_day", sc.npp_per_day);
                    take(s, "intrabank_per_day", sc.intrabank_per_day);
                    take(s, "rtgs_per_day", sc.rtgs_per_day);
                    take(s, "swift_per_day", sc.swift_per_day);
                    take(s, "multi_day_family", sc.multi_day_family);
                    c.traffic.scenarios.push_back(sc);
                }
            }
            if (t.contains("profile")) {
                c.traffic.profile.components.clear();
                for (const auto& m : t.at("profile"))
                    c.traffic.profile.components.push_back(
                        {m.at("weight").get<double>(), m.at("mean_hour").get<double>(), m.at("std_hour").get<double>()});
            }
            take_lognormal(t, "amount", c.traffic.amount);
            take_lognormal(t, "payid", c.traffic.payid);
            take(t, "reroute_threshold_aud", c.traffic.reroute_threshold_aud);
            take(t, "tls_reconnect_rate", c.traffic.tls_reconnect_rate);
            take(t, "payid_rate", c.traffic.payid_rate);
            take(t, "proportional_routes", c.traffic.proportional_routes);
            take(t, "base_npp_per_day", c.traffic.base_npp_per_day);
            take(t, "institutional_tps", c.traffic.institutional_tps);
            if (t.contains("tls_overhead_ms"))
                for (const auto& [k, v] : t.at("tls_overhead_ms").items()) c.traffic.tls_overhead_ms[k] = v.get<double>();
            c.provenance["traffic"] = "file";
        }
        if (j.contains("run")) {
            const auto& r = j.at("run");
            take(r, "seed", c.run.master_seed);
            take(r, "n_days", c.run.n_days);
            take(r, "n_sample", c.run.n_sample);
            take(r, "algorithms", c.run.algorithms);
            take(r, "sla_npp_ms", c.run.sla_npp_ms);
            take(r, "sla_rits_ms", c.run.sla_rits_ms);
            take(r, "sla_swift_ms", c.run.sla_swift_ms);
            if (r.contains("hsm")) c.run.hsm_overhead_per_hop_ms = hsm_overhead_ms(parse_hsm_tier(r.at("hsm").get<std::string>()));
            take(r, "hsm_overhead_per_hop_ms", c.run.hsm_overhead_per_hop_ms);
            take(r, "c_servers", c.run.c_servers);
            take(r, "npp_sign_hops", c.run.npp_sign_hops);
            take(r, "workers", c.run.workers);
            take(r, "scenario", c.run.scenario_override);
            take(r, "scale_lambda_with_volume", c.run.scale_lambda_with_volume);
            c.provenance["run"] = "file";
        }
        if (j.contains("decision")) {
            const auto& d = j.at("decision");
            if (d.contains("routes")) {
                c.decision.routes.clear();
                for (const auto& r : d.at("routes"))
                    c.decision.routes.push_back({r.at("name").get<std::string>(), r.at("fixed_overhead_ms").get<double>(),
                                                 r.at("sla_ms").get<double>(), r.at("lambda_tps").get<double>()});
            }
            take(d, "cdi_threshold", c.decision.cdi_threshold);
            if (d.contains("hndl")) {
                const auto& h = d.at("hndl");
                take(h, "base_year", c.decision.hndl.base_year);
                take(h, "base_volume", c.decision.hndl.base_volume);
                take(h, "rate", c.decision.hndl.rate);
                take(h, "crqc_year", c.decision.hndl.crqc_year);
                take(h, "retention_years", c.decision.hndl.retention_years);
                take(h, "days_per_year", c.decision.hndl.days_per_year);
                take(h, "leap_years", c.decision.hndl.leap_years);
                take(h, "partial_fraction", c.decision.hndl.partial_fraction);
            }
            take(d, "storage_usd_per_gb_month", c.decision.storage_usd_per_gb_month);
            take(d, "storage_bytes_per_record", c.decision.storage_bytes_per_record);
            take(d, "becs_batch_sizes", c.decision.becs_batch_sizes);
            take(d, "ecdsa_sec1", c.decision.ecdsa_sec1);
            take(d, "projection_years", c.decision.projection_years);
            if (d.contains("migration")) {
                const auto& m = d.at("migration");
                take(m, "big4_count", c.decision.migration.big4_count);
                take(m, "big4_each_usd_m", c.decision.migration.big4_each_usd_m);
                take(m, "regional_count", c.decision.migration.regional_count);
                take(m, "regional_each_usd_m", c.decision.migration.regional_each_usd_m);
                take(m, "sensitivity", c.decision.migration.sensitivity);
            }
            c.provenance["decision"] = "file";
        }
        if (j.contains("analysis")) {
            const auto& a = j.at("analysis");
            take(a, "block_size", c.analysis.block_size);
            take(a, "bootstrap_resamples", c.analysis.bootstrap_resamples);
            take(a, "daily_maxima", c.analysis.daily_maxima);
            take(a, "sweep_tps_max", c.analysis.sweep_tps_max);
            take(a, "sweep_tps_step", c.analysis.sweep_tps_step);
            take(a, "growth_days", c.analysis.growth_days);
            take(a, "growth_algorithm", c.analysis.growth_algorithm);
            c.provenance["analysis"] = "file";
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed configuration: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (c.decision.ecdsa_sec1)
        for (auto& p : c.profiles)
            if (p.name == "ECDSA-P256") p.pk_bytes = 65;
    validate(c);
    return c;
}

SimConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read configuration file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    std::string text = ss.str();
    if (text.find_first_not_of(" \t\r\n") == std::string::npos) return config_from_json(json(nullptr));
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("configuration file '" + path + "' is not valid JSON: " + e.what());
    }
    return config_from_json(j);
}

void validate(const SimConfig& cfg) {
    std::ostringstream err;
    auto collect = [&](auto&& fn) {
        try {
            fn();
        } catch (const std::invalid_argument& e) {
            err << e.what();
            std::string w = e.what();
            if (!w.empty() && w.back() != '\n') err << '\n';
        }
    };
    collect([&] { validate_profiles(cfg.profiles); });
    collect([&] { validate(cfg.network); });
    collect([&] { validate(cfg.traffic); });
    collect([&] { validate(cfg.run); });
    for (const auto& p : cfg.profiles)
        if (!cfg.traffic.tls_overhead_ms.count(p.name))
            err << "  traffic.tls_overhead_ms: no entry for profile '" << p.name << "'\n";
    for (const auto& [k, v] : cfg.traffic.tls_overhead_ms) {
        bool known = std::any_of(cfg.profiles.begin(), cfg.profiles.end(), [&](auto& p) { return p.name == k; });
        if (!known) err << "  traffic.tls_overhead_ms: key '" << k << "' matches no profile name\n";
        if (v < 0.0) err << "  traffic.tls_overhead_ms." << k << " must be >= 0\n";
    }
    for (const auto& a : cfg.run.algorithms) {
        bool known = std::any_of(cfg.profiles.begin(), cfg.profiles.end(), [&](auto& p) { return p.name == a; });
        if (!known) err << "  run.algorithms: unknown algorithm '" << a << "'\n";
    }
    if (!cfg.run.scenario_override.empty()) {
        bool known = std::any_of(cfg.traffic.scenarios.begin(), cfg.traffic.scenarios.end(),
                                 [&](auto& s) { return s.name == cfg.run.scenario_override; });
        if (!known) err << "  run.scenario: unknown scenario '" << cfg.run.scenario_override << "'\n";
    }
    for (const auto& r : cfg.decision.routes) {
        if (r.fixed_overhead_ms < 0) err << "  decision.routes." << r.name << ": fixed_overhead_ms must be >= 0\n";
        if (!(r.sla_ms > 0)) err << "  decision.routes." << r.name << ": sla_ms must be > 0\n";
        if (r.lambda_tps < 0) err << "  decision.routes." << r.name << ": lambda_tps must be >= 0\n";
    }
    if (cfg.decision.hndl.crqc_year < cfg.decision.hndl.base_year) err << "  decision.hndl: crqc_year before base_year\n";
    if (cfg.analysis.block_size < 1) err << "  analysis.block_size must be >= 1\n";
    if (cfg.analysis.bootstrap_resamples < 1) err << "  analysis.bootstrap_resamples must be >= 1\n";
    if (!(cfg.analysis.sweep_tps_step > 0)) err << "  analysis.sweep_tps_step must be > 0\n";
    if (cfg.analysis.growth_days < 1) err << "  analysis.growth_days must be >= 1\n";
    auto msg = err.str();
    if (!msg.empty()) throw ConfigError("configuration is invalid:\n" + msg);
}

json config_echo(const SimConfig& c) {
    json j;
    for (const auto& p : c.profiles) j["profiles"].push_back(profile_json(p));
    json& n = j["network"];
    for (const auto& t : c.network.tiers) n["tiers"].push_back({{"label", t.label}, {"mean_ms", t.mean_ms}, {"cv", t.cv}});
    for (const auto& i : c.network.institutions)
        n["institutions"].push_back({{"name", i.name}, {"share", i.share}, {"city", i.city}});
    for (const auto& x : c.network.cities) n["cities"].push_back({{"city", x.city}, {"one_way_ms", x.one_way_ms}});
    n["ar1"] = {{"alpha", c.network.ar1.alpha}, {"sigma_ar", c.network.ar1.sigma_ar}, {"sigma_eps", c.network.ar1.sigma_eps}};
    n["jitter_floor_ms"] = c.network.jitter_floor_ms;
    n["npp_hops"] = c.network.npp_hops;
    n["city_legs_additive"] = c.network.city_legs_additive;
    n["mirror_origin_city"] = c.network.mirror_origin_city;

    json& t = j["traffic"];
    for (const auto& s : c.traffic.scenarios)
        t["scenarios"].push_back({{"name", s.name},
                                  {"weight", s.weight},
                                  {"npp_per_day", s.npp_per_day},
                                  {"intrabank_per_day", s.intrabank_per_day},
                                  {"rtgs_per_day", s.rtgs_per_day},
                                  {"swift_per_day", s.swift_per_day},
                                  {"multi_day_family", s.multi_day_family}});
    for (const auto& m : c.traffic.profile.components)
        t["profile"].push_back({{"weight", m.weight}, {"mean_hour", m.mean_hour}, {"std_hour", m.std_hour}});
    t["amount"] = {{"mu_ln", c.traffic.amount.mu_ln}, {"sigma_ln", c.traffic.amount.sigma_ln}};
    t["payid"] = {{"mu_ln", c.traffic.payid.mu_ln}, {"sigma_ln", c.traffic.payid.sigma_ln}};
    t["reroute_threshold_aud"] = c.traffic.reroute_threshold_aud;
    t["tls_reconnect_rate"] = c.traffic.tls_reconnect_rate;
    t["payid_rate"] = c.traffic.payid_rate;
    t["proportional_routes"] = c.traffic.proportional_routes;
    t["base_npp_per_day"] = c.traffic.base_npp_per_day;
    t["institutional_tps"] = c.traffic.institutional_tps;
    t["tls_overhead_ms"] = c.traffic.tls_overhead_ms;

    j["run"] = {{"seed", c.run.master_seed},
                {"n_days", c.run.n_days},
                {"n_sample", c.run.n_sample},
                {"algorithms", c.run.algorithms},
                {"sla_npp_ms", c.run.sla_npp_ms},
                {"sla_rits_ms", c.run.sla_rits_ms},
                {"sla_swift_ms", c.run.sla_swift_ms},
                {"hsm_overhead_per_hop_ms", c.run.hsm_overhead_per_hop_ms},
                {"c_servers", c.run.c_servers},
                {"npp_sign_hops", c.run.npp_sign_hops},
                {"scenario", c.run.scenario_override},
                {"scale_lambda_with_volume", c.run.scale_lambda_with_volume}};

    json& d = j["decision"];
    for (const auto& r : c.decision.routes)
        d["routes"].push_back(
            {{"name", r.name}, {"fixed_overhead_ms", r.fixed_overhead_ms}, {"sla_ms", r.sla_ms}, {"lambda_tps", r.lambda_tps}});
    d["cdi_threshold"] = c.decision.cdi_threshold;
    const auto& h = c.decision.hndl;
    d["hndl"] = {{"base_year", h.base_year},       {"base_volume", h.base_volume},
                 {"rate", h.rate},                 {"crqc_year", h.crqc_year},
                 {"retention_years", h.retention_years}, {"days_per_year", h.days_per_year},
                 {"leap_years", h.leap_years},     {"partial_fraction", h.partial_fraction}};
    d["storage_usd_per_gb_month"] = c.decision.storage_usd_per_gb_month;
    d["storage_bytes_per_record"] = c.decision.storage_bytes_per_record;
    d["becs_batch_sizes"] = c.decision.becs_batch_sizes;
    d["ecdsa_sec1"] = c.decision.ecdsa_sec1;
    d["projection_years"] = c.decision.projection_years;
    const auto& m = c.decision.migration;
    d["migration"] = {{"big4_count", m.big4_count},
                      {"big4_each_usd_m", m.big4_each_usd_m},
                      {"regional_count", m.regional_count},
                      {"regional_each_usd_m", m.regional_each_usd_m},
                      {"sensitivity", m.sensitivity}};

    j["analysis"] = {{"block_size", c.analysis.block_size},
                     {"bootstrap_resamples", c.analysis.bootstrap_resamples},
                     {"daily_maxima", c.analysis.daily_maxima},
                     {"sweep_tps_max", c.analysis.sweep_tps_max},
                     {"sweep_tps_step", c.analysis.sweep_tps_step},
                     {"growth_days", c.analysis.growth_days},
                     {"growth_algorithm", c.analysis.growth_algorithm}};
    j["provenance"] = c.provenance;
    return j;
}

}  // namespace pqcsim
