#include "pqcsim/report.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "pqcsim/decision_models.hpp"
#include "pqcsim/queueing.hpp"
#include "pqcsim/stats.hpp"
#include "pqcsim/svg.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace pqcsim {

namespace {

std::string fixed(double v, int prec) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    std::ostringstream o;
    o << std::fixed << std::setprecision(prec) << v;
    std::string s = o.str();
    if (s.find_first_not_of("-0.") == std::string::npos) s = s.substr(s[0] == '-' ? 1 : 0);
    return s;
}

std::string full(double v) {
    std::ostringstream o;
    o << std::setprecision(17) << v;
    return o.str();
}

std::vector<std::string> split(const std::string& line, char sep = ',') {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(line);
    while (std::getline(in, cur, sep)) out.push_back(cur);
    if (!line.empty() && line.back() == sep) out.push_back("");
    return out;
}

using Row = std::map<std::string, std::string>;

std::vector<Row> read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::string line;
    std::getline(in, line);
    auto header = split(line);
    std::vector<Row> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto cells = split(line);
        Row r;
        for (std::size_t i = 0; i < header.size() && i < cells.size(); ++i) r[header[i]] = cells[i];
        rows.push_back(r);
    }
    return rows;
}

double to_d(const std::string& s) {
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
    return std::stod(s);
}

const AlgorithmProfile& baseline_profile(const std::vector<AlgorithmProfile>& profiles) {
    for (const auto& p : profiles)
        if (p.mode == Mode::classical) return p;
    throw std::invalid_argument("no classical baseline profile configured");
}

bool saturates(const SimConfig& cfg, const AlgorithmProfile& p) {
    return is_saturating(p, cfg.traffic.institutional_tps, cfg.run.c_servers);
}

std::string json_name(const std::string& name) { return name + ".json"; }

}  // namespace

OutputFormat parse_format(const std::string& s) {
    if (s == "csv") return OutputFormat::csv;
    if (s == "json") return OutputFormat::json;
    if (s == "both") return OutputFormat::both;
    throw std::invalid_argument("unknown output format '" + s + "'");
}

Cell ms(double v) { return {fixed(v, 2), true}; }
Cell frac(double v) { return {fixed(v, 4), true}; }
Cell count(long long v) { return {std::to_string(v), true}; }
Cell num(double v, int precision) {
    if (!std::isfinite(v)) return {fixed(v, 0), true};
    std::ostringstream o;
    o << std::setprecision(precision) << v;
    return {o.str(), true};
}
Cell text(const std::string& s) { return {s, false}; }
Cell flag(bool b) { return {b ? "true" : "false", false}; }

json table_json(const Table& t) {
    json arr = json::array();
    for (const auto& r : t.rows) {
        json o = json::object();
        for (std::size_t i = 0; i < t.columns.size(); ++i) {
            const Cell& c = r[i];
            if (c.numeric && c.text != "inf" && c.text != "-inf" && c.text != "nan")
                o[t.columns[i]] = json::parse(c.text);
            else
                o[t.columns[i]] = c.text;
        }
        arr.push_back(o);
    }
    return arr;
}

void write_table(const std::string& dir, const Table& t, OutputFormat fmt) {
    std::vector<std::string> names{t.name};
    names.insert(names.end(), t.aliases.begin(), t.aliases.end());
    for (const auto& name : names) {
        if (fmt != OutputFormat::json) {
            std::string path = (fs::path(dir) / (name + ".csv")).string();
            std::ofstream out(path);
            if (!out) throw std::runtime_error("cannot write " + path);
            for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
            out << '\n';
            for (const auto& r : t.rows) {
                for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << r[i].text;
                out << '\n';
            }
            if (!out) throw std::runtime_error("write failed: " + path);
        }
        if (fmt != OutputFormat::csv) {
            std::string path = (fs::path(dir) / json_name(name)).string();
            std::ofstream out(path);
            if (!out) throw std::runtime_error("cannot write " + path);
            out << table_json(t).dump(2) << '\n';
        }
    }
}

void update_summary(const std::string& dir, const std::string& section, const json& value) {
    fs::path path = fs::path(dir) / "summary.json";
    json s = json::object();
    if (fs::exists(path)) {
        std::ifstream in(path);
        try {
            in >> s;
        } catch (const json::exception&) {
            s = json::object();
        }
    }
    s[section] = value;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << s.dump(2) << '\n';
}

CorpusTables read_corpus_csv(const std::string& path) {
    CorpusTables t;
    for (const auto& r : read_csv(path)) {
        const std::string& a = r.at("algo");
        auto it = std::find(t.algos.begin(), t.algos.end(), a);
        std::size_t k = it - t.algos.begin();
        if (it == t.algos.end()) {
            t.algos.push_back(a);
            t.days.emplace_back();
        }
        DayResult d;
        d.day_index = std::stoi(r.at("day_index"));
        d.scenario = r.at("scenario");
        d.p50_ms = to_d(r.at("p50_ms"));
        d.p95_ms = to_d(r.at("p95_ms"));
        d.p99_ms = to_d(r.at("p99_ms"));
        d.sla_compliance = to_d(r.at("compliance"));
        d.n = std::stoul(r.at("n"));
        t.days[k].push_back(d);
    }
    return t;
}

RepDaySamples read_rep_day_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::string line;
    std::getline(in, line);
    auto header = split(line);
    RepDaySamples s;
    std::vector<int> lat_col, base_col;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i].rfind("lat:", 0) == 0) {
            s.algos.push_back(header[i].substr(4));
            lat_col.push_back(int(i));
        }
    }
    for (const auto& a : s.algos)
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == "base:" + a) base_col.push_back(int(i));
    if (base_col.size() != s.algos.size()) throw std::runtime_error(path + ": missing base:<algo> columns");
    s.latency_ms.resize(s.algos.size());
    s.base_ms.resize(s.algos.size());
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto c = split(line);
        s.origin_city.push_back(c[1]);
        for (std::size_t k = 0; k < s.algos.size(); ++k) {
            s.latency_ms[k].push_back(std::stod(c[lat_col[k]]));
            s.base_ms[k].push_back(std::stod(c[base_col[k]]));
        }
    }
    return s;
}

json command_run(const SimConfig& cfg, const std::string& dir, OutputFormat fmt, CorpusResult* keep) {
    Simulator sim = cfg.make_simulator();
    CorpusResult corpus = sim.run_corpus();

    Table c{"corpus", {"algo", "day_index", "scenario", "p50_ms", "p95_ms", "p99_ms", "compliance", "n"}, {}, {}};
    for (const auto& a : corpus.algos)
        for (const auto& d : a.days)
            c.rows.push_back({text(a.algo), count(d.day_index), text(d.scenario), ms(d.p50_ms), ms(d.p95_ms),
                              ms(d.p99_ms), frac(d.sla_compliance), count(d.n)});
    write_table(dir, c, fmt);

    const AlgorithmCorpus* base = nullptr;
    for (const auto& a : corpus.algos)
        if (find_profile(cfg.profiles, a.algo).mode == Mode::classical) base = &a;

    Table t2{"table2_percentiles",
             {"algo", "mode", "p50_ms", "p95_ms", "p99_ms", "p99_ci_lo_ms", "p99_ci_hi_ms", "delta_p99_ms",
              "sla_compliance", "violations", "transactions"},
             {},
             {}};
    json summary;
    summary["seed"] = cfg.run.master_seed;
    summary["n_days"] = cfg.run.n_days;
    summary["n_sample"] = cfg.run.n_sample;
    summary["hsm_overhead_per_hop_ms"] = cfg.run.hsm_overhead_per_hop_ms;
    summary["c_servers"] = cfg.run.c_servers;
    summary["representative_day"] = corpus.rep.day_index;
    for (const auto& a : corpus.algos) {
        const auto& p = find_profile(cfg.profiles, a.algo);
        double delta = base ? a.mean_p99 - base->mean_p99 : NAN;
        t2.rows.push_back({text(a.algo), text(to_string(p.mode)), ms(a.mean_p50), ms(a.mean_p95), ms(a.mean_p99),
                           ms(a.ci_lo), ms(a.ci_hi), base ? ms(delta) : text(""), frac(a.compliance),
                           count(a.n_violations), count(a.n_tx)});
        json j{{"mean_p50_ms", std::stod(ms(a.mean_p50).text)},
               {"mean_p95_ms", std::stod(ms(a.mean_p95).text)},
               {"mean_p99_ms", std::stod(ms(a.mean_p99).text)},
               {"p99_ci_ms", {std::stod(ms(a.ci_lo).text), std::stod(ms(a.ci_hi).text)}},
               {"sla_compliance", std::stod(frac(a.compliance).text)},
               {"saturated", saturates(cfg, p)}};
        if (base) j["delta_p99_ms"] = std::stod(ms(delta).text);
        summary["algorithms"][a.algo] = j;
    }
    write_table(dir, t2, fmt);

    // Representative day, full precision so `analyze` sees exactly what the engine produced.
    {
        std::string path = (fs::path(dir) / "rep_day_samples.csv").string();
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot write " + path);
        out << "tx_index,origin_city";
        for (const auto& a : corpus.rep.algos) out << ",lat:" << a;
        for (const auto& a : corpus.rep.algos) out << ",base:" << a;
        out << '\n';
        std::size_t n = corpus.rep.latency_ms.empty() ? 0 : corpus.rep.latency_ms[0].size();
        for (std::size_t i = 0; i < n; ++i) {
            out << i << ',' << corpus.rep.origin_city[i];
            for (const auto& v : corpus.rep.latency_ms) out << ',' << full(v[i]);
            for (const auto& v : corpus.rep.no_payid_ms) out << ',' << full(v[i]);
            out << '\n';
        }
    }
    update_summary(dir, "run", summary);
    if (keep) *keep = std::move(corpus);
    return summary;
}

json command_analyze(const SimConfig& cfg, const std::string& in_dir, const std::string& dir, OutputFormat fmt) {
    auto corpus = read_corpus_csv((fs::path(in_dir) / "corpus.csv").string());
    auto rep = read_rep_day_csv((fs::path(in_dir) / "rep_day_samples.csv").string());
    json summary;

    auto daily_p99 = [&](std::size_t k) {
        std::vector<double> v;
        for (const auto& d : corpus.days[k]) v.push_back(d.p99_ms);
        return v;
    };
    std::optional<std::size_t> base;
    for (std::size_t k = 0; k < corpus.algos.size(); ++k)
        if (find_profile(cfg.profiles, corpus.algos[k]).mode == Mode::classical) base = k;

    // Effect sizes against the classical baseline.
    Table eff{"effects",
              {"algo", "delta_p99_ms", "sla_budget_used", "cohens_d", "magnitude", "mw_u", "mw_p"},
              {},
              {"table3_effects"}};
    if (base) {
        auto b = daily_p99(*base);
        for (std::size_t k = 0; k < corpus.algos.size(); ++k) {
            if (k == *base) continue;
            auto a = daily_p99(k);
            auto e = effect_size(a, b);
            double delta = mean(a) - mean(b);
            eff.rows.push_back({text(corpus.algos[k]), ms(delta), frac(delta / cfg.run.sla_npp_ms),
                                num(e.cohens_d, 4), text(e.magnitude), num(e.mw_u, 10), num(e.mw_p, 4)});
            summary["effects"][corpus.algos[k]] = {{"delta_p99_ms", std::stod(ms(delta).text)},
                                                   {"cohens_d", std::isfinite(e.cohens_d) ? json(e.cohens_d) : json("inf")},
                                                   {"magnitude", e.magnitude},
                                                   {"mw_p", e.mw_p}};
        }
    }
    write_table(dir, eff, fmt);

    // One-way ANOVA on daily p99.
    Table an{"anova", {"factor", "subset", "groups", "eta2", "f_stat"}, {}, {}};
    auto add_anova = [&](const std::string& factor, const std::string& subset,
                         const std::vector<std::vector<double>>& groups) {
        std::vector<std::vector<double>> g;
        for (const auto& x : groups)
            if (x.size() >= 2) g.push_back(x);
        if (g.size() < 2) return;
        auto [eta2, f] = anova_eta2(g);
        an.rows.push_back({text(factor), text(subset), count(g.size()), frac(eta2), num(f, 6)});
        summary["anova"][factor + ":" + subset] = eta2;
    };
    {
        std::vector<std::vector<double>> all, stable;
        std::map<std::string, std::vector<double>> by_scen;
        for (std::size_t k = 0; k < corpus.algos.size(); ++k) {
            all.push_back(daily_p99(k));
            bool sat = saturates(cfg, find_profile(cfg.profiles, corpus.algos[k]));
            if (!sat) {
                stable.push_back(daily_p99(k));
                for (const auto& d : corpus.days[k]) by_scen[d.scenario].push_back(d.p99_ms);
            }
        }
        add_anova("sig_algo", "all", all);
        add_anova("sig_algo", "non_saturating", stable);
        std::vector<std::vector<double>> sg;
        for (auto& [k, v] : by_scen) sg.push_back(v);
        add_anova("scenario", "non_saturating", sg);
        if (base) {
            std::map<std::string, std::vector<double>> by_city;
            for (std::size_t i = 0; i < rep.origin_city.size(); ++i)
                by_city[rep.origin_city[i]].push_back(rep.latency_ms[*base][i]);
            std::vector<std::vector<double>> cg;
            for (auto& [k, v] : by_city) cg.push_back(v);
            add_anova("origin_city", "baseline_rep_day", cg);
        }
    }
    write_table(dir, an, fmt);

    // Tail, goodness of fit and model ranking on the representative day.
    Table gev{"gev",
              {"algo", "n_blocks", "xi", "loc_ms", "scale_ms", "tail_class", "q99_ms", "q999_ms", "q999_ci_lo_ms",
               "q999_ci_hi_ms", "q9999_ms", "q9999_ci_lo_ms", "q9999_ci_hi_ms", "bootstrap_failures", "indicative"},
              {},
              {"table9_gev"}};
    Table gof{"gof", {"algo", "n", "ks_stat", "ks_p", "reject_ks", "ad_stat", "ad_critical_5pct", "reject_ad"}, {}, {"table10_gof"}};
    Table aic{"aic", {"algo", "candidate", "rank", "loglik", "aic", "bic", "delta_aic", "available"}, {}, {}};
    Table deg{"degraded",
              {"algo", "rho_normal", "rho_degraded", "p99_normal_ms", "p99_degraded_ms", "delta_ms", "meaningful"},
              {},
              {"table11_degraded"}};
    for (std::size_t k = 0; k < rep.algos.size(); ++k) {
        const auto& name = rep.algos[k];
        const auto& lat = rep.latency_ms[k];
        const auto& prof = find_profile(cfg.profiles, name);
        try {
            std::vector<double> input = lat;
            if (cfg.analysis.daily_maxima) {
                std::size_t idx = std::find(corpus.algos.begin(), corpus.algos.end(), name) - corpus.algos.begin();
                input.clear();
                if (idx < corpus.algos.size())
                    for (const auto& d : corpus.days[idx]) input.push_back(d.p99_ms);
            }
            auto g = gev_report(input, cfg.analysis.block_size, cfg.analysis.bootstrap_resamples,
                                hash_seed({cfg.run.master_seed, static_cast<std::uint64_t>(StreamPurpose::bootstrap), k}),
                                cfg.analysis.daily_maxima);
            gev.rows.push_back({text(name), count(g.fit.n_blocks), num(g.fit.xi, 4), ms(g.fit.loc), ms(g.fit.scale),
                                text(to_string(g.tail_class)), ms(g.q99), ms(g.q999), ms(g.ci999.first),
                                ms(g.ci999.second), ms(g.q9999), ms(g.ci9999.first), ms(g.ci9999.second),
                                count(g.bootstrap_failures), flag(g.indicative)});
            summary["gev"][name] = {{"xi", g.fit.xi}, {"tail_class", to_string(g.tail_class)},
                                    {"q999_ms", std::stod(ms(g.q999).text)}};
        } catch (const std::exception& e) {
            gev.rows.push_back({text(name), count(0), text("fit_failed"), text(""), text(""), text(""), text(""),
                                text(""), text(""), text(""), text(""), text(""), text(""), count(0), flag(true)});
            summary["gev"][name] = {{"error", e.what()}};
        }
        auto gr = gof_report(lat);
        gof.rows.push_back({text(name), count(lat.size()), num(gr.ks_stat, 4), num(gr.ks_p, 4), flag(gr.reject_ks),
                            num(gr.ad_stat, 4), num(gr.ad_critical_5pct, 4), flag(gr.reject_ad)});
        summary["gof"][name] = {{"reject_ks", gr.reject_ks}, {"reject_ad", gr.reject_ad}};
        auto mc = aic_bic_compare(lat);
        int rank = 1;
        for (const auto& c : mc.candidates) {
            aic.rows.push_back({text(name), text(c.name), count(rank++), num(c.loglik, 10), num(c.aic, 10),
                                num(c.bic, 10), num(c.delta_aic, 6), flag(c.available)});
        }
        summary["aic_best"][name] = mc.candidates.front().name;
        auto d = degraded_compare(prof, rep.base_ms[k], cfg.traffic.institutional_tps, cfg.run.c_servers,
                                  std::max(1, cfg.run.c_servers - 1));
        deg.rows.push_back({text(name), frac(d.rho_normal), frac(d.rho_degraded),
                            d.meaningful ? ms(d.p99_normal) : text("N/A"), d.meaningful ? ms(d.p99_degraded) : text("N/A"),
                            d.meaningful ? ms(d.delta) : text("N/A"), flag(d.meaningful)});
    }
    write_table(dir, gev, fmt);
    write_table(dir, gof, fmt);
    write_table(dir, aic, fmt);
    write_table(dir, deg, fmt);
    update_summary(dir, "analysis", summary);
    return summary;
}

json command_report(const SimConfig& cfg, const std::string& dir, OutputFormat fmt, const CorpusResult* measured) {
    json summary;
    const auto& base = baseline_profile(cfg.profiles);
    const double base_p99_ref = 43.39;

    Table cdi_t{"cdi", {"algo", "source", "delta_p99_ms", "p99_e2e_ms", "cdi", "passes_threshold"}, {}, {"table14_cdi"}};
    for (const auto& p : cfg.profiles) {
        if (p.mode == Mode::classical || !p.delta_p99_ref_ms) continue;
        auto r = cdi(*p.delta_p99_ref_ms, base_p99_ref + *p.delta_p99_ref_ms, p.name, cfg.decision.cdi_threshold);
        cdi_t.rows.push_back({text(p.name), text("reference"), ms(r.delta_p99_ms), ms(r.p99_e2e_ms), frac(r.cdi),
                              flag(r.passes_threshold)});
        summary["cdi"][p.name] = std::stod(frac(r.cdi).text);
    }
    std::map<std::string, double> measured_delta;
    if (measured) {
        const AlgorithmCorpus* b = nullptr;
        for (const auto& a : measured->algos)
            if (a.algo == base.name) b = &a;
        if (b)
            for (const auto& a : measured->algos) {
                if (a.algo == base.name) continue;
                double delta = std::max(0.0, a.mean_p99 - b->mean_p99);
                measured_delta[a.algo] = delta;
                auto r = cdi(delta, a.mean_p99, a.algo, cfg.decision.cdi_threshold);
                cdi_t.rows.push_back({text(a.algo), text("measured"), ms(r.delta_p99_ms), ms(r.p99_e2e_ms),
                                      frac(r.cdi), flag(r.passes_threshold)});
                summary["cdi_measured"][a.algo] = std::stod(frac(r.cdi).text);
            }
    }
    write_table(dir, cdi_t, fmt);

    Table fm{"formats", {"algo", "limit", "limit_bytes", "pk_bytes", "sig_bytes", "combined_bytes", "verdict"}, {}, {}};
    Table t5{"table5_formats", {"algo", "pk_bytes", "sig_bytes", "combined_bytes"}, {}, {}};
    for (const auto& l : cfg.decision.limits) t5.columns.push_back(l.name);
    for (const auto& p : cfg.profiles) {
        auto vs = format_compliance(p, linked_classical(cfg.profiles, p), cfg.decision.limits);
        std::vector<Cell> wide{text(p.name), count(p.pk_bytes), count(vs.front().sig_bytes),
                               count(vs.front().combined_bytes)};
        for (const auto& v : vs) {
            fm.rows.push_back({text(p.name), text(v.limit_name), count(v.limit_bytes), count(p.pk_bytes),
                               count(v.sig_bytes), count(v.combined_bytes), text(to_string(v.verdict))});
            wide.push_back(text(to_string(v.verdict)));
            summary["formats"][p.name][v.limit_name] = to_string(v.verdict);
        }
        t5.rows.push_back(wide);
    }
    write_table(dir, fm, fmt);
    write_table(dir, t5, fmt);

    Table rt{"routes",
             {"route", "algo", "sign_p99_ms", "fixed_overhead_ms", "queue_wait_ms", "route_p99_ms", "delta_ms",
              "cdi_route", "sla_ms", "sla_pass"},
             {},
             {}};
    for (const auto& route : cfg.decision.routes) {
        if (route.name == "NPP") continue;
        for (const auto& r : route_table(route, cfg.profiles, cfg.run.c_servers, measured_delta)) {
            rt.rows.push_back({text(r.route), text(r.algo), ms(r.sign_p99_ms), ms(route.fixed_overhead_ms),
                               num(r.queue_wait_ms, 4), ms(r.route_p99_ms), ms(r.delta_vs_baseline),
                               frac(r.cdi_route), num(route.sla_ms, 10), flag(r.sla_pass)});
            summary["routes"][r.route][r.algo] = {{"route_p99_ms", std::stod(ms(r.route_p99_ms).text)},
                                                  {"cdi_route", r.cdi_route}};
        }
    }
    write_table(dir, rt, fmt);

    Table becs{"becs", {"algo", "batch_size", "sign_ms", "per_tx_ms"}, {}, {}};
    for (const auto& p : cfg.profiles) {
        if (p.mode == Mode::classical) continue;
        for (auto b : cfg.decision.becs_batch_sizes)
            becs.rows.push_back({text(p.name), count(b), num(p.sign_mean_us / 1000.0, 6),
                                 num(becs_amortised(p.sign_mean_us / 1000.0, b), 6)});
    }
    write_table(dir, becs, fmt);

    const auto& h = cfg.decision.hndl;
    Table vol{"growth", {"year", "npp_tx_per_day"}, {}, {}};
    for (auto [y, v] : volume_projection(h.base_volume, h.rate, cfg.decision.projection_years, h.base_year))
        vol.rows.push_back({count(y), count(v)});
    write_table(dir, vol, fmt);

    Table hn{"hndl",
             {"year", "tx_per_day", "records", "retained_until", "exposed", "expected_exposed_records", "cumulative",
              "cumulative_upper_bound"},
             {},
             {"table15_hndl"}};
    auto rows = hndl_exposure(h);
    for (const auto& r : rows)
        hn.rows.push_back({count(r.year), count(r.tx_per_day), count(r.records), count(r.retained_until),
                           text(r.exposed), count(std::llround(r.expected_exposed_records)), count(r.cumulative),
                           count(r.cumulative_upper_bound)});
    write_table(dir, hn, fmt);
    long long cumulative = rows.empty() ? 0 : rows.back().cumulative;
    summary["hndl_cumulative"] = cumulative;

    Table costs{"costs",
                {"item", "year", "label", "usd_m", "low_usd_m", "high_usd_m", "recurring", "becs_fraction", "basis"},
                {},
                {"table8_costs"}};
    for (const auto& m : migration_cost_table(cfg.decision.migration))
        costs.rows.push_back({text("phase_" + std::to_string(m.phase)), count(m.year), text(m.label), num(m.cost_usd_m, 6),
                              num(m.low_usd_m, 6), num(m.high_usd_m, 6), flag(m.recurring), frac(m.becs_fraction),
                              text("parametric estimate")});
    for (double bytes : cfg.decision.storage_bytes_per_record) {
        double usd = storage_cost(double(cumulative), bytes, cfg.decision.storage_usd_per_gb_month);
        costs.rows.push_back({text("hndl_storage_" + fixed(bytes, 0) + "B"), count(h.base_year), text("archive storage per year"),
                              num(usd / 1e6, 6), num(usd / 1e6, 6), num(usd / 1e6, 6), flag(true), text(""),
                              text("parametric estimate")});
        summary["storage_usd_per_year"][fixed(bytes, 0)] = std::round(usd * 100) / 100;
    }
    write_table(dir, costs, fmt);
    update_summary(dir, "report", summary);
    return summary;
}

json command_sweep(const SimConfig& cfg, const std::string& dir, OutputFormat fmt) {
    json summary;
    const int c = cfg.run.c_servers;
    const double lam = cfg.traffic.institutional_tps;
    const auto& base = baseline_profile(cfg.profiles);

    Table t4{"table4_queue", {"algo", "lambda_tps", "c", "rho", "erlang_c", "wait_ms", "p95_wait_ms", "saturated"}, {}, {}};
    for (const auto& p : cfg.profiles) {
        QueueParams q{lam, p.service_rate(), c};
        auto a = mmc_assess(q);
        t4.rows.push_back({text(p.name), num(lam, 6), count(c), frac(a.rho), frac(a.erlang_c), ms(a.mean_wait_ms()),
                           ms(wait_quantile_us(q, 0.95) / 1000.0), flag(a.saturated)});
        summary["saturated"][p.name] = a.saturated;
    }
    write_table(dir, t4, fmt);

    auto queue_row = [](const std::string& algo, double x, const QueueAssessment& a) {
        return std::vector<Cell>{text(algo), num(x, 6), frac(a.rho), frac(a.erlang_c), ms(a.mean_wait_ms()),
                                 flag(a.saturated)};
    };
    const std::vector<std::string> qcols{"algo", "tps_or_hour", "rho", "erlang_c", "wait_ms", "saturated"};

    Table sw{"sweep_tps", qcols, {}, {}};
    std::vector<double> lams;
    for (int i = 1; i * cfg.analysis.sweep_tps_step <= cfg.analysis.sweep_tps_max + 1e-9; ++i)
        lams.push_back(i * cfg.analysis.sweep_tps_step);
    for (const auto& p : cfg.profiles)
        for (const auto& r : tps_sweep(p, c, lams)) sw.rows.push_back(queue_row(r.algo, r.x, r.q));
    write_table(dir, sw, fmt);

    Table hs{"hourly_summary", {"scenario", "algo", "saturated_hours", "peak_hour", "peak_lambda_tps", "peak_rho"}, {}, {}};
    for (const auto& s : cfg.traffic.scenarios) {
        Table ht{"hourly_" + s.name, qcols, {}, {}};
        for (const auto& p : cfg.profiles) {
            auto hp = hourly_profile(p, s, c, cfg.traffic);
            for (int h = 0; h < 24; ++h) ht.rows.push_back(queue_row(p.name, h, hp.hours[h]));
            hs.rows.push_back({text(s.name), text(p.name), count(hp.saturated_hours), count(hp.peak_hour),
                               num(hp.lambda[hp.peak_hour], 6), frac(hp.peak_rho)});
            summary["hourly"][s.name][p.name] = {{"saturated_hours", hp.saturated_hours},
                                                 {"peak_rho", std::stod(frac(hp.peak_rho).text)}};
        }
        write_table(dir, ht, fmt);
    }
    write_table(dir, hs, fmt);

    Table sv{"servers", {"algo", "lambda_tps", "criterion", "min_servers"}, {}, {}};
    Table ladder{"server_ladder", {"algo", "lambda_tps", "c", "rho", "wait_ms", "p95_wait_ms", "saturated"}, {}, {}};
    Table dos{"dos",
              {"algo", "lambda_tps", "c", "duration_s", "lambda_sat_tps", "surplus_ops_s", "queued", "last_wait_s",
               "mean_wait_s", "utilisation_ratio", "psa_cap_tps", "psa_margin", "psa_rho"},
              {},
              {}};
    const ScenarioSpec* christmas = nullptr;
    for (const auto& s : cfg.traffic.scenarios)
        if (s.name == "christmas") christmas = &s;
    for (const auto& p : cfg.profiles) {
        std::vector<double> rates{lam};
        if (christmas) rates.push_back(hourly_profile(p, *christmas, c, cfg.traffic).lambda[10]);
        for (double l : rates) {
            sv.rows.push_back({text(p.name), num(l, 6), text("stability"),
                               count(min_servers(l, p.service_rate(), ServerCriterion::stability()))});
            sv.rows.push_back({text(p.name), num(l, 6), text("wait_below_10ms"),
                               count(min_servers(l, p.service_rate(), ServerCriterion::wait_below(10.0)))});
        }
        if (!saturates(cfg, p)) continue;
        int c_stable = min_servers(lam, p.service_rate(), ServerCriterion::stability());
        for (int k = 1; k <= c_stable + 6; ++k) {
            QueueParams q{lam, p.service_rate(), k};
            auto a = mmc_assess(q);
            ladder.rows.push_back({text(p.name), num(lam, 6), count(k), frac(a.rho), ms(a.mean_wait_ms()),
                                   ms(wait_quantile_us(q, 0.95) / 1000.0), flag(a.saturated)});
        }
        const double psa_cap = 1.0;
        for (double dur : {60.0, 300.0}) {
            auto m = dos_metrics(lam, p.service_rate(), c, dur, {lam, base.service_rate(), c});
            double sat = saturation_boundary(p.service_rate(), c);
            dos.rows.push_back({text(p.name), num(lam, 6), count(c), num(dur, 6), ms(sat), ms(m.surplus_ops_s),
                                num(m.queued_count, 6), ms(m.last_wait_s), ms(m.mean_wait_s), num(m.utilisation_ratio, 6),
                                num(psa_cap, 3), ms(sat / psa_cap), frac(mmc_assess({psa_cap, p.service_rate(), c}).rho)});
            summary["dos"][p.name][fixed(dur, 0) + "s"] = {{"queued", m.queued_count}, {"mean_wait_s", m.mean_wait_s}};
        }
    }
    write_table(dir, sv, fmt);
    write_table(dir, ladder, fmt);
    write_table(dir, dos, fmt);
    update_summary(dir, "sweep", summary);
    return summary;
}

json command_hsm_growth(const SimConfig& cfg, const CorpusResult& corpus, const std::string& dir, OutputFormat fmt) {
    json summary;
    const double hops = cfg.run.npp_sign_hops;
    const double current = cfg.run.hsm_overhead_per_hop_ms;
    Table t6{"table6_hsm",
             {"algo", "software_p99_ms", "pcie_p99_ms", "network_p99_ms", "network_headroom_ms", "network_compliance"},
             {},
             {}};
    for (const auto& a : corpus.algos) {
        // A per-hop constant shifts every latency, so each day's percentiles shift by exactly hops * overhead.
        auto at = [&](HsmTier t) { return a.mean_p99 + hops * (hsm_overhead_ms(t) - current); };
        double shift = hops * (hsm_overhead_ms(HsmTier::network) - current);
        double lo = 1e300, hi = -1e300;
        for (const auto& d : a.days) {
            lo = std::min(lo, d.min_ms);
            hi = std::max(hi, d.max_ms);
        }
        Cell comp = text("mixed");
        if (hi + shift <= cfg.run.sla_npp_ms) comp = frac(1.0);
        else if (lo + shift > cfg.run.sla_npp_ms) comp = frac(0.0);
        t6.rows.push_back({text(a.algo), ms(at(HsmTier::software)), ms(at(HsmTier::pcie)), ms(at(HsmTier::network)),
                           ms(cfg.run.sla_npp_ms - at(HsmTier::network)), comp});
    }
    write_table(dir, t6, fmt);

    // Volume growth: rerun the chosen algorithm with every scenario's NPP volume scaled.
    const auto& h = cfg.decision.hndl;
    Table t7{"table7_growth", {"year", "npp_tx_per_day", "algo", "p50_ms", "p95_ms", "p99_ms", "sla_headroom_ms"}, {}, {}};
    bool have_algo = std::any_of(cfg.profiles.begin(), cfg.profiles.end(),
                                 [&](auto& p) { return p.name == cfg.analysis.growth_algorithm; });
    if (have_algo) {
        for (auto [year, vol] : volume_projection(h.base_volume, h.rate, cfg.decision.projection_years, h.base_year)) {
            SimConfig g = cfg;
            double f = double(vol) / cfg.traffic.base_npp_per_day;
            for (auto& s : g.traffic.scenarios) s.npp_per_day *= f;
            g.run.n_days = cfg.analysis.growth_days;
            g.run.algorithms = {cfg.analysis.growth_algorithm};
            auto r = g.make_simulator().run_corpus();
            const auto& a = r.algos.front();
            t7.rows.push_back({count(year), count(vol), text(a.algo), ms(a.mean_p50), ms(a.mean_p95), ms(a.mean_p99),
                               ms(sla_headroom(a.mean_p99, cfg.run.sla_npp_ms))});
            summary["growth_p99_ms"][std::to_string(year)] = std::stod(ms(a.mean_p99).text);
        }
    }
    write_table(dir, t7, fmt);
    update_summary(dir, "hsm_growth", summary);
    return summary;
}

int emit_plots(const SimConfig& cfg, const std::string& dir) {
    int written = 0;
    auto path = [&](const std::string& n) { return (fs::path(dir) / n).string(); };
    auto exists = [&](const std::string& n) { return fs::exists(path(n)); };

    if (exists("table2_percentiles.csv")) {
        std::vector<std::string> labels;
        std::vector<double> comp, p99;
        for (const auto& r : read_csv(path("table2_percentiles.csv"))) {
            labels.push_back(r.at("algo"));
            comp.push_back(100.0 * to_d(r.at("sla_compliance")));
        }
        svg::Axes a{"NPP SLA compliance over the corpus", "", "compliance (%)", false, 100.0, "100%"};
        svg::bar_chart(path("compliance.svg"), a, labels, comp);
        ++written;
    }
    if (exists("corpus.csv")) {
        auto corpus = read_corpus_csv(path("corpus.csv"));
        std::vector<std::string> labels;
        std::vector<std::vector<double>> samples;
        for (std::size_t k = 0; k < corpus.algos.size(); ++k) {
            if (saturates(cfg, find_profile(cfg.profiles, corpus.algos[k]))) continue;
            labels.push_back(corpus.algos[k]);
            std::vector<double> v;
            for (const auto& d : corpus.days[k]) v.push_back(d.p99_ms);
            samples.push_back(v);
        }
        if (!samples.empty()) {
            svg::box_chart(path("p99_distribution.svg"), {"Daily NPP p99 by algorithm", "", "p99 (ms)"}, labels, samples);
            ++written;
        }
    }
    if (exists("table4_queue.csv")) {
        std::vector<std::string> labels;
        std::vector<double> rho;
        for (const auto& r : read_csv(path("table4_queue.csv"))) {
            labels.push_back(r.at("algo"));
            rho.push_back(std::max(1e-5, to_d(r.at("rho"))));
        }
        svg::bar_chart(path("queue_utilisation.svg"), {"HSM queue utilisation at 13.5 TPS", "", "rho", true, 1.0, "rho = 1"},
                       labels, rho);
        ++written;
    }
    if (exists("sweep_tps.csv")) {
        std::map<std::string, svg::Series> by;
        std::vector<std::string> order;
        for (const auto& r : read_csv(path("sweep_tps.csv"))) {
            const auto& a = r.at("algo");
            if (!by.count(a)) {
                order.push_back(a);
                by[a].name = a;
            }
            by[a].x.push_back(to_d(r.at("tps_or_hour")));
            by[a].y.push_back(std::max(1e-5, to_d(r.at("rho"))));
        }
        std::vector<svg::Series> s;
        for (const auto& a : order) s.push_back(by[a]);
        svg::line_chart(path("tps_sweep.svg"), {"Utilisation versus arrival rate", "TPS per institution", "rho", true, 1.0, "rho = 1"}, s);
        ++written;
    }
    if (exists("hourly_christmas.csv")) {
        std::map<std::string, svg::Series> by;
        std::vector<std::string> order;
        for (const auto& r : read_csv(path("hourly_christmas.csv"))) {
            const auto& a = r.at("algo");
            if (!by.count(a)) {
                order.push_back(a);
                by[a].name = a;
            }
            by[a].x.push_back(to_d(r.at("tps_or_hour")));
            by[a].y.push_back(std::max(1e-5, to_d(r.at("rho"))));
        }
        std::vector<svg::Series> s;
        for (const auto& a : order) s.push_back(by[a]);
        svg::line_chart(path("hourly_rho.svg"), {"Hourly utilisation, Christmas peak", "hour", "rho", true, 1.0, "rho = 1"}, s);
        ++written;
    }
    if (exists("gev.csv")) {
        std::vector<svg::Series> s;
        for (const auto& r : read_csv(path("gev.csv"))) {
            if (r.at("xi") == "fit_failed") continue;
            if (saturates(cfg, find_profile(cfg.profiles, r.at("algo")))) continue;
            s.push_back({r.at("algo"), {2, 3, 4}, {to_d(r.at("q99_ms")), to_d(r.at("q999_ms")), to_d(r.at("q9999_ms"))}});
        }
        if (!s.empty()) {
            svg::line_chart(path("gev_ladder.svg"), {"GEV block-maximum quantiles", "-log10(1 - q)", "latency (ms)"}, s);
            ++written;
        }
    }
    if (exists("costs.csv")) {
        std::vector<std::string> labels;
        std::vector<double> v;
        for (const auto& r : read_csv(path("costs.csv"))) {
            if (r.at("item").rfind("phase_", 0) != 0) continue;
            labels.push_back(r.at("item") + " " + r.at("year"));
            v.push_back(to_d(r.at("usd_m")));
        }
        svg::bar_chart(path("cost_phases.svg"), {"Migration cost by phase", "", "USD million"}, labels, v);
        ++written;
    }
    return written;
}

std::string default_output_dir(std::uint64_t seed) {
    auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream o;
    o << "out/" << std::put_time(&tm, "%Y%m%d-%H%M%S") << "-seed" << seed;
    return o.str();
}

void write_config_snapshot(const SimConfig& cfg, const std::string& dir) {
    std::ofstream out(fs::path(dir) / "config.json");
    if (!out) throw std::runtime_error("cannot write " + (fs::path(dir) / "config.json").string());
    out << config_echo(cfg).dump(2) << '\n';
}

}  // namespace pqcsim
