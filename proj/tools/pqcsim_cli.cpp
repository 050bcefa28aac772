#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "pqcsim/config.hpp"
#include "pqcsim/report.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct Options {
    std::string config_path;
    std::string out_dir;
    std::string in_dir;
    std::string format = "csv";
    std::string algos;
    std::string scenario;
    std::string hsm;
    long long seed = -1;
    int days = -1;
    long long sample = -1;
    int servers = -1;
    int workers = -1;
    bool plots = false;
};

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

const char* env(const char* name) {
    const char* v = std::getenv(name);
    return v && *v ? v : nullptr;
}

// Environment values fill in whatever the command line left unset.
void apply_env(Options& o, const CLI::App& app) {
    auto unset = [&](const char* flag) { return app.count(flag) == 0; };
    try {
        if (auto v = env("PQCSIM_CONFIG"); v && unset("--config")) o.config_path = v;
        if (auto v = env("PQCSIM_OUT"); v && unset("--out")) o.out_dir = v;
        if (auto v = env("PQCSIM_FORMAT"); v && unset("--format")) o.format = v;
        if (auto v = env("PQCSIM_ALGOS"); v && unset("--algos")) o.algos = v;
        if (auto v = env("PQCSIM_SCENARIO"); v && unset("--scenario")) o.scenario = v;
        if (auto v = env("PQCSIM_HSM"); v && unset("--hsm")) o.hsm = v;
        if (auto v = env("PQCSIM_SEED"); v && unset("--seed")) o.seed = std::stoll(v);
        if (auto v = env("PQCSIM_DAYS"); v && unset("--days")) o.days = std::stoi(v);
        if (auto v = env("PQCSIM_SAMPLE"); v && unset("--sample")) o.sample = std::stoll(v);
        if (auto v = env("PQCSIM_SERVERS"); v && unset("--servers")) o.servers = std::stoi(v);
        if (auto v = env("PQCSIM_WORKERS"); v && unset("--workers")) o.workers = std::stoi(v);
        if (auto v = env("PQCSIM_PLOTS"); v && unset("--plots")) o.plots = std::string(v) != "0";
    } catch (const std::exception&) {
        throw pqcsim::ConfigError("malformed numeric value in a PQCSIM_ environment variable");
    }
}

pqcsim::SimConfig build_config(const Options& o) {
    json j = json::object();
    if (!o.config_path.empty()) {
        std::ifstream in(o.config_path);
        if (!in) throw pqcsim::ConfigError("cannot read configuration file '" + o.config_path + "'");
        std::stringstream ss;
        ss << in.rdbuf();
        std::string text = ss.str();
        if (text.find_first_not_of(" \t\r\n") != std::string::npos) {
            try {
                j = json::parse(text);
            } catch (const json::parse_error& e) {
                throw pqcsim::ConfigError("configuration file '" + o.config_path + "' is not valid JSON: " + e.what());
            }
        }
    }
    json& run = j["run"];
    if (o.seed >= 0) run["seed"] = static_cast<std::uint64_t>(o.seed);
    if (o.days >= 0) run["n_days"] = o.days;
    if (o.sample >= 0) run["n_sample"] = o.sample;
    if (!o.algos.empty()) run["algorithms"] = split_list(o.algos);
    if (!o.scenario.empty()) run["scenario"] = o.scenario;
    if (!o.hsm.empty()) {
        run["hsm"] = o.hsm;
        run.erase("hsm_overhead_per_hop_ms");
    }
    if (o.servers >= 0) run["c_servers"] = o.servers;
    if (o.workers >= 0) run["workers"] = o.workers;
    return pqcsim::config_from_json(j);
}

std::string prepare_out(const Options& o, const pqcsim::SimConfig& cfg) {
    std::string dir = o.out_dir.empty() ? pqcsim::default_output_dir(cfg.run.master_seed) : o.out_dir;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw pqcsim::ConfigError("output directory '" + dir + "' is not writable");
    std::ofstream probe(fs::path(dir) / ".write_probe");
    if (!probe) throw pqcsim::ConfigError("output directory '" + dir + "' is not writable");
    probe.close();
    fs::remove(fs::path(dir) / ".write_probe", ec);
    return dir;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Monte Carlo latency and migration-cost simulator for post-quantum payment signing"};
    app.require_subcommand(1, 1);
    Options o;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", o.config_path, "JSON configuration file");
        sub->add_option("--out", o.out_dir, "output directory (default out/<timestamp>-seed<k>)");
        sub->add_option("--format", o.format, "csv, json or both")->check(CLI::IsMember({"csv", "json", "both"}));
        sub->add_option("--seed", o.seed, "master seed");
        sub->add_option("--days", o.days, "corpus days");
        sub->add_option("--sample", o.sample, "NPP transactions sampled per day");
        sub->add_option("--algos", o.algos, "comma-separated algorithm names");
        sub->add_option("--scenario", o.scenario, "force every day to this scenario");
        sub->add_option("--hsm", o.hsm, "HSM tier")->check(CLI::IsMember({"software", "pcie", "network"}));
        sub->add_option("--servers", o.servers, "HSM servers per institution");
        sub->add_option("--workers", o.workers, "worker threads (0 = all cores)");
        sub->add_flag("--plots", o.plots, "write SVG figures");
    };
    auto* run = app.add_subcommand("run", "simulate the corpus");
    auto* analyze = app.add_subcommand("analyze", "statistics over a finished run");
    auto* report = app.add_subcommand("report", "decision tables: CDI, formats, routes, HNDL, costs");
    auto* sweep = app.add_subcommand("sweep", "queueing sweeps: TPS, hourly, servers, DoS");
    auto* all = app.add_subcommand("all", "run, analyze, report and sweep into one directory");
    for (auto* s : {run, analyze, report, sweep, all}) add_common(s);
    analyze->add_option("--in", o.in_dir, "directory holding corpus.csv and rep_day_samples.csv");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }
    CLI::App* sub = app.get_subcommands().front();

    pqcsim::SimConfig cfg;
    std::string dir;
    pqcsim::OutputFormat fmt;
    try {
        apply_env(o, *sub);
        fmt = pqcsim::parse_format(o.format);
        cfg = build_config(o);
        dir = prepare_out(o, cfg);
        if (sub == analyze && o.in_dir.empty()) o.in_dir = dir;
    } catch (const pqcsim::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    }

    try {
        pqcsim::write_config_snapshot(cfg, dir);
        bool plots = o.plots;
        if (sub == run) {
            pqcsim::command_run(cfg, dir, fmt);
        } else if (sub == analyze) {
            pqcsim::command_analyze(cfg, o.in_dir, dir, fmt);
        } else if (sub == report) {
            pqcsim::command_report(cfg, dir, fmt);
        } else if (sub == sweep) {
            pqcsim::command_sweep(cfg, dir, fmt);
        } else {
            pqcsim::CorpusResult corpus;
            // Analysis reads the CSVs back, so it needs them regardless of the requested format.
            auto run_fmt = fmt == pqcsim::OutputFormat::json ? pqcsim::OutputFormat::both : fmt;
            std::cerr << "run: " << cfg.run.n_days << " days\n";
            pqcsim::command_run(cfg, dir, run_fmt, &corpus);
            std::cerr << "analyze\n";
            pqcsim::command_analyze(cfg, dir, dir, fmt);
            std::cerr << "report\n";
            pqcsim::command_report(cfg, dir, fmt, &corpus);
            std::cerr << "sweep\n";
            pqcsim::command_sweep(cfg, dir, fmt);
            std::cerr << "hsm tiers and growth\n";
            pqcsim::command_hsm_growth(cfg, corpus, dir, fmt);
            plots = true;
        }
        if (plots) pqcsim::emit_plots(cfg, dir);
        std::cout << dir << '\n';
    } catch (const pqcsim::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return 0;
}
