#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pqcsim/config.hpp"
#include "pqcsim/mc_engine.hpp"

namespace pqcsim {

enum class OutputFormat { csv, json, both };
OutputFormat parse_format(const std::string& s);

struct Cell {
    std::string text;
    bool numeric = false;
};

Cell ms(double v);      // 2 decimals
Cell frac(double v);    // 4 decimals
Cell count(long long v);
Cell num(double v, int precision = 6);
Cell text(const std::string& s);
Cell flag(bool b);

struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    std::vector<std::string> aliases;  // extra file names carrying the same content
};

void write_table(const std::string& dir, const Table& t, OutputFormat fmt);
nlohmann::json table_json(const Table& t);
// Replaces one top-level section of <dir>/summary.json, keeping the others.
void update_summary(const std::string& dir, const std::string& section, const nlohmann::json& value);

struct CorpusTables {
    std::vector<std::string> algos;
    std::vector<std::vector<DayResult>> days;  // per algorithm
};

CorpusTables read_corpus_csv(const std::string& path);

struct RepDaySamples {
    std::vector<std::string> algos;
    std::vector<std::vector<double>> latency_ms;
    std::vector<std::vector<double>> base_ms;
    std::vector<std::string> origin_city;
};

RepDaySamples read_rep_day_csv(const std::string& path);

// Subcommand bodies; each writes into dir and returns the summary section it produced.
nlohmann::json command_run(const SimConfig& cfg, const std::string& dir, OutputFormat fmt, CorpusResult* keep = nullptr);
nlohmann::json command_analyze(const SimConfig& cfg, const std::string& in_dir, const std::string& dir,
                               OutputFormat fmt);
nlohmann::json command_report(const SimConfig& cfg, const std::string& dir, OutputFormat fmt,
                              const CorpusResult* measured = nullptr);
nlohmann::json command_sweep(const SimConfig& cfg, const std::string& dir, OutputFormat fmt);
nlohmann::json command_hsm_growth(const SimConfig& cfg, const CorpusResult& corpus, const std::string& dir,
                                  OutputFormat fmt);
// Writes the SVG figures for whatever results exist in dir; returns the number of files written.
int emit_plots(const SimConfig& cfg, const std::string& dir);

std::string default_output_dir(std::uint64_t seed);
void write_config_snapshot(const SimConfig& cfg, const std::string& dir);

}  // namespace pqcsim
