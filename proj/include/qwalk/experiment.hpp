#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "qwalk/ode.hpp"

namespace qwalk::experiment {

// Validation failure carrying the config field it names.
class ConfigError : public std::runtime_error {
  public:
    ConfigError(std::string field, const std::string& reason)
        : std::runtime_error("config error at " + field + ": " + reason), field_(std::move(field)) {}
    const std::string& field() const { return field_; }

  private:
    std::string field_;
};

struct ModelConfig {
    enum class Type { hypercube, hyperlattice };
    Type type = Type::hypercube;
    int dim = 1;        // D (hypercube) or d (hyperlattice)
    double hop = 1.0;   // delta0
    int halfwidth = 1;  // L, hyperlattice only
};

struct DecoherenceConfig {
    enum class Type { none, site, qubit, spinbath, classical };
    Type type = Type::none;
    double gamma = 0.0;   // site/qubit
    double lambda = 0.0;  // spinbath strength flag
    double rate = 0.0;    // classical hop rate
};

struct TimeGridConfig {
    double t_max = 1.0;
    int num_points = 101;
    enum class Grid { linear, log };
    Grid grid = Grid::linear;
    double t_min = 0.0;  // log grids only; defaults to t_max / 100
};

struct ExperimentConfig {
    ModelConfig model;
    DecoherenceConfig decoherence;
    TimeGridConfig time;
    std::vector<std::string> observables;
    IntegratorConfig integrator;
    std::string output_dir;  // optional default output location

    nlohmann::json echo() const;  // fully resolved config, re-runnable
};

ExperimentConfig parse_config(const nlohmann::json& j);
std::vector<double> make_time_grid(const TimeGridConfig& t);

// QWALK_NODE_BUDGET env override, else the library default.
int node_budget();

struct RunResult {
    std::filesystem::path dir;
    std::vector<std::string> outputs;  // file names relative to dir
    nlohmann::json manifest;
};

// Executes one experiment: builds the model, dispatches to the appropriate
// engine or closed form, writes one CSV per observable plus graph.json, and
// finally an atomically-written manifest.json.
RunResult run(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);
RunResult run_file(const std::filesystem::path& config_path,
                   const std::optional<std::filesystem::path>& out_override);

struct SweepOutcome {
    double value = 0.0;
    std::string dir_name;
    bool ok = false;
    std::string error;
};

struct SweepResult {
    std::filesystem::path dir;
    std::vector<SweepOutcome> runs;
    std::vector<std::string> combined_files;
};

// One sub-run per value of the (numeric) config entry at param_path, fanned
// out concurrently, plus long-format combined CSVs with the swept column.
SweepResult sweep(const nlohmann::json& base_config, const std::string& param_path,
                  std::span<const double> values, const std::filesystem::path& out_dir);

struct CompareRow {
    std::string observable;
    double max_abs_dev = 0.0;
    double mean_abs_dev = 0.0;
    double ratio_min = 0.0, ratio_max = 0.0, ratio_mean = 0.0;  // b / a
    double exponent_a = 0.0, exponent_b = 0.0;
    bool exponents_valid = false;
};

struct CompareReport {
    std::vector<CompareRow> rows;
    double max_abs_dev = 0.0;
};

// Compares overlapping time-series observables of two finished runs; the
// time grids must match exactly.
CompareReport compare(const std::filesystem::path& dir_a, const std::filesystem::path& dir_b);

std::string format_report(const CompareReport& rep);

}  // namespace qwalk::experiment
