#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cosime/array.hpp"
#include "cosime/cost.hpp"
#include "cosime/device.hpp"
#include "cosime/hdc.hpp"
#include "cosime/translinear.hpp"
#include "cosime/variation.hpp"
#include "cosime/wta.hpp"

namespace cosime::app {

enum class Verbosity { quiet, normal, verbose };

struct SweepSettings {
    std::vector<std::size_t> rows{4, 8, 16, 32, 64, 128, 256};
    std::vector<std::size_t> dims{64, 128, 256, 512, 1024};
    std::vector<double> margins{0.001, 0.002, 0.005, 0.0075, 0.01, 0.02, 0.05};
    std::size_t margin_trials = 200;
    std::size_t margin_rails = 4;
};

struct HdcSettings {
    std::string train_csv;             // empty: use the surrogate
    std::string test_csv;
    std::string surrogate = "isolet";
    std::uint64_t surrogate_seed = 1;
    std::vector<std::size_t> dims{256, 512, 1024};
    std::vector<std::string> backends{"oracle_cosine", "oracle_hamming"};
    std::uint64_t projection_seed = 1;
    std::size_t train_dim = 1024;      // dimension used by `hdc train`
    int quantization = 0;
    double injection_rate = 0.0;       // 0 disables error injection in `hdc eval`
    std::string injection_mode = "noise_matched";
};

struct CalibrationSettings {
    std::vector<double> i_bias{50e-9, 100e-9, 200e-9};
    std::vector<double> dominance_factor{1.5, 2.0, 3.0};
    std::vector<double> fefet_attenuation{0.0, 0.05};
    std::size_t trials = 300;
    double target_accuracy = 0.90;
};

// Every section mirrors the parameters of one module. Missing keys take the
// defaults below; unknown keys are rejected.
struct RunConfig {
    std::uint64_t master_seed = 1;
    std::string output_dir = "cosime_out";
    Verbosity verbosity = Verbosity::normal;

    device::MosfetParams mosfet{};
    device::CellParams cell = device::CellParams::nominal();
    std::size_t dim = 1024;
    double iy_target = 600e-9;
    translinear::TranslinearConfig translinear{};
    wta::WtaConfig wta{};

    device::VariationSpec variation{};
    std::size_t trials = 1000;
    variation::Scenario scenario = variation::Scenario::worst_case_pair;
    std::vector<std::size_t> sweep_competitor_ones{5, 6, 7, 8, 9, 10, 11};
    bool unresolvable_is_error = true;
    bool keep_trial_log = false;

    cost::CostParams cost{};
    std::size_t cost_rows = 256;
    std::string baselines_csv;  // empty: bundled table

    SweepSettings sweep{};
    HdcSettings hdc{};
    CalibrationSettings calibration{};
};

RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& cfg);

// Reads `path`; relative paths that do not exist are looked up in the
// colon-separated directories of COSIME_CONFIG_PATH.
RunConfig load_config(const std::string& path);
std::string resolve_config_path(const std::string& path);

variation::McExperiment make_experiment(const RunConfig& cfg);
hdc::EvalSettings make_eval_settings(const RunConfig& cfg);

// ---- commands --------------------------------------------------------------
// Each command writes its files into cfg.output_dir (created if missing),
// including config.resolved.json, and returns the JSON report it wrote.

nlohmann::json search_report(const RunConfig& cfg, const std::vector<BinaryVector>& stored,
                             const BinaryVector& query);
nlohmann::json cmd_search(const RunConfig& cfg, const std::string& stored_path,
                          const std::string& query_path);

nlohmann::json cmd_mc(const RunConfig& cfg);

enum class SweepAxis { rows, dims, margin };
SweepAxis sweep_axis_from_name(const std::string& name);

struct MarginPoint {
    double margin = 0.0;
    std::size_t trials = 0;
    std::size_t correct = 0;
    double correctness = 0.0;
};

// Random zero-variation WTA instances whose top-2 input margin equals each
// requested value; correct means resolvable and equal to the larger input.
std::vector<MarginPoint> margin_sweep(const std::vector<double>& margins, std::size_t trials,
                                      std::size_t rails, const wta::WtaConfig& cfg,
                                      std::uint64_t seed);

nlohmann::json cmd_sweep(const RunConfig& cfg, SweepAxis axis);

nlohmann::json cmd_cost(const RunConfig& cfg);

enum class HdcAction { train, eval };
HdcAction hdc_action_from_name(const std::string& name);

hdc::DatasetSplit load_split(const RunConfig& cfg);
nlohmann::json cmd_hdc(const RunConfig& cfg, HdcAction action);

struct CalibrationPoint {
    double i_bias = 0.0;
    double dominance_factor = 0.0;
    double fefet_attenuation = 0.0;
    double accuracy = 0.0;
};

std::vector<CalibrationPoint> calibration_grid(const RunConfig& cfg);
nlohmann::json cmd_calibrate(const RunConfig& cfg);

nlohmann::json cmd_dataset(const RunConfig& cfg, const std::string& name);

}  // namespace cosime::app
