#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cosime/array.hpp"
#include "cosime/binary_vector.hpp"
#include "cosime/device.hpp"
#include "cosime/translinear.hpp"
#include "cosime/wta.hpp"

namespace cosime::hdc {

// ---- similarity oracles ----------------------------------------------------

struct Similarity {
    double value = 0.0;
    bool zero_vector = false;  // one operand has no ones; value is defined as 0
};

/// a.b / (|a| |b|) for bit vectors, |x| = sqrt(popcount(x)).
Similarity exact_cosine(const BinaryVector& a, const BinaryVector& b);
/// (a.b)^2 / (popcount(a) popcount(b))
Similarity squared_cosine(const BinaryVector& a, const BinaryVector& b);
std::size_t hamming(const BinaryVector& a, const BinaryVector& b);

// ---- data ------------------------------------------------------------------

struct Dataset {
    Eigen::MatrixXd features;     // samples x features
    std::vector<int> labels;      // in [0, num_classes)
    int num_classes = 0;

    std::size_t size() const { return labels.size(); }
    std::size_t n_features() const { return static_cast<std::size_t>(features.cols()); }
};

struct DatasetSplit {
    std::string name;
    Dataset train;
    Dataset test;
};

/// CSV with a header row, one sample per row, integer label in the last column.
Dataset load_csv(const std::string& path);
Dataset parse_csv(const std::string& text);
void write_csv(const Dataset& data, const std::string& path);

/// Synthetic stand-ins with the published shapes (features, classes, split sizes):
/// "isolet" (617, 26), "ucihar" (561, 12, with six rare transition classes),
/// "face" (608, 2, skewed, reduced train size). Gaussian clusters in a low-rank
/// latent space, pushed through a saturating random feature map.
DatasetSplit make_surrogate(const std::string& name, std::uint64_t seed);

/// Cluster sanity set: `classes` tight, far-apart blobs.
DatasetSplit make_separable(std::size_t n_features, int classes, std::size_t per_class,
                            std::uint64_t seed);

// ---- encoding --------------------------------------------------------------

struct EncoderConfig {
    std::uint64_t projection_seed = 1;
    std::size_t dim = 1024;
    int quantization = 0;  // levels for standardized features; 0 keeps them continuous
};

/// Sign of a random +-1 projection of standardized features.
class Encoder {
public:
    Encoder() = default;
    Encoder(EncoderConfig cfg, std::size_t n_features);

    /// Standardization statistics from the training split only.
    void fit(const Eigen::MatrixXd& train_features);
    void set_statistics(std::vector<double> mean, std::vector<double> stddev);

    BinaryVector encode(const std::vector<double>& features) const;
    std::vector<BinaryVector> encode_all(const Eigen::MatrixXd& features) const;

    const EncoderConfig& config() const { return cfg_; }
    std::size_t n_features() const { return n_features_; }
    std::size_t dim() const { return cfg_.dim; }
    const std::vector<double>& mean() const { return mean_; }
    const std::vector<double>& stddev() const { return std_; }

private:
    Eigen::MatrixXf standardize(const Eigen::MatrixXd& features) const;

    EncoderConfig cfg_{};
    std::size_t n_features_ = 0;
    std::vector<double> mean_;
    std::vector<double> std_;
    Eigen::MatrixXf projection_;  // dim x n_features, entries +-1
};

// ---- model -----------------------------------------------------------------

struct HdcModel {
    std::vector<BinaryVector> classes;
    Encoder encoder;
    std::vector<std::size_t> class_counts;
};

/// Bitwise majority (ties -> 1) of encoded samples per class.
/// Throws InputError naming any class without samples.
HdcModel train_single_pass(const Dataset& train, const EncoderConfig& cfg);
std::vector<BinaryVector> majority_bundle(const std::vector<BinaryVector>& encoded,
                                          const std::vector<int>& labels, int num_classes);

std::string model_to_json(const HdcModel& model);
HdcModel model_from_json(const std::string& text);

// ---- associative-memory backends ------------------------------------------

enum class Backend { oracle_cosine, oracle_hamming, simulated_am };
const char* backend_name(Backend b);
Backend backend_from_name(const std::string& name);

std::size_t search_cosine(const BinaryVector& query, const std::vector<BinaryVector>& classes);
std::size_t search_hamming(const BinaryVector& query, const std::vector<BinaryVector>& classes);

struct AmSettings {
    device::CellParams cell = device::CellParams::nominal();
    device::VariationSpec spec = device::VariationSpec::zero();
    translinear::TranslinearConfig translinear{};
    wta::WtaConfig wta{};
    double iy_target = 0.0;  // A; 0 keeps scale_factor = 1
};

struct AmDecision {
    std::size_t winner = 0;
    bool converged = false;
    bool resolvable = false;
};

/// Class vectors programmed into the two FeFET arrays, searched through the
/// translinear and WTA stages.
class SimulatedAm {
public:
    SimulatedAm(const std::vector<BinaryVector>& classes, AmSettings settings);

    /// Translinear outputs per stored class.
    std::vector<double> similarity_currents(const BinaryVector& query) const;
    AmDecision search(const BinaryVector& query) const;

    const array::ArrayInstance& arrays() const { return arrays_; }

private:
    AmSettings settings_;
    array::ArrayInstance arrays_;
};

struct Inference {
    std::size_t label = 0;
    bool am_failure = false;  // non-converged search; counted wrong
};

Inference infer(const std::vector<double>& features, const HdcModel& model, Backend backend,
                const SimulatedAm* am = nullptr);
Inference infer_encoded(const BinaryVector& query, const HdcModel& model, Backend backend,
                        const SimulatedAm* am = nullptr);

// ---- evaluation ------------------------------------------------------------

struct AccuracyRow {
    std::size_t dim = 0;
    std::string metric;
    double accuracy = 0.0;
    std::size_t queries = 0;
    std::size_t am_failures = 0;
};

struct EvalSettings {
    std::uint64_t projection_seed = 1;
    int quantization = 0;
    AmSettings am{};
};

std::vector<AccuracyRow> evaluate(const DatasetSplit& split, const std::vector<std::size_t>& dims,
                                  const std::vector<Backend>& backends, const EvalSettings& settings);

/// Top-2 relative gap of squared cosine, (best - second) / best.
double top2_gap(const BinaryVector& query, const std::vector<BinaryVector>& classes);

// ---- error injection ------------------------------------------------------

enum class InjectionMode {
    uniform,        // winner replaced by a uniformly drawn other class
    runner_up,      // winner replaced by the second-best class
    noise_matched,  // log-normal noise on the similarity currents, scaled so the
                    // fraction of changed winners equals the rate
};
const char* injection_name(InjectionMode m);
InjectionMode injection_from_name(const std::string& name);

struct InjectionResult {
    std::vector<std::size_t> predictions;
    double flip_rate = 0.0;     // fraction of queries whose winner changed
    double noise_sigma = 0.0;   // noise_matched only
};

/// `scores` holds one row of per-class similarity currents per query.
InjectionResult inject_am_errors(const std::vector<std::vector<double>>& scores, double rate,
                                 InjectionMode mode, std::uint64_t seed);

}  // namespace cosime::hdc
