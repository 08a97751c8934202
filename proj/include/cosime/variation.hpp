#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "cosime/array.hpp"
#include "cosime/binary_vector.hpp"
#include "cosime/device.hpp"
#include "cosime/translinear.hpp"
#include "cosime/wta.hpp"

namespace cosime::variation {

/// Stored words plus a query with a known correct answer.
struct SearchCase {
    std::vector<BinaryVector> stored;
    BinaryVector query;
    std::size_t expected_winner = 0;
};

/// The hardest discrimination: two words one bit apart whose squared cosine
/// similarities to the query are exactly 1/4 (word 0) and 1/5 (word 1).
/// Throws DomainError when dim is too small to realize it.
SearchCase worst_case_scenario(std::size_t dim);

/// Word 0 is the worst-case anchor (cos^2 = 1/4). Word 1 shares the anchor's
/// overlap with the query and has `competitor_ones` ones, so its cos^2 is
/// overlap^2 / (|query| * competitor_ones).
SearchCase similarity_pair(std::size_t dim, std::size_t competitor_ones);

enum class Scenario { worst_case_pair, similarity_sweep, custom };

struct McExperiment {
    std::size_t trials = 1000;
    device::VariationSpec spec{};
    Scenario scenario = Scenario::worst_case_pair;
    std::size_t dim = 1024;
    std::uint64_t master_seed = 1;
    device::CellParams cell = device::CellParams::nominal();
    translinear::TranslinearConfig translinear{};
    wta::WtaConfig wta{};
    /// Resistor tuning target for the mean stored-word norm current (A).
    /// Zero keeps geometry scale_factor = 1.
    double iy_target = 600e-9;
    /// Count searches the WTA cannot resolve as errors.
    bool unresolvable_is_error = true;
    std::vector<std::size_t> sweep_competitor_ones{5, 6, 7, 8, 9, 10, 11};
    std::optional<SearchCase> custom;
    bool keep_trial_log = false;

    void validate() const;
};

struct TrialRecord {
    std::size_t trial = 0;
    std::uint64_t seed = 0;
    std::size_t winner = 0;
    bool correct = false;
    bool resolvable = false;
    bool converged = false;
    double margin = 0.0;  // relative Iz margin seen by the WTA
};

struct ErrorBin {
    double cos = 0.0;     // competitor cosine at zero variation
    double lower = 0.0;   // bin edges on the cos axis
    double upper = 0.0;
    std::size_t trials = 0;
    std::size_t errors = 0;
    double error_rate = 0.0;
};

struct McResult {
    std::size_t trials = 0;
    std::size_t correct = 0;
    std::size_t nonconverged = 0;
    std::size_t unresolvable = 0;
    double accuracy = 0.0;
    std::vector<ErrorBin> error_rate_by_bin;
    std::vector<TrialRecord> trial_log;
};

/// Outcome of one search under one variation draw.
struct TrialOutcome {
    std::size_t winner = 0;
    bool resolvable = false;
    bool converged = false;
    double margin = 0.0;
    std::vector<double> iz;
};

/// Samples die-level and per-cell variation from `seed`, then runs
/// arrays -> translinear -> WTA for one query.
TrialOutcome run_search_trial(const SearchCase& search, const McExperiment& exp,
                              std::uint64_t seed);

McResult run_mc(const McExperiment& exp);

/// Seed of trial `t` (bin-major for sweeps) under the experiment's master seed.
std::uint64_t trial_seed(std::uint64_t master, std::size_t stream, std::size_t trial);

}  // namespace cosime::variation
