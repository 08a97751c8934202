#pragma once

#include <string>
#include <vector>

#include "cosime/array.hpp"

namespace cosime::cost {

/// Lookup-and-scale cost model. Reference values are measured numbers for a
/// 256-row, 1024-bit search; the model only scales them.
struct CostParams {
    double energy_per_bit = 0.286e-15;   // J
    double latency = 3e-9;               // s
    double area_ref = 0.0198e-6;         // m^2, for an area_rows_ref x area_dim_ref array
    double wta_energy_share = 0.56;
    double translinear_energy_share = 0.43;
    std::size_t rows_ref = 256;
    std::size_t dim_ref = 1024;
    std::size_t area_rows_ref = 256;
    std::size_t area_dim_ref = 256;

    void validate() const;
};

struct CostReport {
    std::size_t rows = 0;
    std::size_t dim = 0;
    double energy = 0.0;              // J per search
    double energy_per_bit = 0.0;      // J, energy / (rows * dim)
    double latency = 0.0;             // s
    double area = 0.0;                // m^2
    double area_per_cell = 0.0;       // m^2
    double energy_wta = 0.0;
    double energy_translinear = 0.0;
    double energy_other = 0.0;        // arrays and everything not attributed above
};

/// Energy is linear in rows and flat in word length (the resistor tuning keeps
/// the supply current per row constant); latency is flat; area follows cell count.
CostReport estimate(const array::ArrayGeometry& geometry, const CostParams& p);

struct BaselineEntry {
    std::string name;
    std::string technology;
    std::string metric;
    double energy_per_bit = 0.0;  // J
    double latency = 0.0;         // s
    double area = 0.0;            // m^2, for a 256 x 256 array
    std::string process;          // nm, kept verbatim ("90/65")
};

/// CSV columns: name,technology,metric,energy_fJ_per_bit,latency_ns,area_mm2,process_nm
std::vector<BaselineEntry> load_baselines(const std::string& path);
std::vector<BaselineEntry> parse_baselines(const std::string& csv_text);

/// Table 1 rows bundled with the tool.
std::vector<BaselineEntry> bundled_baselines();

struct RatioRow {
    std::string name;
    double energy_ratio = 0.0;   // baseline / ours
    double latency_ratio = 0.0;
    double area_ratio = 0.0;     // per cell
};

/// Baseline areas are quoted for 256 x 256 arrays.
inline constexpr double kBaselineAreaCells = 256.0 * 256.0;

RatioRow compare_one(const CostReport& ours, const BaselineEntry& baseline);
std::vector<RatioRow> compare_to_baselines(const CostReport& ours,
                                           const std::vector<BaselineEntry>& baselines);
/// Throws LookupError when `name` is absent.
const BaselineEntry& find_baseline(const std::vector<BaselineEntry>& baselines,
                                   const std::string& name);

}  // namespace cosime::cost
