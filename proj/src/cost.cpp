#include "cosime/cost.hpp"

#include <fstream>
#include <sstream>

#include "cosime/error.hpp"

namespace cosime::cost {

void CostParams::validate() const {
    if (!(energy_per_bit > 0.0 && latency > 0.0 && area_ref > 0.0))
        throw DomainError("cost parameters must be > 0");
    if (!(wta_energy_share >= 0.0 && translinear_energy_share >= 0.0 &&
          wta_energy_share + translinear_energy_share <= 1.0))
        throw DomainError("energy shares must be >= 0 and sum to <= 1");
    if (rows_ref == 0 || dim_ref == 0 || area_rows_ref == 0 || area_dim_ref == 0)
        throw DomainError("cost reference geometry must be non-empty");
}

CostReport estimate(const array::ArrayGeometry& geometry, const CostParams& p) {
    geometry.validate();
    p.validate();
    CostReport r;
    r.rows = geometry.rows;
    r.dim = geometry.dim;
    const double ref_energy = p.energy_per_bit * static_cast<double>(p.rows_ref) *
                              static_cast<double>(p.dim_ref);
    r.energy = ref_energy * static_cast<double>(geometry.rows) / static_cast<double>(p.rows_ref);
    r.energy_per_bit = r.energy / (static_cast<double>(geometry.rows) * static_cast<double>(geometry.dim));
    r.latency = p.latency;
    r.area = p.area_ref * (static_cast<double>(geometry.rows) * static_cast<double>(geometry.dim)) /
             (static_cast<double>(p.area_rows_ref) * static_cast<double>(p.area_dim_ref));
    r.area_per_cell = r.area / (static_cast<double>(geometry.rows) * static_cast<double>(geometry.dim));
    r.energy_wta = r.energy * p.wta_energy_share;
    r.energy_translinear = r.energy * p.translinear_energy_share;
    r.energy_other = r.energy - r.energy_wta - r.energy_translinear;
    return r;
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double to_number(const std::string& s, std::size_t line) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ParseError("not a number: '" + s + "'", line);
    }
}

}  // namespace

std::vector<BaselineEntry> parse_baselines(const std::string& csv_text) {
    std::istringstream in(csv_text);
    std::string line;
    std::size_t line_no = 0;
    std::vector<BaselineEntry> rows;
    bool header = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (header) {
            header = false;
            continue;
        }
        const auto cells = split_csv(line);
        if (cells.size() != 7) throw ParseError("expected 7 columns", line_no);
        BaselineEntry e;
        e.name = cells[0];
        e.technology = cells[1];
        e.metric = cells[2];
        e.energy_per_bit = to_number(cells[3], line_no) * 1e-15;
        e.latency = to_number(cells[4], line_no) * 1e-9;
        e.area = to_number(cells[5], line_no) * 1e-6;
        e.process = cells[6];
        rows.push_back(std::move(e));
    }
    return rows;
}

std::vector<BaselineEntry> load_baselines(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw InputError("cannot open baseline file: " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_baselines(ss.str());
}

std::vector<BaselineEntry> bundled_baselines() {
    return parse_baselines(
        "name,technology,metric,energy_fJ_per_bit,latency_ns,area_mm2,process_nm\n"
        "A-HAM,RRAM,Hamming,0.20,8.92,0.524,45\n"
        "FeFET TCAM,FeFET,Hamming,0.40,0.36,0.010,45\n"
        "E2-MCAM (1.5 V),Flash,Euclidean^2,0.56,5.85,0.192,55\n"
        "Approx. Cosine,RRAM,Approx. Cosine,25.9,1000,0.026,90/65\n"
        "COSIME,FeFET,Cosine,0.286,3,0.0198,45\n");
}

RatioRow compare_one(const CostReport& ours, const BaselineEntry& baseline) {
    RatioRow r;
    r.name = baseline.name;
    r.energy_ratio = baseline.energy_per_bit / ours.energy_per_bit;
    r.latency_ratio = baseline.latency / ours.latency;
    r.area_ratio = (baseline.area / kBaselineAreaCells) / ours.area_per_cell;
    return r;
}

std::vector<RatioRow> compare_to_baselines(const CostReport& ours,
                                           const std::vector<BaselineEntry>& baselines) {
    if (baselines.empty()) throw LookupError("no baselines loaded");
    std::vector<RatioRow> out;
    out.reserve(baselines.size());
    for (const auto& b : baselines) out.push_back(compare_one(ours, b));
    return out;
}

const BaselineEntry& find_baseline(const std::vector<BaselineEntry>& baselines,
                                   const std::string& name) {
    for (const auto& b : baselines)
        if (b.name == name) return b;
    throw LookupError("no baseline named '" + name + "'");
}

}  // namespace cosime::cost
