#include "cosime/translinear.hpp"

#include <algorithm>
#include <cmath>

#include "cosime/error.hpp"

namespace cosime::translinear {

void TranslinearConfig::validate() const {
    mosfet.validate();
    if (!(v0 > 0.0)) throw DomainError("translinear v0 must be > 0");
    if (!(mirror_ratio > 0.0)) throw DomainError("translinear mirror_ratio must be > 0");
    if (!(iy_ref > 0.0)) throw DomainError("translinear iy_ref must be > 0");
    if (!(ix_lower() < ix_upper())) throw DomainError("translinear requires ix_min < ix_max");
}

double TranslinearConfig::current_floor() const {
    return mosfet.specific_current() * std::exp(floor_margin);
}

double TranslinearConfig::current_ceiling() const {
    return mosfet.specific_current() * std::exp(mosfet.vth_mos / mosfet.slope_voltage());
}

// Iz = Ix^2 / Iy_ref must also clear the floor and stay under the ceiling.
double TranslinearConfig::ix_lower() const {
    if (ix_min) return *ix_min;
    const double floor = current_floor();
    return std::max(floor, std::sqrt(floor * iy_ref)) / mirror_ratio;
}

double TranslinearConfig::ix_upper() const {
    if (ix_max) return *ix_max;
    const double ceil = current_ceiling();
    // The stacked clockwise pair shares v0.
    const double headroom = mosfet.specific_current() * std::exp(0.5 * v0 / mosfet.slope_voltage());
    return std::min({ceil, std::sqrt(ceil * iy_ref), headroom}) / mirror_ratio;
}

SquaredRatio squared_ratio(double ix, double iy, const TranslinearConfig& cfg) {
    if (!(iy > 0.0)) throw DomainError("squared_ratio: iy must be > 0");
    if (!(ix >= 0.0)) throw DomainError("squared_ratio: ix must be >= 0");
    const double lo = cfg.ix_lower();
    const double hi = cfg.ix_upper();
    SquaredRatio out;
    out.out_of_region = ix < lo || ix > hi;
    double x = ix;
    if (out.out_of_region && cfg.soft_saturation) x = std::clamp(ix, lo, hi);
    const double mx = cfg.mirror_ratio * x;
    out.iz = mx * mx / (cfg.mirror_ratio * iy);
    return out;
}

RegionReport certify_operating_region(double ix, double iy, const TranslinearConfig& cfg) {
    if (!(ix > 0.0) || !(iy > 0.0)) {
        // Log divergence: the loop cannot be biased.
        RegionReport r;
        r.below_floor = true;
        return r;
    }
    const auto& p = cfg.mosfet;
    const double mx = cfg.mirror_ratio * ix;
    const double my = cfg.mirror_ratio * iy;
    const double mz = mx * mx / my;

    RegionReport r;
    r.vgs = {device::vgs_for_current(mx, p), device::vgs_for_current(mx, p),
             device::vgs_for_current(mz, p), device::vgs_for_current(my, p)};
    r.loop_residual = (r.vgs[0] + r.vgs[1]) - (r.vgs[2] + r.vgs[3]);

    const double floor = cfg.floor_margin * p.slope_voltage();
    for (double v : r.vgs) {
        if (v <= floor) r.below_floor = true;
        if (v >= p.vth_mos) r.above_threshold = true;
    }
    r.headroom_ok = r.vgs[0] + r.vgs[1] < cfg.v0;
    r.in_region = !r.below_floor && !r.above_threshold && r.headroom_ok;
    return r;
}

std::vector<RowSimilarity> row_similarities(const std::vector<double>& ix,
                                            const std::vector<double>& iy,
                                            const TranslinearConfig& cfg) {
    if (ix.size() != iy.size()) throw ShapeError("row_similarities: ix and iy lengths differ");
    std::vector<RowSimilarity> out(ix.size());
    for (std::size_t r = 0; r < ix.size(); ++r) {
        out[r].iz = squared_ratio(ix[r], iy[r], cfg).iz;
        out[r].region = certify_operating_region(ix[r], iy[r], cfg);
    }
    return out;
}

}  // namespace cosime::translinear
