#pragma once

#include <array>
#include <optional>
#include <vector>

#include "cosime/device.hpp"

namespace cosime::translinear {

/// Current-mode squarer-divider built on a four-transistor subthreshold loop.
struct TranslinearConfig {
    double v0 = 0.6;                 // V, supply of the stacked clockwise pair
    device::MosfetParams mosfet{};
    double mirror_ratio = 1.0;       // input mirrors scale Ix and Iy by this ratio
    double floor_margin = 3.0;       // V_GS floor, in units of eta * V_T
    double iy_ref = 600e-9;          // A, norm current the Ix window is referred to
    std::optional<double> ix_min;    // overrides of the derived Ix window
    std::optional<double> ix_max;
    bool soft_saturation = false;    // clamp Iz at the window boundary value

    void validate() const;

    /// Drain-current window [floor, ceiling] of one loop transistor.
    double current_floor() const;
    double current_ceiling() const;
    /// Ix window: every loop current stays inside the transistor window at iy_ref.
    double ix_lower() const;
    double ix_upper() const;
};

struct SquaredRatio {
    double iz = 0.0;
    bool out_of_region = false;
};

/// mirror_ratio * ix^2 / iy. Throws DomainError for iy <= 0 or ix < 0.
SquaredRatio squared_ratio(double ix, double iy, const TranslinearConfig& cfg);

struct RegionReport {
    /// V_GS of M1, M4 (clockwise; carry Ix) and M2, M5 (counter-clockwise; Iz, Iy).
    std::array<double, 4> vgs{};
    double loop_residual = 0.0;  // V, sum(CW) - sum(CCW)
    bool below_floor = false;
    bool above_threshold = false;
    bool headroom_ok = true;     // V_GS(M1) + V_GS(M4) < v0
    bool in_region = false;
};

RegionReport certify_operating_region(double ix, double iy, const TranslinearConfig& cfg);

struct RowSimilarity {
    double iz = 0.0;
    RegionReport region;
};

std::vector<RowSimilarity> row_similarities(const std::vector<double>& ix,
                                            const std::vector<double>& iy,
                                            const TranslinearConfig& cfg);

}  // namespace cosime::translinear
