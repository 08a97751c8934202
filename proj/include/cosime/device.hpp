#pragma once

#include <limits>

#include "cosime/rng.hpp"

namespace cosime::device {

/// Subthreshold (weak-inversion) MOSFET. Units: A, V.
struct MosfetParams {
    double i0 = 1e-9;        // drain current at V_GS = 0 for W/L = 1
    double w_over_l = 1.0;
    double eta = 1.5;        // subthreshold slope factor
    double v_t = 0.0258;     // thermal voltage at 300 K
    double v_a = 20.0;       // Early voltage; +inf disables the Early term
    double vth_mos = 0.45;   // V_GS must stay below this for subthreshold validity

    /// I0 * W/L, the prefactor of the exponential law.
    double specific_current() const { return i0 * w_over_l; }
    /// eta * V_T
    double slope_voltage() const { return eta * v_t; }

    /// Throws DomainError if any field violates the model's invariants.
    void validate() const;
};

struct DrainCurrent {
    double amps = 0.0;
    bool out_of_region = false;  // v_gs >= vth_mos
};

/// I0 (W/L) exp(V_GS / (eta V_T)) (1 + V_DS / V_A)
DrainCurrent subthreshold_current(double v_gs, double v_ds, const MosfetParams& p);

/// Inverse of the exponential law at V_DS = 0. Throws DomainError for i_ds <= 0.
double vgs_for_current(double i_ds, const MosfetParams& p);

/// 1FeFET1R cell. The FeFET holds one bit as its threshold state (low V_TH = 1),
/// and the series resistor clamps the ON current to about v_read / r_series.
struct CellParams {
    double i_on = 0.0;        // A
    double r_series = 0.0;    // ohm
    double r_fefet_on = 0.0;  // ohm, channel resistance of the low-V_TH FeFET
    double v_read = 0.0;      // V across the cell during search
    double i_off = 0.0;       // A, high-V_TH leakage
    double vth_low = 0.2;     // V
    double vth_high = 1.4;    // V
    double v_gate_read = 1.0; // V, search-line high level

    /// Builds a cell whose ON current is v_read / (r_series + r_fefet_on).
    static CellParams clamped(double v_read, double r_series, double r_fefet_on);

    /// Default cell: a 1024-bit all-ones word conducts 600 nA.
    static CellParams nominal();

    void validate() const;
};

/// Statistical spreads (1 sigma) applied by Monte Carlo sampling.
struct VariationSpec {
    double sigma_vth_low = 0.054;       // V
    double sigma_vth_high = 0.082;      // V
    double sigma_r_rel = 0.08;
    double sigma_mos_size_rel = 0.10;
    double sigma_mos_vth_rel = 0.10;
    double sigma_supply_rel = 0.10;
    /// Weight k of the FeFET V_TH contribution to the cell ON-current spread.
    /// 0 means the series resistor fully suppresses it.
    double fefet_attenuation = 0.0;
    double truncation = 4.0;            // Gaussians are truncated at this many sigma
    unsigned long long rng_seed = 42;

    static VariationSpec zero();
    bool is_zero() const;
    void validate() const;

    /// Relative ON-current spread contributed by the FeFET threshold spread when
    /// unclamped: sigma_vth_low / (v_gate_read - vth_low).
    double fefet_current_sigma(const CellParams& cell) const;
    /// sqrt(sigma_r_rel^2 + k * f(sigma_vth)^2)
    double cell_current_sigma(const CellParams& cell) const;
};

/// Draws one variation-applied cell. Always consumes exactly three normal
/// draws (more on truncation resample), so sequences are reproducible.
CellParams sample_cell(const CellParams& nominal, const VariationSpec& spec, Rng& rng);

/// Die-level (shared within one search) factors for the peripheral circuits.
struct GlobalSample {
    double supply_scale = 1.0;   // multiplies read voltage and bias currents
    double mos_size_scale = 1.0; // multiplies W/L
    double mos_vth_shift = 0.0;  // V, added to the MOSFET threshold
};

GlobalSample sample_global(const VariationSpec& spec, const MosfetParams& ref, Rng& rng);

/// Applies a die-level sample to nominal MOSFET parameters: W/L scales, and a
/// threshold shift moves both the validity bound and the current prefactor.
MosfetParams apply_global(const MosfetParams& p, const GlobalSample& g);

}  // namespace cosime::device
