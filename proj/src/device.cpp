#include "cosime/device.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cosime/error.hpp"

namespace cosime::device {

void MosfetParams::validate() const {
    if (!(i0 > 0.0)) throw DomainError("mosfet i0 must be > 0");
    if (!(w_over_l > 0.0)) throw DomainError("mosfet w_over_l must be > 0");
    if (!(eta >= 1.0)) throw DomainError("mosfet eta must be >= 1");
    if (!(v_t > 0.0)) throw DomainError("mosfet v_t must be > 0");
    if (!(v_a > 0.0)) throw DomainError("mosfet v_a must be > 0");
    if (!(vth_mos > 0.0)) throw DomainError("mosfet vth_mos must be > 0");
}

DrainCurrent subthreshold_current(double v_gs, double v_ds, const MosfetParams& p) {
    const double early = std::isinf(p.v_a) ? 1.0 : 1.0 + v_ds / p.v_a;
    return {p.specific_current() * std::exp(v_gs / p.slope_voltage()) * early, v_gs >= p.vth_mos};
}

double vgs_for_current(double i_ds, const MosfetParams& p) {
    if (!(i_ds > 0.0)) throw DomainError("vgs_for_current: drain current must be > 0");
    return p.slope_voltage() * std::log(i_ds / p.specific_current());
}

CellParams CellParams::clamped(double v_read, double r_series, double r_fefet_on) {
    CellParams c;
    c.v_read = v_read;
    c.r_series = r_series;
    c.r_fefet_on = r_fefet_on;
    c.i_on = v_read / (r_series + r_fefet_on);
    return c;
}

CellParams CellParams::nominal() {
    constexpr double v_read = 0.2;
    constexpr double i_target = 600e-9 / 1024.0;
    constexpr double r_on = 0.5e6;
    return clamped(v_read, v_read / i_target - r_on, r_on);
}

void CellParams::validate() const {
    if (!(i_on > i_off && i_off >= 0.0)) throw DomainError("cell requires i_on > i_off >= 0");
    if (!(r_series > 0.0)) throw DomainError("cell r_series must be > 0");
    if (!(vth_low < vth_high)) throw DomainError("cell requires vth_low < vth_high");
}

VariationSpec VariationSpec::zero() {
    VariationSpec s;
    s.sigma_vth_low = s.sigma_vth_high = 0.0;
    s.sigma_r_rel = s.sigma_mos_size_rel = s.sigma_mos_vth_rel = s.sigma_supply_rel = 0.0;
    return s;
}

bool VariationSpec::is_zero() const {
    return sigma_vth_low == 0.0 && sigma_vth_high == 0.0 && sigma_r_rel == 0.0 &&
           sigma_mos_size_rel == 0.0 && sigma_mos_vth_rel == 0.0 && sigma_supply_rel == 0.0;
}

void VariationSpec::validate() const {
    for (double s : {sigma_vth_low, sigma_vth_high, sigma_r_rel, sigma_mos_size_rel,
                     sigma_mos_vth_rel, sigma_supply_rel, fefet_attenuation}) {
        if (!(s >= 0.0)) throw DomainError("variation sigmas and attenuation must be >= 0");
    }
    if (!(truncation > 0.0)) throw DomainError("variation truncation must be > 0");
}

double VariationSpec::fefet_current_sigma(const CellParams& cell) const {
    const double overdrive = cell.v_gate_read - cell.vth_low;
    if (!(overdrive > 0.0)) throw DomainError("cell read gate voltage must exceed vth_low");
    return sigma_vth_low / overdrive;
}

double VariationSpec::cell_current_sigma(const CellParams& cell) const {
    const double f = fefet_current_sigma(cell);
    return std::sqrt(sigma_r_rel * sigma_r_rel + fefet_attenuation * f * f);
}

namespace {

// 1 + sigma * z with z truncated, resampled until the factor is positive.
double positive_factor(double sigma, double truncation, Rng& rng) {
    for (;;) {
        const double f = 1.0 + sigma * truncated_normal(rng, truncation);
        if (f > 0.0) return f;
    }
}

}  // namespace

CellParams sample_cell(const CellParams& nominal, const VariationSpec& spec, Rng& rng) {
    CellParams c = nominal;

    const double r_factor = positive_factor(spec.sigma_r_rel, spec.truncation, rng);

    // A low-V_TH shift changes the unclamped FeFET drive by -dV / overdrive; the
    // series resistor attenuates that by sqrt(k).
    const double overdrive = nominal.v_gate_read - nominal.vth_low;
    const double gain = std::sqrt(spec.fefet_attenuation) / overdrive;
    double dvth_low = 0.0;
    double fefet_factor = 1.0;
    for (;;) {
        dvth_low = spec.sigma_vth_low * truncated_normal(rng, spec.truncation);
        fefet_factor = 1.0 - gain * dvth_low;
        if (fefet_factor > 0.0) break;
    }
    const double dvth_high = spec.sigma_vth_high * truncated_normal(rng, spec.truncation);

    // Clamp regime: ON current follows 1/R, with the residual FeFET spread on top.
    c.r_series = nominal.r_series * r_factor;
    c.i_on = nominal.i_on * (nominal.r_series / c.r_series) * fefet_factor;
    c.vth_low = nominal.vth_low + dvth_low;
    c.vth_high = nominal.vth_high + dvth_high;
    if (nominal.i_off > 0.0) {
        // High-V_TH leakage is subthreshold; FeFET slope taken as 1.5 * 25.8 mV.
        c.i_off = std::min(nominal.i_off * std::exp(-dvth_high / (1.5 * 0.0258)), 0.5 * c.i_on);
    }
    return c;
}

GlobalSample sample_global(const VariationSpec& spec, const MosfetParams& ref, Rng& rng) {
    GlobalSample g;
    g.supply_scale = positive_factor(spec.sigma_supply_rel, spec.truncation, rng);
    g.mos_size_scale = positive_factor(spec.sigma_mos_size_rel, spec.truncation, rng);
    g.mos_vth_shift = ref.vth_mos * spec.sigma_mos_vth_rel * truncated_normal(rng, spec.truncation);
    return g;
}

MosfetParams apply_global(const MosfetParams& p, const GlobalSample& g) {
    MosfetParams q = p;
    q.w_over_l = p.w_over_l * g.mos_size_scale;
    q.vth_mos = p.vth_mos + g.mos_vth_shift;
    q.i0 = p.i0 * std::exp(-g.mos_vth_shift / p.slope_voltage());
    return q;
}

}  // namespace cosime::device
