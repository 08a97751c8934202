#pragma once

#include <cstddef>
#include <vector>

#include "cosime/device.hpp"

namespace cosime::wta {

/// M-rail current-mode winner-take-all. Each rail has a sourcing transistor
/// (gate on the common node V_c, drain at the rail node V_i) carrying the
/// input current, and an output transistor (gate V_i, source V_c) whose
/// currents sum to the bias I_c.
struct WtaConfig {
    std::size_t m = 0;              // rail count; 0 accepts any input length >= 2
    double i_bias = 100e-9;         // A, common-source bias I_c
    device::MosfetParams mosfet = default_mosfet();
    double feedback_gain = 1.0;     // output-to-input mirror gain alpha
    std::size_t feedback_iters = 200;
    double feedback_tol = 1e-6;     // relative change of the outputs
    double resolution_target = 0.01;
    double dominance_factor = 2.0;  // winner output / any other output, to be resolvable
    double newton_tol = 1e-14;
    std::size_t newton_max_iter = 200;

    /// Unit slope factor: the small-signal analysis assumes g = I / V_T.
    static device::MosfetParams default_mosfet();
    void validate() const;
};

struct WtaSolution {
    std::vector<double> v_rails;    // V_1..V_M
    double v_common = 0.0;          // V_c
    std::vector<double> i_out;      // I_o1..I_oM
    std::vector<double> i_in;       // rail input currents at the solution (after feedback)
    std::size_t winner = 0;
    double margin = 0.0;            // (largest - second largest input) / largest
    bool converged = false;
    double newton_residual = 0.0;
    std::size_t newton_iterations = 0;
    std::size_t feedback_iterations = 0;
    std::vector<double> winner_share;  // winner output share after each feedback pass
};

/// One damped-Newton solve of the network, no feedback mirrors.
/// `guess` (optional) warm-starts the solve.
WtaSolution solve_network(const std::vector<double>& iz, const WtaConfig& cfg,
                          const WtaSolution* guess = nullptr);

/// Network solve wrapped in the feedback-mirror fixed point iz <- iz + alpha * i_out.
WtaSolution solve_static(const std::vector<double>& iz, const WtaConfig& cfg);

/// Relative gap between the two largest inputs.
double input_margin(const std::vector<double>& iz);

/// Index of the largest value, lowest index on ties.
std::size_t argmax(const std::vector<double>& v);

struct Sensitivities {
    /// dV_j / dI_z(rail) for every j; entry `rail` is the perturbed rail itself.
    std::vector<double> dv_dI;
    std::size_t rail = 0;
};

/// Closed-form small-signal rail sensitivities at a solved operating point:
///   dV_r/dI_zr = (eta V_T + V_A (1 - I_or / I_c)) / I_zr
///   dV_j/dI_zr = -V_A (I_or / I_c) / I_zr
Sensitivities small_signal_sensitivities(const WtaSolution& op, std::size_t rail,
                                         const WtaConfig& cfg);

struct SensitivityCheck {
    std::vector<double> finite_difference;
    std::vector<double> analytic;
    double max_rel_deviation = 0.0;
    bool converged = false;
};

/// Central differences of the open-loop solver against the closed form.
SensitivityCheck verify_sensitivities(const std::vector<double>& iz, const WtaConfig& cfg,
                                      double h, std::size_t rail = 0);

struct Resolution {
    std::size_t winner = 0;
    bool resolvable = false;
    WtaSolution solution;
};

/// Full search decision: feedback solve, then dominance test on the outputs.
Resolution resolve_winner(const std::vector<double>& iz, const WtaConfig& cfg);

}  // namespace cosime::wta
