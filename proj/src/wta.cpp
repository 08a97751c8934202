#include "cosime/wta.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "cosime/error.hpp"

namespace cosime::wta {

device::MosfetParams WtaConfig::default_mosfet() {
    device::MosfetParams p;
    p.eta = 1.0;
    return p;
}

void WtaConfig::validate() const {
    mosfet.validate();
    if (m == 1) throw DomainError("wta needs at least two rails");
    if (!(i_bias > 0.0)) throw DomainError("wta i_bias must be > 0");
    if (!(feedback_gain >= 0.0)) throw DomainError("wta feedback_gain must be >= 0");
    if (!(dominance_factor >= 1.0)) throw DomainError("wta dominance_factor must be >= 1");
}

std::size_t argmax(const std::vector<double>& v) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] > v[best]) best = i;
    return best;
}

double input_margin(const std::vector<double>& iz) {
    if (iz.size() < 2) return 0.0;
    const std::size_t w = argmax(iz);
    double second = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < iz.size(); ++i)
        if (i != w) second = std::max(second, iz[i]);
    return iz[w] > 0.0 ? (iz[w] - second) / iz[w] : 0.0;
}

namespace {

void check_inputs(const std::vector<double>& iz, const WtaConfig& cfg) {
    cfg.validate();
    if (iz.size() < 2) throw ShapeError("wta needs at least two input currents");
    if (cfg.m != 0 && iz.size() != cfg.m) {
        throw ShapeError("wta configured for " + std::to_string(cfg.m) + " rails, got " +
                         std::to_string(iz.size()) + " inputs");
    }
    double peak = 0.0;
    for (double x : iz) {
        if (!(x >= 0.0) || !std::isfinite(x)) throw DomainError("wta input currents must be >= 0");
        peak = std::max(peak, x);
    }
    if (!(peak > 0.0)) throw DomainError("wta needs at least one positive input current");
}

// Residuals of the static system, all dimensionless:
//   r_i = (K(V_c) (1 + V_i / V_A) - Iz_i) / max(Iz)     one per rail
//   r_c = ln(I_o) + logsumexp((V_i - V_c) / V_T) - ln(I_c)
struct System {
    const std::vector<double>& iz;
    const WtaConfig& cfg;
    double scale;
    double ln_is;
    double slope;  // eta V_T of the sourcing transistor
    double v_t;
    double v_a;

    System(const std::vector<double>& iz_, const WtaConfig& cfg_)
        : iz(iz_), cfg(cfg_), scale(*std::max_element(iz_.begin(), iz_.end())),
          ln_is(std::log(cfg_.mosfet.specific_current())), slope(cfg_.mosfet.slope_voltage()),
          v_t(cfg_.mosfet.v_t), v_a(cfg_.mosfet.v_a) {}

    double k_of(double vc) const { return std::exp(ln_is + vc / slope); }

    // Softmax weights of the output branches and the log of their sum.
    double log_sum(const std::vector<double>& v, double vc, std::vector<double>* weights) const {
        double top = -std::numeric_limits<double>::infinity();
        for (double x : v) top = std::max(top, (x - vc) / v_t);
        double acc = 0.0;
        for (double x : v) acc += std::exp((x - vc) / v_t - top);
        if (weights) {
            weights->resize(v.size());
            for (std::size_t i = 0; i < v.size(); ++i)
                (*weights)[i] = std::exp((v[i] - vc) / v_t - top) / acc;
        }
        return top + std::log(acc);
    }

    // Returns the max-norm; `merit` receives the squared 2-norm, for which the
    // Newton direction is always a descent direction.
    double residual(const std::vector<double>& v, double vc, std::vector<double>* r, double* rc,
                    double* merit = nullptr) const {
        const double k = k_of(vc);
        double norm = 0.0;
        double sq = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            const double ri = (k * (1.0 + v[i] / v_a) - iz[i]) / scale;
            if (r) (*r)[i] = ri;
            norm = std::max(norm, std::abs(ri));
            sq += ri * ri;
        }
        const double c = std::log(cfg.mosfet.specific_current()) + log_sum(v, vc, nullptr) -
                         std::log(cfg.i_bias);
        if (rc) *rc = c;
        if (merit) *merit = sq + c * c;
        return std::max(norm, std::abs(c));
    }
};

void fill_outputs(WtaSolution& s, const WtaConfig& cfg) {
    const double ln_io = std::log(cfg.mosfet.specific_current());
    s.i_out.resize(s.v_rails.size());
    for (std::size_t i = 0; i < s.v_rails.size(); ++i)
        s.i_out[i] = std::exp(ln_io + (s.v_rails[i] - s.v_common) / cfg.mosfet.v_t);
    s.winner = argmax(s.i_out);
}

}  // namespace

WtaSolution solve_network(const std::vector<double>& iz, const WtaConfig& cfg,
                          const WtaSolution* guess) {
    check_inputs(iz, cfg);
    const std::size_t m = iz.size();
    const System sys(iz, cfg);

    std::vector<double> v(m, 0.0);
    double vc = 0.0;
    if (guess && guess->v_rails.size() == m) {
        v = guess->v_rails;
        vc = guess->v_common;
    } else {
        // Single-rail closed form with V_i = 0: K(V_c) equals the mean input.
        // The rails then start on their own equations at that V_c.
        double mean = 0.0;
        for (double x : iz) mean += x;
        mean /= static_cast<double>(m);
        vc = sys.slope * (std::log(mean) - sys.ln_is);
        const double k = sys.k_of(vc);
        for (std::size_t i = 0; i < m; ++i) v[i] = sys.v_a * (iz[i] / k - 1.0);
    }

    std::vector<double> r(m), w(m), dv(m), v_try(m);
    double rc = 0.0;
    double merit = 0.0;
    double res = sys.residual(v, vc, &r, &rc, &merit);
    std::size_t it = 0;
    const double max_dvc = 10.0 * sys.slope;
    for (; it < cfg.newton_max_iter && res > cfg.newton_tol; ++it) {
        sys.log_sum(v, vc, &w);
        const double k = sys.k_of(vc);
        // Arrowhead Jacobian: a_i = dr_i/dV_i, b_i = dr_i/dV_c, dr_c/dV_i = w_i / V_T,
        // dr_c/dV_c = -1 / V_T. Eliminate the rails, solve for dV_c, back-substitute.
        double num = rc * sys.v_t;
        double den = 1.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double a = k / (sys.v_a * sys.scale);
            const double b = k * (1.0 + v[i] / sys.v_a) / (sys.slope * sys.scale);
            num -= w[i] * r[i] / a;
            den += w[i] * b / a;
        }
        double dvc = num / den;
        for (std::size_t i = 0; i < m; ++i) {
            const double a = k / (sys.v_a * sys.scale);
            const double b = k * (1.0 + v[i] / sys.v_a) / (sys.slope * sys.scale);
            dv[i] = (-r[i] - b * dvc) / a;
        }
        // Limit the exponential unknown; rails follow proportionally.
        double lambda = 1.0;
        if (std::abs(dvc) > max_dvc) lambda = max_dvc / std::abs(dvc);

        bool accepted = false;
        for (int halvings = 0; halvings <= 20; ++halvings) {
            for (std::size_t i = 0; i < m; ++i) v_try[i] = v[i] + lambda * dv[i];
            const double vc_try = vc + lambda * dvc;
            std::vector<double> r_try(m);
            double rc_try = 0.0;
            double merit_try = 0.0;
            const double res_try = sys.residual(v_try, vc_try, &r_try, &rc_try, &merit_try);
            if (std::isfinite(merit_try) && merit_try < merit) {
                merit = merit_try;
                v = v_try;
                vc = vc_try;
                r = std::move(r_try);
                rc = rc_try;
                res = res_try;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if (!accepted) break;  // no further decrease at machine precision
    }

    WtaSolution s;
    s.v_rails = std::move(v);
    s.v_common = vc;
    s.i_in = iz;
    s.newton_residual = res;
    s.newton_iterations = it;
    s.converged = res < 1e-10;
    s.margin = input_margin(iz);
    fill_outputs(s, cfg);
    return s;
}

WtaSolution solve_static(const std::vector<double>& iz, const WtaConfig& cfg) {
    WtaSolution s = solve_network(iz, cfg);
    if (cfg.feedback_gain == 0.0 || !s.converged) return s;

    const std::size_t lead = argmax(iz);
    s.winner_share.push_back(s.i_out[lead] / cfg.i_bias);
    std::vector<double> fed(iz.size());
    for (std::size_t pass = 1; pass <= cfg.feedback_iters; ++pass) {
        for (std::size_t i = 0; i < iz.size(); ++i) fed[i] = iz[i] + cfg.feedback_gain * s.i_out[i];
        WtaSolution next = solve_network(fed, cfg, &s);
        double change = 0.0;
        for (std::size_t i = 0; i < iz.size(); ++i)
            change = std::max(change, std::abs(next.i_out[i] - s.i_out[i]) / cfg.i_bias);
        next.feedback_iterations = pass;
        next.winner_share = std::move(s.winner_share);
        next.winner_share.push_back(next.i_out[lead] / cfg.i_bias);
        s = std::move(next);
        if (!s.converged) break;
        if (change < cfg.feedback_tol) break;
    }
    s.margin = input_margin(iz);
    return s;
}

Sensitivities small_signal_sensitivities(const WtaSolution& op, std::size_t rail,
                                         const WtaConfig& cfg) {
    const std::size_t m = op.v_rails.size();
    if (rail >= m) throw ShapeError("perturbed rail index out of range");
    double ic = 0.0;
    for (double x : op.i_out) ic += x;
    const double share = op.i_out[rail] / ic;
    const double izr = op.i_in[rail];
    const double v_a = cfg.mosfet.v_a;

    Sensitivities s;
    s.rail = rail;
    s.dv_dI.assign(m, -v_a * share / izr);
    s.dv_dI[rail] = (cfg.mosfet.slope_voltage() + v_a * (1.0 - share)) / izr;
    return s;
}

SensitivityCheck verify_sensitivities(const std::vector<double>& iz, const WtaConfig& cfg,
                                      double h, std::size_t rail) {
    if (rail >= iz.size()) throw ShapeError("perturbed rail index out of range");
    WtaConfig open = cfg;
    open.feedback_gain = 0.0;

    SensitivityCheck out;
    const WtaSolution base = solve_network(iz, open);
    std::vector<double> up = iz;
    std::vector<double> down = iz;
    const double step = h * iz[rail];
    up[rail] += step;
    down[rail] -= step;
    const WtaSolution plus = solve_network(up, open, &base);
    const WtaSolution minus = solve_network(down, open, &base);
    out.converged = base.converged && plus.converged && minus.converged;
    if (!out.converged) return out;

    out.analytic = small_signal_sensitivities(base, rail, open).dv_dI;
    out.finite_difference.resize(iz.size());
    for (std::size_t j = 0; j < iz.size(); ++j) {
        out.finite_difference[j] = (plus.v_rails[j] - minus.v_rails[j]) / (2.0 * step);
        const double dev = std::abs(out.finite_difference[j] - out.analytic[j]) /
                           std::abs(out.analytic[j]);
        out.max_rel_deviation = std::max(out.max_rel_deviation, dev);
    }
    return out;
}

Resolution resolve_winner(const std::vector<double>& iz, const WtaConfig& cfg) {
    Resolution res;
    res.solution = solve_static(iz, cfg);
    const WtaSolution& s = res.solution;
    res.winner = s.winner;
    if (!s.converged) return res;
    if (s.margin == 0.0) {
        res.winner = argmax(iz);
        return res;
    }
    res.resolvable = true;
    for (std::size_t j = 0; j < s.i_out.size(); ++j) {
        if (j != s.winner && s.i_out[s.winner] < cfg.dominance_factor * s.i_out[j]) {
            res.resolvable = false;
            break;
        }
    }
    return res;
}

}  // namespace cosime::wta
