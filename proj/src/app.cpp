#include "cosime/app.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "cosime/error.hpp"
#include "cosime/parallel.hpp"
#include "cosime/rng.hpp"

namespace cosime::app {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Reads one JSON object section, remembering which keys were consumed so the
// leftovers can be reported as unknown.
class Section {
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw InputError("config section '" + path_ + "' must be an object");
    }

    template <class T>
    void get(const char* key, T& out) {
        seen_.insert(key);
        if (!j_.contains(key)) return;
        try {
            out = j_.at(key).get<T>();
        } catch (const json::exception&) {
            throw InputError("config key '" + qualified(key) + "' has the wrong type");
        }
    }

    void get_optional(const char* key, std::optional<double>& out) {
        seen_.insert(key);
        if (!j_.contains(key)) return;
        if (j_.at(key).is_null()) {
            out.reset();
            return;
        }
        double v = 0.0;
        get(key, v);
        out = v;
    }

    std::optional<Section> child(const char* key) {
        seen_.insert(key);
        if (!j_.contains(key)) return std::nullopt;
        return Section(j_.at(key), qualified(key));
    }

    void finish() const {
        for (const auto& [k, v] : j_.items()) {
            if (!seen_.count(k)) throw InputError("unknown config key '" + qualified(k) + "'");
        }
    }

private:
    std::string qualified(const std::string& key) const {
        return path_.empty() ? key : path_ + "." + key;
    }

    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

void read_mosfet(Section& s, device::MosfetParams& p) {
    s.get("i0", p.i0);
    s.get("w_over_l", p.w_over_l);
    s.get("eta", p.eta);
    s.get("v_t", p.v_t);
    s.get("v_a", p.v_a);
    s.get("vth_mos", p.vth_mos);
    s.finish();
}

json mosfet_json(const device::MosfetParams& p) {
    return {{"i0", p.i0},   {"w_over_l", p.w_over_l}, {"eta", p.eta},
            {"v_t", p.v_t}, {"v_a", p.v_a},           {"vth_mos", p.vth_mos}};
}

const char* scenario_name(variation::Scenario s) {
    switch (s) {
        case variation::Scenario::worst_case_pair: return "worst_case_pair";
        case variation::Scenario::similarity_sweep: return "similarity_sweep";
        case variation::Scenario::custom: return "custom";
    }
    return "?";
}

variation::Scenario scenario_from_name(const std::string& name) {
    if (name == "worst_case_pair") return variation::Scenario::worst_case_pair;
    if (name == "similarity_sweep") return variation::Scenario::similarity_sweep;
    throw InputError("unknown scenario '" + name + "' (worst_case_pair, similarity_sweep)");
}

const char* verbosity_name(Verbosity v) {
    switch (v) {
        case Verbosity::quiet: return "quiet";
        case Verbosity::normal: return "normal";
        case Verbosity::verbose: return "verbose";
    }
    return "?";
}

fs::path prepare_output(const RunConfig& cfg) {
    const fs::path dir(cfg.output_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw InputError("cannot create output directory " + dir.string() + ": " + ec.message());
    std::ofstream f(dir / "config.resolved.json");
    if (!f) throw InputError("cannot write into output directory " + dir.string());
    f << config_to_json(cfg).dump(2) << '\n';
    return dir;
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream f(path);
    if (!f) throw InputError("cannot write " + path.string());
    f << j.dump(2) << '\n';
}

class CsvWriter {
public:
    CsvWriter(const fs::path& path, const std::vector<std::string>& header) : f_(path) {
        if (!f_) throw InputError("cannot write " + path.string());
        f_ << std::setprecision(10);
        for (std::size_t i = 0; i < header.size(); ++i) f_ << (i ? "," : "") << header[i];
        f_ << '\n';
    }

    template <class... T>
    void row(const T&... cells) {
        std::size_t i = 0;
        ((f_ << (i++ ? "," : "") << cells), ...);
        f_ << '\n';
    }

private:
    std::ofstream f_;
};

}  // namespace

// ---- config ----------------------------------------------------------------

RunConfig config_from_json(const json& j) {
    RunConfig c;
    Section root(j, "");
    root.get("master_seed", c.master_seed);
    root.get("output_dir", c.output_dir);
    std::string verbosity = verbosity_name(c.verbosity);
    root.get("verbosity", verbosity);
    if (verbosity == "quiet") {
        c.verbosity = Verbosity::quiet;
    } else if (verbosity == "normal") {
        c.verbosity = Verbosity::normal;
    } else if (verbosity == "verbose") {
        c.verbosity = Verbosity::verbose;
    } else {
        throw InputError("verbosity must be quiet, normal or verbose");
    }

    if (auto dev = root.child("device")) {
        if (auto m = dev->child("mosfet")) read_mosfet(*m, c.mosfet);
        if (auto cell = dev->child("cell")) {
            double v_read = c.cell.v_read;
            double r_series = c.cell.r_series;
            double r_on = c.cell.r_fefet_on;
            cell->get("v_read", v_read);
            cell->get("r_series", r_series);
            cell->get("r_fefet_on", r_on);
            device::CellParams fresh = device::CellParams::clamped(v_read, r_series, r_on);
            fresh.i_off = c.cell.i_off;
            fresh.vth_low = c.cell.vth_low;
            fresh.vth_high = c.cell.vth_high;
            fresh.v_gate_read = c.cell.v_gate_read;
            cell->get("i_off", fresh.i_off);
            cell->get("vth_low", fresh.vth_low);
            cell->get("vth_high", fresh.vth_high);
            cell->get("v_gate_read", fresh.v_gate_read);
            cell->finish();
            c.cell = fresh;
        }
        dev->finish();
    }
    if (auto arr = root.child("array")) {
        arr->get("dim", c.dim);
        arr->get("iy_target", c.iy_target);
        arr->finish();
    }
    if (auto tl = root.child("translinear")) {
        tl->get("v0", c.translinear.v0);
        tl->get("mirror_ratio", c.translinear.mirror_ratio);
        tl->get("floor_margin", c.translinear.floor_margin);
        tl->get("iy_ref", c.translinear.iy_ref);
        tl->get_optional("ix_min", c.translinear.ix_min);
        tl->get_optional("ix_max", c.translinear.ix_max);
        tl->get("soft_saturation", c.translinear.soft_saturation);
        tl->finish();
    }
    c.translinear.mosfet = c.mosfet;
    if (auto w = root.child("wta")) {
        w->get("i_bias", c.wta.i_bias);
        w->get("feedback_gain", c.wta.feedback_gain);
        w->get("feedback_iters", c.wta.feedback_iters);
        w->get("feedback_tol", c.wta.feedback_tol);
        w->get("resolution_target", c.wta.resolution_target);
        w->get("dominance_factor", c.wta.dominance_factor);
        w->get("newton_tol", c.wta.newton_tol);
        w->get("newton_max_iter", c.wta.newton_max_iter);
        if (auto m = w->child("mosfet")) read_mosfet(*m, c.wta.mosfet);
        w->finish();
    }
    if (auto v = root.child("variation")) {
        auto& s = c.variation;
        v->get("sigma_vth_low", s.sigma_vth_low);
        v->get("sigma_vth_high", s.sigma_vth_high);
        v->get("sigma_r_rel", s.sigma_r_rel);
        v->get("sigma_mos_size_rel", s.sigma_mos_size_rel);
        v->get("sigma_mos_vth_rel", s.sigma_mos_vth_rel);
        v->get("sigma_supply_rel", s.sigma_supply_rel);
        v->get("fefet_attenuation", s.fefet_attenuation);
        v->get("truncation", s.truncation);
        v->get("rng_seed", s.rng_seed);
        v->get("trials", c.trials);
        std::string scenario = scenario_name(c.scenario);
        v->get("scenario", scenario);
        c.scenario = scenario_from_name(scenario);
        v->get("sweep_competitor_ones", c.sweep_competitor_ones);
        v->get("unresolvable_is_error", c.unresolvable_is_error);
        v->get("keep_trial_log", c.keep_trial_log);
        v->finish();
    }
    if (auto co = root.child("cost")) {
        auto& p = c.cost;
        co->get("energy_per_bit", p.energy_per_bit);
        co->get("latency", p.latency);
        co->get("area_ref", p.area_ref);
        co->get("wta_energy_share", p.wta_energy_share);
        co->get("translinear_energy_share", p.translinear_energy_share);
        co->get("rows_ref", p.rows_ref);
        co->get("dim_ref", p.dim_ref);
        co->get("area_rows_ref", p.area_rows_ref);
        co->get("area_dim_ref", p.area_dim_ref);
        co->get("rows", c.cost_rows);
        co->get("baselines_csv", c.baselines_csv);
        co->finish();
    }
    if (auto sw = root.child("sweep")) {
        sw->get("rows", c.sweep.rows);
        sw->get("dims", c.sweep.dims);
        sw->get("margins", c.sweep.margins);
        sw->get("margin_trials", c.sweep.margin_trials);
        sw->get("margin_rails", c.sweep.margin_rails);
        sw->finish();
    }
    if (auto h = root.child("hdc")) {
        auto& s = c.hdc;
        h->get("train_csv", s.train_csv);
        h->get("test_csv", s.test_csv);
        h->get("surrogate", s.surrogate);
        h->get("surrogate_seed", s.surrogate_seed);
        h->get("dims", s.dims);
        h->get("backends", s.backends);
        h->get("projection_seed", s.projection_seed);
        h->get("train_dim", s.train_dim);
        h->get("quantization", s.quantization);
        h->get("injection_rate", s.injection_rate);
        h->get("injection_mode", s.injection_mode);
        h->finish();
    }
    if (auto cal = root.child("calibration")) {
        auto& s = c.calibration;
        cal->get("i_bias", s.i_bias);
        cal->get("dominance_factor", s.dominance_factor);
        cal->get("fefet_attenuation", s.fefet_attenuation);
        cal->get("trials", s.trials);
        cal->get("target_accuracy", s.target_accuracy);
        cal->finish();
    }
    root.finish();

    c.mosfet.validate();
    c.cell.validate();
    c.translinear.validate();
    c.wta.validate();
    c.variation.validate();
    c.cost.validate();
    if (c.dim < 8) throw DomainError("array.dim must be >= 8");
    if (!(c.iy_target >= 0.0)) throw DomainError("array.iy_target must be >= 0");
    if (c.trials < 1) throw DomainError("variation.trials must be >= 1");
    for (const auto& b : c.hdc.backends) hdc::backend_from_name(b);
    hdc::injection_from_name(c.hdc.injection_mode);
    return c;
}

json config_to_json(const RunConfig& c) {
    json j;
    j["master_seed"] = c.master_seed;
    j["output_dir"] = c.output_dir;
    j["verbosity"] = verbosity_name(c.verbosity);
    j["device"] = {{"mosfet", mosfet_json(c.mosfet)},
                   {"cell",
                    {{"v_read", c.cell.v_read},
                     {"r_series", c.cell.r_series},
                     {"r_fefet_on", c.cell.r_fefet_on},
                     {"i_off", c.cell.i_off},
                     {"vth_low", c.cell.vth_low},
                     {"vth_high", c.cell.vth_high},
                     {"v_gate_read", c.cell.v_gate_read}}}};
    j["array"] = {{"dim", c.dim}, {"iy_target", c.iy_target}};
    const auto& t = c.translinear;
    j["translinear"] = {{"v0", t.v0},
                        {"mirror_ratio", t.mirror_ratio},
                        {"floor_margin", t.floor_margin},
                        {"iy_ref", t.iy_ref},
                        {"ix_min", t.ix_min ? json(*t.ix_min) : json(nullptr)},
                        {"ix_max", t.ix_max ? json(*t.ix_max) : json(nullptr)},
                        {"soft_saturation", t.soft_saturation}};
    const auto& w = c.wta;
    j["wta"] = {{"i_bias", w.i_bias},
                {"feedback_gain", w.feedback_gain},
                {"feedback_iters", w.feedback_iters},
                {"feedback_tol", w.feedback_tol},
                {"resolution_target", w.resolution_target},
                {"dominance_factor", w.dominance_factor},
                {"newton_tol", w.newton_tol},
                {"newton_max_iter", w.newton_max_iter},
                {"mosfet", mosfet_json(w.mosfet)}};
    const auto& s = c.variation;
    j["variation"] = {{"sigma_vth_low", s.sigma_vth_low},
                      {"sigma_vth_high", s.sigma_vth_high},
                      {"sigma_r_rel", s.sigma_r_rel},
                      {"sigma_mos_size_rel", s.sigma_mos_size_rel},
                      {"sigma_mos_vth_rel", s.sigma_mos_vth_rel},
                      {"sigma_supply_rel", s.sigma_supply_rel},
                      {"fefet_attenuation", s.fefet_attenuation},
                      {"truncation", s.truncation},
                      {"rng_seed", s.rng_seed},
                      {"trials", c.trials},
                      {"scenario", scenario_name(c.scenario)},
                      {"sweep_competitor_ones", c.sweep_competitor_ones},
                      {"unresolvable_is_error", c.unresolvable_is_error},
                      {"keep_trial_log", c.keep_trial_log}};
    const auto& p = c.cost;
    j["cost"] = {{"energy_per_bit", p.energy_per_bit},
                 {"latency", p.latency},
                 {"area_ref", p.area_ref},
                 {"wta_energy_share", p.wta_energy_share},
                 {"translinear_energy_share", p.translinear_energy_share},
                 {"rows_ref", p.rows_ref},
                 {"dim_ref", p.dim_ref},
                 {"area_rows_ref", p.area_rows_ref},
                 {"area_dim_ref", p.area_dim_ref},
                 {"rows", c.cost_rows},
                 {"baselines_csv", c.baselines_csv}};
    j["sweep"] = {{"rows", c.sweep.rows},
                  {"dims", c.sweep.dims},
                  {"margins", c.sweep.margins},
                  {"margin_trials", c.sweep.margin_trials},
                  {"margin_rails", c.sweep.margin_rails}};
    const auto& h = c.hdc;
    j["hdc"] = {{"train_csv", h.train_csv},
                {"test_csv", h.test_csv},
                {"surrogate", h.surrogate},
                {"surrogate_seed", h.surrogate_seed},
                {"dims", h.dims},
                {"backends", h.backends},
                {"projection_seed", h.projection_seed},
                {"train_dim", h.train_dim},
                {"quantization", h.quantization},
                {"injection_rate", h.injection_rate},
                {"injection_mode", h.injection_mode}};
    const auto& cal = c.calibration;
    j["calibration"] = {{"i_bias", cal.i_bias},
                        {"dominance_factor", cal.dominance_factor},
                        {"fefet_attenuation", cal.fefet_attenuation},
                        {"trials", cal.trials},
                        {"target_accuracy", cal.target_accuracy}};
    return j;
}

std::string resolve_config_path(const std::string& path) {
    if (fs::exists(path) || fs::path(path).is_absolute()) return path;
    if (const char* env = std::getenv("COSIME_CONFIG_PATH")) {
        std::stringstream dirs(env);
        std::string dir;
        while (std::getline(dirs, dir, ':')) {
            if (dir.empty()) continue;
            const fs::path candidate = fs::path(dir) / path;
            if (fs::exists(candidate)) return candidate.string();
        }
    }
    return path;
}

RunConfig load_config(const std::string& path) {
    const std::string resolved = resolve_config_path(path);
    std::ifstream f(resolved);
    if (!f) throw InputError("cannot open config: " + path);
    json j;
    try {
        j = json::parse(f);
    } catch (const json::parse_error& e) {
        throw InputError("config " + resolved + " is not valid JSON: " + e.what());
    }
    return config_from_json(j);
}

variation::McExperiment make_experiment(const RunConfig& c) {
    variation::McExperiment e;
    e.trials = c.trials;
    e.spec = c.variation;
    e.scenario = c.scenario;
    e.dim = c.dim;
    e.master_seed = c.master_seed;
    e.cell = c.cell;
    e.translinear = c.translinear;
    e.wta = c.wta;
    e.iy_target = c.iy_target;
    e.unresolvable_is_error = c.unresolvable_is_error;
    e.sweep_competitor_ones = c.sweep_competitor_ones;
    e.keep_trial_log = c.keep_trial_log;
    return e;
}

hdc::EvalSettings make_eval_settings(const RunConfig& c) {
    hdc::EvalSettings s;
    s.projection_seed = c.hdc.projection_seed;
    s.quantization = c.hdc.quantization;
    s.am.cell = c.cell;
    s.am.translinear = c.translinear;
    s.am.wta = c.wta;
    s.am.iy_target = c.iy_target;
    return s;
}

// ---- search ----------------------------------------------------------------

json search_report(const RunConfig& cfg, const std::vector<BinaryVector>& stored,
                   const BinaryVector& query) {
    if (stored.size() < 2) throw ShapeError("need at least two stored words");
    if (query.size() != stored.front().size()) {
        throw ShapeError("query length " + std::to_string(query.size()) +
                         " differs from stored word length " + std::to_string(stored.front().size()));
    }
    array::ArrayGeometry g;
    g.rows = stored.size();
    g.dim = query.size();
    g.scale_factor = cfg.iy_target > 0.0 ? array::scale_for_target(stored, cfg.cell, cfg.iy_target) : 1.0;
    const auto arr = array::program(stored, g, cfg.cell, device::VariationSpec::zero());
    const auto rc = array::row_currents(arr, query);
    const auto sims = translinear::row_similarities(rc.ix, rc.iy, cfg.translinear);

    std::vector<double> iz;
    std::vector<double> oracle;
    json rows = json::array();
    for (std::size_t r = 0; r < stored.size(); ++r) {
        iz.push_back(sims[r].iz);
        const auto cos2 = hdc::squared_cosine(query, stored[r]);
        oracle.push_back(cos2.value);
        const auto& reg = sims[r].region;
        rows.push_back({{"row", r},
                        {"ix", rc.ix[r]},
                        {"iy", rc.iy[r]},
                        {"iz", sims[r].iz},
                        {"oracle_cos2", cos2.value},
                        {"zero_vector", cos2.zero_vector},
                        {"region",
                         {{"in_region", reg.in_region},
                          {"below_floor", reg.below_floor},
                          {"above_threshold", reg.above_threshold},
                          {"headroom_ok", reg.headroom_ok},
                          {"loop_residual", reg.loop_residual},
                          {"vgs", reg.vgs}}}});
    }

    json out;
    out["rows"] = rows;
    out["scale_factor"] = g.scale_factor;
    const std::size_t oracle_winner = wta::argmax(oracle);
    out["oracle_winner"] = oracle_winner;
    if (*std::max_element(iz.begin(), iz.end()) <= 0.0) {
        out["winner"] = 0;
        out["resolvable"] = false;
        out["oracle_agreement"] = oracle_winner == 0;
        out["wta"] = nullptr;
        return out;
    }
    const auto res = wta::resolve_winner(iz, cfg.wta);
    const auto& sol = res.solution;
    out["winner"] = res.winner;
    out["resolvable"] = res.resolvable;
    out["oracle_agreement"] = res.winner == oracle_winner;
    out["wta"] = {{"v_rails", sol.v_rails},
                  {"v_common", sol.v_common},
                  {"i_out", sol.i_out},
                  {"i_in", sol.i_in},
                  {"margin", sol.margin},
                  {"converged", sol.converged},
                  {"newton_residual", sol.newton_residual},
                  {"newton_iterations", sol.newton_iterations},
                  {"feedback_iterations", sol.feedback_iterations}};
    return out;
}

json cmd_search(const RunConfig& cfg, const std::string& stored_path, const std::string& query_path) {
    const auto stored = load_words(stored_path);
    const auto queries = load_words(query_path);
    if (queries.front().size() != stored.front().size()) {
        throw ShapeError("query length " + std::to_string(queries.front().size()) +
                         " differs from stored word length " + std::to_string(stored.front().size()));
    }
    const fs::path dir = prepare_output(cfg);
    json report;
    report["command"] = "search";
    report["searches"] = json::array();
    CsvWriter csv(dir / "search.csv",
                  {"query", "row", "ix", "iy", "iz", "oracle_cos2", "in_region", "winner"});
    for (std::size_t q = 0; q < queries.size(); ++q) {
        json s = search_report(cfg, stored, queries[q]);
        for (const auto& r : s["rows"]) {
            csv.row(q, r["row"].get<std::size_t>(), r["ix"].get<double>(), r["iy"].get<double>(),
                    r["iz"].get<double>(), r["oracle_cos2"].get<double>(),
                    r["region"]["in_region"].get<bool>() ? 1 : 0, s["winner"].get<std::size_t>());
        }
        s["query"] = q;
        report["searches"].push_back(std::move(s));
    }
    write_json(dir / "search.json", report);
    return report;
}

// ---- Monte Carlo ------------------------------------------------------------

json cmd_mc(const RunConfig& cfg) {
    const fs::path dir = prepare_output(cfg);
    const auto result = variation::run_mc(make_experiment(cfg));
    json report;
    report["command"] = "mc";
    report["scenario"] = scenario_name(cfg.scenario);
    report["trials"] = result.trials;
    report["correct"] = result.correct;
    report["accuracy"] = result.accuracy;
    report["nonconverged"] = result.nonconverged;
    report["unresolvable"] = result.unresolvable;
    json bins = json::array();
    CsvWriter csv(dir / "mc_bins.csv", {"cos", "lower", "upper", "trials", "errors", "error_rate"});
    for (const auto& b : result.error_rate_by_bin) {
        bins.push_back({{"cos", b.cos},
                        {"lower", b.lower},
                        {"upper", b.upper},
                        {"trials", b.trials},
                        {"errors", b.errors},
                        {"error_rate", b.error_rate}});
        csv.row(b.cos, b.lower, b.upper, b.trials, b.errors, b.error_rate);
    }
    report["error_rate_by_bin"] = bins;
    if (cfg.keep_trial_log) {
        CsvWriter log(dir / "mc_trials.csv",
                      {"trial", "seed", "winner", "correct", "resolvable", "converged", "margin"});
        for (const auto& t : result.trial_log)
            log.row(t.trial, t.seed, t.winner, t.correct ? 1 : 0, t.resolvable ? 1 : 0,
                    t.converged ? 1 : 0, t.margin);
    }
    write_json(dir / "mc.json", report);
    return report;
}

// ---- sweeps ----------------------------------------------------------------

SweepAxis sweep_axis_from_name(const std::string& name) {
    if (name == "rows") return SweepAxis::rows;
    if (name == "dims") return SweepAxis::dims;
    if (name == "margin") return SweepAxis::margin;
    throw InputError("unknown sweep axis '" + name + "' (rows, dims, margin)");
}

std::vector<MarginPoint> margin_sweep(const std::vector<double>& margins, std::size_t trials,
                                      std::size_t rails, const wta::WtaConfig& cfg,
                                      std::uint64_t seed) {
    if (rails < 2) throw DomainError("margin sweep needs at least two rails");
    std::vector<MarginPoint> out(margins.size());
    for (std::size_t k = 0; k < margins.size(); ++k) {
        if (!(margins[k] > 0.0 && margins[k] < 1.0)) throw DomainError("margins must be in (0, 1)");
        out[k].margin = margins[k];
        out[k].trials = trials;
    }
    std::vector<char> ok(margins.size() * trials, 0);
    parallel_for(ok.size(), [&](std::size_t idx) {
        const std::size_t k = idx / trials;
        Rng rng(derive_seed(seed, idx));
        std::uniform_real_distribution<double> top(50e-9, 1000e-9);
        std::uniform_real_distribution<double> rest(0.05, 1.0);
        std::uniform_int_distribution<std::size_t> slot(0, rails - 1);
        std::vector<double> iz(rails);
        const double largest = top(rng);
        const std::size_t w = slot(rng);
        const double second = largest * (1.0 - margins[k]);
        std::size_t s = slot(rng);
        while (s == w) s = slot(rng);
        for (std::size_t i = 0; i < rails; ++i) iz[i] = second * rest(rng);
        iz[w] = largest;
        iz[s] = second;
        const auto r = wta::resolve_winner(iz, cfg);
        ok[idx] = r.resolvable && r.winner == w && r.solution.converged;
    });
    for (std::size_t idx = 0; idx < ok.size(); ++idx)
        if (ok[idx]) ++out[idx / trials].correct;
    for (auto& p : out) p.correctness = static_cast<double>(p.correct) / static_cast<double>(p.trials);
    return out;
}

json cmd_sweep(const RunConfig& cfg, SweepAxis axis) {
    const fs::path dir = prepare_output(cfg);
    json report;
    report["command"] = "sweep";
    json points = json::array();
    if (axis == SweepAxis::margin) {
        report["axis"] = "margin";
        const auto pts = margin_sweep(cfg.sweep.margins, cfg.sweep.margin_trials,
                                      cfg.sweep.margin_rails, cfg.wta, cfg.master_seed);
        CsvWriter csv(dir / "sweep_margin.csv", {"margin", "trials", "correct", "correctness"});
        for (const auto& p : pts) {
            points.push_back({{"margin", p.margin},
                              {"trials", p.trials},
                              {"correct", p.correct},
                              {"correctness", p.correctness}});
            csv.row(p.margin, p.trials, p.correct, p.correctness);
        }
    } else {
        const bool rows_axis = axis == SweepAxis::rows;
        report["axis"] = rows_axis ? "rows" : "dims";
        const auto& values = rows_axis ? cfg.sweep.rows : cfg.sweep.dims;
        CsvWriter csv(dir / (rows_axis ? "sweep_rows.csv" : "sweep_dims.csv"),
                      {"rows", "dim", "energy_j", "latency_s", "area_m2", "energy_per_bit_j"});
        for (std::size_t v : values) {
            array::ArrayGeometry g;
            g.rows = rows_axis ? v : cfg.cost_rows;
            g.dim = rows_axis ? cfg.dim : v;
            const auto r = cost::estimate(g, cfg.cost);
            points.push_back({{"rows", r.rows},
                              {"dim", r.dim},
                              {"energy", r.energy},
                              {"latency", r.latency},
                              {"area", r.area},
                              {"energy_per_bit", r.energy_per_bit}});
            csv.row(r.rows, r.dim, r.energy, r.latency, r.area, r.energy_per_bit);
        }
    }
    report["points"] = points;
    write_json(dir / "sweep.json", report);
    return report;
}

// ---- cost ------------------------------------------------------------------

json cmd_cost(const RunConfig& cfg) {
    const fs::path dir = prepare_output(cfg);
    array::ArrayGeometry g;
    g.rows = cfg.cost_rows;
    g.dim = cfg.dim;
    const auto r = cost::estimate(g, cfg.cost);
    const auto baselines =
        cfg.baselines_csv.empty() ? cost::bundled_baselines() : cost::load_baselines(cfg.baselines_csv);
    const auto ratios = cost::compare_to_baselines(r, baselines);

    json report;
    report["command"] = "cost";
    report["estimate"] = {{"rows", r.rows},
                          {"dim", r.dim},
                          {"energy", r.energy},
                          {"energy_per_bit", r.energy_per_bit},
                          {"latency", r.latency},
                          {"area", r.area},
                          {"area_per_cell", r.area_per_cell},
                          {"energy_wta", r.energy_wta},
                          {"energy_translinear", r.energy_translinear},
                          {"energy_other", r.energy_other}};
    json rows = json::array();
    CsvWriter csv(dir / "cost_ratios.csv", {"baseline", "energy_ratio", "latency_ratio", "area_ratio"});
    for (const auto& row : ratios) {
        rows.push_back({{"baseline", row.name},
                        {"energy_ratio", row.energy_ratio},
                        {"latency_ratio", row.latency_ratio},
                        {"area_ratio", row.area_ratio}});
        csv.row(row.name, row.energy_ratio, row.latency_ratio, row.area_ratio);
    }
    report["ratios"] = rows;
    write_json(dir / "cost.json", report);
    return report;
}

// ---- HDC -------------------------------------------------------------------

HdcAction hdc_action_from_name(const std::string& name) {
    if (name == "train") return HdcAction::train;
    if (name == "eval") return HdcAction::eval;
    throw InputError("unknown hdc action '" + name + "' (train, eval)");
}

hdc::DatasetSplit load_split(const RunConfig& cfg) {
    const auto& h = cfg.hdc;
    if (h.train_csv.empty()) return hdc::make_surrogate(h.surrogate, h.surrogate_seed);
    if (h.test_csv.empty()) throw InputError("hdc.test_csv is required when hdc.train_csv is set");
    hdc::DatasetSplit split;
    split.name = fs::path(h.train_csv).stem().string();
    split.train = hdc::load_csv(h.train_csv);
    split.test = hdc::load_csv(h.test_csv);
    if (split.train.n_features() != split.test.n_features())
        throw ShapeError("train and test feature counts differ");
    const int classes = std::max(split.train.num_classes, split.test.num_classes);
    split.train.num_classes = classes;
    split.test.num_classes = classes;
    return split;
}

json cmd_hdc(const RunConfig& cfg, HdcAction action) {
    const auto split = load_split(cfg);
    const fs::path dir = prepare_output(cfg);
    json report;
    report["command"] = action == HdcAction::train ? "hdc train" : "hdc eval";
    report["dataset"] = split.name;
    report["train_samples"] = split.train.size();
    report["test_samples"] = split.test.size();

    if (action == HdcAction::train) {
        hdc::EncoderConfig ec;
        ec.projection_seed = cfg.hdc.projection_seed;
        ec.dim = cfg.hdc.train_dim;
        ec.quantization = cfg.hdc.quantization;
        const auto model = hdc::train_single_pass(split.train, ec);
        std::ofstream f(dir / "model.json");
        if (!f) throw InputError("cannot write model file");
        f << hdc::model_to_json(model) << '\n';
        report["model"] = (dir / "model.json").string();
        report["dim"] = ec.dim;
        report["classes"] = model.classes.size();
        write_json(dir / "hdc_train.json", report);
        return report;
    }

    std::vector<hdc::Backend> backends;
    for (const auto& b : cfg.hdc.backends) backends.push_back(hdc::backend_from_name(b));
    const auto rows = hdc::evaluate(split, cfg.hdc.dims, backends, make_eval_settings(cfg));
    json table = json::array();
    CsvWriter csv(dir / "hdc_accuracy.csv", {"dim", "metric", "accuracy", "queries", "am_failures"});
    for (const auto& r : rows) {
        table.push_back({{"dim", r.dim},
                         {"metric", r.metric},
                         {"accuracy", r.accuracy},
                         {"queries", r.queries},
                         {"am_failures", r.am_failures}});
        csv.row(r.dim, r.metric, r.accuracy, r.queries, r.am_failures);
    }
    report["accuracy"] = table;

    if (cfg.hdc.injection_rate > 0.0) {
        const std::size_t dim = cfg.hdc.dims.empty() ? 1024 : cfg.hdc.dims.back();
        hdc::EncoderConfig ec;
        ec.projection_seed = cfg.hdc.projection_seed;
        ec.dim = dim;
        ec.quantization = cfg.hdc.quantization;
        const auto model = hdc::train_single_pass(split.train, ec);
        const auto queries = model.encoder.encode_all(split.test.features);
        std::vector<std::vector<double>> scores;
        for (const auto& q : queries) {
            std::vector<double> s;
            for (const auto& c : model.classes) s.push_back(hdc::squared_cosine(q, c).value);
            scores.push_back(std::move(s));
        }
        auto accuracy = [&](const std::vector<std::size_t>& pred) {
            std::size_t hits = 0;
            for (std::size_t i = 0; i < pred.size(); ++i)
                if (static_cast<int>(pred[i]) == split.test.labels[i]) ++hits;
            return static_cast<double>(hits) / static_cast<double>(pred.size());
        };
        const auto mode = hdc::injection_from_name(cfg.hdc.injection_mode);
        const auto clean = hdc::inject_am_errors(scores, 0.0, mode, cfg.master_seed);
        const auto noisy = hdc::inject_am_errors(scores, cfg.hdc.injection_rate, mode, cfg.master_seed);
        const double a0 = accuracy(clean.predictions);
        const double a1 = accuracy(noisy.predictions);
        report["injection"] = {{"dim", dim},
                               {"mode", cfg.hdc.injection_mode},
                               {"rate", cfg.hdc.injection_rate},
                               {"flip_rate", noisy.flip_rate},
                               {"noise_sigma", noisy.noise_sigma},
                               {"clean_accuracy", a0},
                               {"injected_accuracy", a1},
                               {"drop_points", 100.0 * (a0 - a1)}};
    }
    write_json(dir / "hdc_eval.json", report);
    return report;
}

// ---- calibration -----------------------------------------------------------

std::vector<CalibrationPoint> calibration_grid(const RunConfig& cfg) {
    std::vector<CalibrationPoint> out;
    for (double att : cfg.calibration.fefet_attenuation) {
        for (double ib : cfg.calibration.i_bias) {
            for (double dom : cfg.calibration.dominance_factor) {
                auto exp = make_experiment(cfg);
                exp.scenario = variation::Scenario::worst_case_pair;
                exp.trials = cfg.calibration.trials;
                exp.spec.fefet_attenuation = att;
                exp.wta.i_bias = ib;
                exp.wta.dominance_factor = dom;
                exp.keep_trial_log = false;
                const auto r = variation::run_mc(exp);
                out.push_back({ib, dom, att, r.accuracy});
            }
        }
    }
    return out;
}

json cmd_calibrate(const RunConfig& cfg) {
    const fs::path dir = prepare_output(cfg);
    const auto grid = calibration_grid(cfg);
    if (grid.empty()) throw InputError("calibration grid is empty");
    json points = json::array();
    CsvWriter csv(dir / "calibration.csv",
                  {"fefet_attenuation", "i_bias", "dominance_factor", "accuracy"});
    const CalibrationPoint* best = &grid.front();
    for (const auto& p : grid) {
        points.push_back({{"fefet_attenuation", p.fefet_attenuation},
                          {"i_bias", p.i_bias},
                          {"dominance_factor", p.dominance_factor},
                          {"accuracy", p.accuracy}});
        csv.row(p.fefet_attenuation, p.i_bias, p.dominance_factor, p.accuracy);
        // Ties keep the configured values, so an insensitive knob stays put.
        const double t = cfg.calibration.target_accuracy;
        const double d = std::abs(p.accuracy - t);
        const double d_best = std::abs(best->accuracy - t);
        const bool current = p.i_bias == cfg.wta.i_bias &&
                             p.dominance_factor == cfg.wta.dominance_factor &&
                             p.fefet_attenuation == cfg.variation.fefet_attenuation;
        if (d < d_best || (d == d_best && current)) best = &p;
    }
    json report;
    report["command"] = "calibrate";
    report["target_accuracy"] = cfg.calibration.target_accuracy;
    report["trials_per_point"] = cfg.calibration.trials;
    report["grid"] = points;
    report["chosen"] = {{"wta", {{"i_bias", best->i_bias}, {"dominance_factor", best->dominance_factor}}},
                        {"variation", {{"fefet_attenuation", best->fefet_attenuation}}},
                        {"accuracy", best->accuracy}};
    write_json(dir / "calibration.json", report);
    return report;
}

// ---- dataset export -------------------------------------------------------

json cmd_dataset(const RunConfig& cfg, const std::string& name) {
    const auto split = hdc::make_surrogate(name, cfg.hdc.surrogate_seed);
    const fs::path dir = prepare_output(cfg);
    const fs::path train = dir / (name + "_train.csv");
    const fs::path test = dir / (name + "_test.csv");
    hdc::write_csv(split.train, train.string());
    hdc::write_csv(split.test, test.string());
    json report = {{"command", "dataset"},
                   {"name", name},
                   {"train_csv", train.string()},
                   {"test_csv", test.string()},
                   {"features", split.train.n_features()},
                   {"classes", split.train.num_classes},
                   {"train_samples", split.train.size()},
                   {"test_samples", split.test.size()}};
    write_json(dir / "dataset.json", report);
    return report;
}

}  // namespace cosime::app
