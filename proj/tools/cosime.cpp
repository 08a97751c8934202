// Command-line driver for the COSIME simulator.
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cosime/app.hpp"
#include "cosime/error.hpp"

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kInput = 2, kNumerical = 3 };

struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<std::size_t> trials;
    bool quiet = false;
    bool verbose = false;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("-c,--config", c.config, "JSON run configuration")->required();
    cmd->add_option("--seed", c.seed, "override master_seed");
    cmd->add_option("-o,--out", c.out, "output directory");
    cmd->add_option("--trials", c.trials, "override Monte Carlo trial count");
    auto* q = cmd->add_flag("-q,--quiet", c.quiet, "print nothing on success");
    cmd->add_flag("-v,--verbose", c.verbose, "print the full report")->excludes(q);
}

cosime::app::RunConfig resolve(const Common& c) {
    auto cfg = cosime::app::load_config(c.config);
    if (c.seed) cfg.master_seed = *c.seed;
    if (c.out) cfg.output_dir = *c.out;
    if (c.trials) {
        if (*c.trials < 1) throw cosime::InputError("--trials must be >= 1");
        cfg.trials = *c.trials;
    }
    if (c.quiet) cfg.verbosity = cosime::app::Verbosity::quiet;
    if (c.verbose) cfg.verbosity = cosime::app::Verbosity::verbose;
    return cfg;
}

void print_summary(const cosime::app::RunConfig& cfg, const nlohmann::json& report) {
    using cosime::app::Verbosity;
    if (cfg.verbosity == Verbosity::quiet) return;
    if (cfg.verbosity == Verbosity::verbose) {
        std::cout << report.dump(2) << '\n';
        return;
    }
    const std::string cmd = report.value("command", "");
    if (cmd == "search") {
        for (const auto& s : report["searches"])
            std::cout << "query " << s["query"] << ": winner " << s["winner"]
                      << (s["resolvable"].get<bool>() ? "" : " (unresolvable)")
                      << ", oracle " << s["oracle_winner"] << '\n';
    } else if (cmd == "mc") {
        std::cout << report["scenario"].get<std::string>() << ": accuracy " << report["accuracy"]
                  << " over " << report["trials"] << " trials\n";
        for (const auto& b : report["error_rate_by_bin"])
            std::cout << "  cos " << b["cos"] << "  error rate " << b["error_rate"] << '\n';
    } else if (cmd == "calibrate") {
        std::cout << "chosen " << report["chosen"].dump() << '\n';
    } else if (cmd == "hdc eval") {
        for (const auto& r : report["accuracy"])
            std::cout << "D=" << r["dim"] << " " << r["metric"].get<std::string>() << " "
                      << r["accuracy"] << '\n';
        if (report.contains("injection")) std::cout << "injection " << report["injection"].dump() << '\n';
    } else {
        std::cout << report.dump() << '\n';
    }
    std::cout << "outputs written to " << cfg.output_dir << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"COSIME cosine-similarity associative memory simulator"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "cosime 0.1.0");

    Common common;
    std::string stored_path;
    std::string query_path;
    std::string axis;
    std::string action;
    std::string dataset;
    std::string test_path;
    std::string surrogate;

    auto* search = app.add_subcommand("search", "one search over stored and query word files");
    add_common(search, common);
    search->add_option("--stored", stored_path, "stored words, one per line")->required();
    search->add_option("--query", query_path, "query words, one per line")->required();

    auto* mc = app.add_subcommand("mc", "Monte Carlo variation experiment");
    add_common(mc, common);

    auto* sweep = app.add_subcommand("sweep", "cost or WTA-margin sweep");
    add_common(sweep, common);
    sweep->add_option("--axis", axis, "rows, dims or margin")
        ->required()
        ->check(CLI::IsMember({"rows", "dims", "margin"}));

    auto* cost = app.add_subcommand("cost", "energy/latency/area estimate and baseline ratios");
    add_common(cost, common);

    auto* hdc = app.add_subcommand("hdc", "HDC classification: train a model or evaluate accuracy");
    add_common(hdc, common);
    hdc->add_option("action", action, "train or eval")->required()->check(CLI::IsMember({"train", "eval"}));
    hdc->add_option("--dataset", dataset, "training CSV (default: configured surrogate)");
    hdc->add_option("--test", test_path, "test CSV");

    auto* calibrate = app.add_subcommand("calibrate", "grid search of the free variation knobs");
    add_common(calibrate, common);

    auto* gen = app.add_subcommand("dataset", "write a synthetic surrogate dataset as CSV");
    add_common(gen, common);
    gen->add_option("name", surrogate, "isolet, ucihar or face")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    try {
        auto cfg = resolve(common);
        nlohmann::json report;
        if (*search) {
            report = cosime::app::cmd_search(cfg, stored_path, query_path);
        } else if (*mc) {
            report = cosime::app::cmd_mc(cfg);
        } else if (*sweep) {
            report = cosime::app::cmd_sweep(cfg, cosime::app::sweep_axis_from_name(axis));
        } else if (*cost) {
            report = cosime::app::cmd_cost(cfg);
        } else if (*hdc) {
            if (!dataset.empty()) {
                cfg.hdc.train_csv = dataset;
                if (!test_path.empty()) cfg.hdc.test_csv = test_path;
            }
            report = cosime::app::cmd_hdc(cfg, cosime::app::hdc_action_from_name(action));
        } else if (*calibrate) {
            report = cosime::app::cmd_calibrate(cfg);
        } else if (*gen) {
            report = cosime::app::cmd_dataset(cfg, surrogate);
        }
        print_summary(cfg, report);
        return kOk;
    } catch (const cosime::InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInput;
    } catch (const cosime::DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInput;
    } catch (const cosime::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kNumerical;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kNumerical;
    }
}
