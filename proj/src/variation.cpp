#include "cosime/variation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cosime/error.hpp"
#include "cosime/parallel.hpp"
#include "cosime/rng.hpp"

namespace cosime::variation {

namespace {

constexpr std::size_t kSearchWidth = 8;

std::size_t bits_of(unsigned x) { return static_cast<std::size_t>(std::popcount(x)); }

BinaryVector pad(unsigned pattern, std::size_t width, std::size_t dim) {
    BinaryVector v(dim);
    for (std::size_t i = 0; i < width; ++i)
        if (pattern & (1u << i)) v.set(i, true);
    return v;
}

}  // namespace

SearchCase worst_case_scenario(std::size_t dim) {
    const std::size_t width = std::min(dim, kSearchWidth);
    const unsigned limit = 1u << width;

    // Exhaustive search over small patterns. cos^2 = dot^2 / (|q| |w|), so the
    // targets 1/4 and 1/5 are the integer identities 4 dot^2 = |q||w| and
    // 5 dot^2 = |q||w|. Prefer the largest overlap (the densest query).
    bool found = false;
    unsigned best_q = 0, best_a = 0, best_b = 0;
    std::size_t best_dot = 0;
    for (unsigned q = 1; q < limit; ++q) {
        const std::size_t nq = bits_of(q);
        for (unsigned a = 1; a < limit; ++a) {
            const std::size_t da = bits_of(q & a);
            if (4 * da * da != nq * bits_of(a)) continue;
            for (std::size_t k = 0; k < width; ++k) {
                const unsigned b = a ^ (1u << k);
                const std::size_t db = bits_of(q & b);
                if (b == 0 || 5 * db * db != nq * bits_of(b)) continue;
                if (!found || da > best_dot) {
                    found = true;
                    best_dot = da;
                    best_q = q;
                    best_a = a;
                    best_b = b;
                }
            }
        }
    }
    if (!found) {
        throw DomainError("word length " + std::to_string(dim) +
                          " is too short for the worst-case pair");
    }

    SearchCase c;
    c.query = pad(best_q, width, dim);
    c.stored = {pad(best_a, width, dim), pad(best_b, width, dim)};
    c.expected_winner = 0;

    // Re-check against the integer identities on the padded vectors.
    const std::size_t nq = c.query.popcount();
    const std::size_t d0 = c.query.and_count(c.stored[0]);
    const std::size_t d1 = c.query.and_count(c.stored[1]);
    if (4 * d0 * d0 != nq * c.stored[0].popcount() || 5 * d1 * d1 != nq * c.stored[1].popcount() ||
        c.stored[0].xor_count(c.stored[1]) != 1) {
        throw NumericalError("worst-case construction failed verification");
    }
    return c;
}

SearchCase similarity_pair(std::size_t dim, std::size_t competitor_ones) {
    SearchCase c = worst_case_scenario(dim);
    const BinaryVector& anchor = c.stored[0];
    const std::size_t overlap = c.query.and_count(anchor);
    if (competitor_ones < overlap) throw DomainError("competitor needs at least the anchor overlap");

    BinaryVector competitor = anchor & c.query;
    std::size_t placed = overlap;
    for (std::size_t i = 0; i < dim && placed < competitor_ones; ++i) {
        if (!c.query.get(i) && !competitor.get(i)) {
            competitor.set(i, true);
            ++placed;
        }
    }
    if (placed < competitor_ones) {
        throw DomainError("word length " + std::to_string(dim) + " cannot hold a competitor with " +
                          std::to_string(competitor_ones) + " ones");
    }
    c.stored[1] = competitor;
    return c;
}

void McExperiment::validate() const {
    if (trials < 1) throw DomainError("trials must be >= 1");
    spec.validate();
    cell.validate();
    translinear.validate();
    wta.validate();
    if (scenario == Scenario::custom && !custom) throw InputError("custom scenario needs a search case");
    if (scenario == Scenario::similarity_sweep && sweep_competitor_ones.empty())
        throw InputError("similarity sweep needs at least one competitor");
}

std::uint64_t trial_seed(std::uint64_t master, std::size_t stream, std::size_t trial) {
    return derive_seed(derive_seed(master, stream), trial);
}

TrialOutcome run_search_trial(const SearchCase& search, const McExperiment& exp,
                              std::uint64_t seed) {
    Rng rng(seed);
    const device::GlobalSample die = device::sample_global(exp.spec, exp.translinear.mosfet, rng);

    array::ArrayGeometry geometry;
    geometry.rows = search.stored.size();
    geometry.dim = search.query.size();
    geometry.scale_factor =
        exp.iy_target > 0.0 ? array::scale_for_target(search.stored, exp.cell, exp.iy_target) : 1.0;
    const array::ArrayInstance arr =
        array::program(search.stored, geometry, exp.cell, exp.spec, rng, die.supply_scale);
    const array::RowCurrents currents = array::row_currents(arr, search.query);

    translinear::TranslinearConfig tl = exp.translinear;
    tl.mosfet = device::apply_global(exp.translinear.mosfet, die);
    TrialOutcome out;
    out.iz.resize(geometry.rows);
    for (std::size_t r = 0; r < geometry.rows; ++r) {
        out.iz[r] = currents.iy[r] > 0.0
                        ? translinear::squared_ratio(currents.ix[r], currents.iy[r], tl).iz
                        : 0.0;
    }

    wta::WtaConfig w = exp.wta;
    w.mosfet = device::apply_global(exp.wta.mosfet, die);
    w.i_bias = exp.wta.i_bias * die.supply_scale;
    const wta::Resolution res = wta::resolve_winner(out.iz, w);
    out.winner = res.winner;
    out.resolvable = res.resolvable;
    out.converged = res.solution.converged;
    out.margin = res.solution.margin;
    return out;
}

namespace {

struct Block {
    SearchCase search;
    std::size_t stream = 0;
};

}  // namespace

McResult run_mc(const McExperiment& exp) {
    exp.validate();

    std::vector<Block> blocks;
    switch (exp.scenario) {
        case Scenario::worst_case_pair:
            blocks.push_back({worst_case_scenario(exp.dim), 0});
            break;
        case Scenario::custom:
            blocks.push_back({*exp.custom, 0});
            break;
        case Scenario::similarity_sweep:
            for (std::size_t b = 0; b < exp.sweep_competitor_ones.size(); ++b)
                blocks.push_back({similarity_pair(exp.dim, exp.sweep_competitor_ones[b]), b});
            break;
    }

    const std::size_t total = blocks.size() * exp.trials;
    std::vector<TrialRecord> records(total);
    parallel_for(total, [&](std::size_t idx) {
        const Block& blk = blocks[idx / exp.trials];
        const std::size_t t = idx % exp.trials;
        TrialRecord& rec = records[idx];
        rec.trial = t;
        rec.seed = trial_seed(exp.master_seed, blk.stream, t);
        const TrialOutcome o = run_search_trial(blk.search, exp, rec.seed);
        rec.winner = o.winner;
        rec.converged = o.converged;
        rec.resolvable = o.resolvable;
        rec.margin = o.margin;
        rec.correct = o.converged && o.winner == blk.search.expected_winner &&
                      (o.resolvable || !exp.unresolvable_is_error);
    });

    McResult result;
    result.trials = total;
    for (const auto& r : records) {
        if (r.correct) ++result.correct;
        if (!r.converged) ++result.nonconverged;
        if (r.converged && !r.resolvable) ++result.unresolvable;
    }
    result.accuracy = static_cast<double>(result.correct) / static_cast<double>(total);

    if (exp.scenario == Scenario::similarity_sweep) {
        for (std::size_t b = 0; b < blocks.size(); ++b) {
            const SearchCase& sc = blocks[b].search;
            const double nq = static_cast<double>(sc.query.popcount());
            const double dot = static_cast<double>(sc.query.and_count(sc.stored[1]));
            ErrorBin bin;
            bin.cos = dot / std::sqrt(nq * static_cast<double>(sc.stored[1].popcount()));
            bin.trials = exp.trials;
            for (std::size_t t = 0; t < exp.trials; ++t)
                if (!records[b * exp.trials + t].correct) ++bin.errors;
            bin.error_rate = static_cast<double>(bin.errors) / static_cast<double>(bin.trials);
            result.error_rate_by_bin.push_back(bin);
        }
        std::sort(result.error_rate_by_bin.begin(), result.error_rate_by_bin.end(),
                  [](const ErrorBin& a, const ErrorBin& b) { return a.cos < b.cos; });
        auto& bins = result.error_rate_by_bin;
        for (std::size_t i = 0; i < bins.size(); ++i) {
            const double left = i > 0 ? 0.5 * (bins[i - 1].cos + bins[i].cos) : -1.0;
            const double right = i + 1 < bins.size() ? 0.5 * (bins[i].cos + bins[i + 1].cos) : -1.0;
            const double half = bins.size() > 1
                                    ? 0.5 * (i > 0 ? bins[i].cos - bins[i - 1].cos
                                                   : bins[i + 1].cos - bins[i].cos)
                                    : 0.025;
            bins[i].lower = left >= 0.0 ? left : bins[i].cos - half;
            bins[i].upper = right >= 0.0 ? right : bins[i].cos + half;
        }
    }
    if (exp.keep_trial_log) result.trial_log = std::move(records);
    return result;
}

}  // namespace cosime::variation
