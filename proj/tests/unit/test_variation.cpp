#include <doctest.h>

#include <cmath>
#include <set>

#include "cosime/error.hpp"
#include "cosime/variation.hpp"

using namespace cosime;
using namespace cosime::variation;

namespace {

// Exact rational check: cos^2 = num/den  <=>  dot^2 * den == |q| |w| * num.
bool cos2_equals(const BinaryVector& q, const BinaryVector& w, std::size_t num, std::size_t den) {
    const std::size_t dot = q.and_count(w);
    return dot * dot * den == q.popcount() * w.popcount() * num;
}

}  // namespace

TEST_CASE("worst-case pair at 1024 bits") {
    const SearchCase c = worst_case_scenario(1024);
    REQUIRE(c.stored.size() == 2);
    CHECK(c.query.size() == 1024);
    CHECK(cos2_equals(c.query, c.stored[0], 1, 4));
    CHECK(cos2_equals(c.query, c.stored[1], 1, 5));
    CHECK(c.stored[0].xor_count(c.stored[1]) == 1);
    CHECK(c.expected_winner == 0);
}

TEST_CASE("worst-case pair needs enough bits") {
    CHECK_THROWS_AS(worst_case_scenario(3), DomainError);
    CHECK_NOTHROW(worst_case_scenario(16));
}

TEST_CASE("similarity sweep competitors") {
    for (std::size_t p = 5; p <= 11; ++p) {
        const SearchCase c = similarity_pair(1024, p);
        CHECK(cos2_equals(c.query, c.stored[0], 1, 4));
        CHECK(c.stored[1].popcount() == p);
        // Same overlap as the anchor, so cos^2 = 4 / (4 p) = 1 / p.
        CHECK(cos2_equals(c.query, c.stored[1], 1, p));
    }
    CHECK_THROWS_AS(similarity_pair(8, 9), DomainError);
}

TEST_CASE("trial seeds are distinct across streams and trials") {
    std::set<std::uint64_t> seen;
    for (std::size_t s = 0; s < 8; ++s)
        for (std::size_t t = 0; t < 500; ++t) seen.insert(trial_seed(1, s, t));
    CHECK(seen.size() == 8 * 500);
}

TEST_CASE("zero variation always finds the better word") {
    McExperiment exp;
    exp.trials = 50;
    exp.spec = device::VariationSpec::zero();
    const McResult r = run_mc(exp);
    CHECK(r.accuracy == 1.0);
    CHECK(r.nonconverged == 0);
    CHECK(r.unresolvable == 0);

    exp.scenario = Scenario::similarity_sweep;
    exp.trials = 10;
    const McResult s = run_mc(exp);
    for (const auto& b : s.error_rate_by_bin) CHECK(b.errors == 0);
}

TEST_CASE("Monte Carlo runs are reproducible") {
    McExperiment exp;
    exp.trials = 64;
    exp.keep_trial_log = true;
    const McResult a = run_mc(exp);
    const McResult b = run_mc(exp);
    CHECK(a.correct == b.correct);
    REQUIRE(a.trial_log.size() == b.trial_log.size());
    for (std::size_t i = 0; i < a.trial_log.size(); ++i) {
        CHECK(a.trial_log[i].seed == b.trial_log[i].seed);
        CHECK(a.trial_log[i].margin == b.trial_log[i].margin);
    }
    exp.master_seed = 2;
    const McResult c = run_mc(exp);
    CHECK(c.trial_log[0].seed != a.trial_log[0].seed);
}

TEST_CASE("single trial agrees with the Monte Carlo log") {
    McExperiment exp;
    exp.trials = 4;
    exp.keep_trial_log = true;
    const McResult r = run_mc(exp);
    const SearchCase c = worst_case_scenario(exp.dim);
    for (const auto& t : r.trial_log) {
        const TrialOutcome o = run_search_trial(c, exp, t.seed);
        CHECK(o.winner == t.winner);
        CHECK(o.margin == t.margin);
    }
}

TEST_CASE("variation makes the worst case fallible") {
    McExperiment exp;
    exp.trials = 400;
    const McResult r = run_mc(exp);
    CHECK(r.accuracy < 0.99);
    CHECK(r.accuracy > 0.75);
}

TEST_CASE("sweep bins are ordered with adjacent edges") {
    McExperiment exp;
    exp.scenario = Scenario::similarity_sweep;
    exp.trials = 20;
    const McResult r = run_mc(exp);
    const auto& bins = r.error_rate_by_bin;
    REQUIRE(bins.size() == exp.sweep_competitor_ones.size());
    for (std::size_t i = 0; i < bins.size(); ++i) {
        CHECK(bins[i].lower < bins[i].cos);
        CHECK(bins[i].cos < bins[i].upper);
        if (i > 0) CHECK(bins[i].lower == bins[i - 1].upper);
    }
    CHECK(bins.back().cos == doctest::Approx(1.0 / std::sqrt(5.0)));
}

TEST_CASE("experiment validation") {
    McExperiment exp;
    exp.trials = 0;
    CHECK_THROWS_AS(run_mc(exp), DomainError);
    exp.trials = 1;
    exp.scenario = Scenario::custom;
    CHECK_THROWS_AS(run_mc(exp), InputError);
}
