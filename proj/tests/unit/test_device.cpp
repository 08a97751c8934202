#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "cosime/device.hpp"
#include "cosime/error.hpp"

using namespace cosime;
using namespace cosime::device;

TEST_CASE("subthreshold current at reference points") {
    MosfetParams p;
    p.i0 = 2e-9;
    p.w_over_l = 3.0;
    CHECK(subthreshold_current(0.0, 0.0, p).amps == doctest::Approx(6e-9).epsilon(1e-15));
    CHECK(subthreshold_current(p.eta * p.v_t, 0.0, p).amps ==
          doctest::Approx(6e-9 * std::exp(1.0)).epsilon(1e-14));
}

TEST_CASE("early effect multiplies the current linearly in v_ds") {
    MosfetParams p;
    const double base = subthreshold_current(0.1, 0.0, p).amps;
    CHECK(subthreshold_current(0.1, 2.0, p).amps == doctest::Approx(base * (1.0 + 2.0 / p.v_a)));
}

TEST_CASE("v_gs at or above the MOSFET threshold is flagged, not rejected") {
    MosfetParams p;
    const auto below = subthreshold_current(p.vth_mos - 1e-6, 0.0, p);
    const auto above = subthreshold_current(p.vth_mos, 0.0, p);
    CHECK_FALSE(below.out_of_region);
    CHECK(above.out_of_region);
    CHECK(above.amps > 0.0);
}

TEST_CASE("gate voltage for a current") {
    MosfetParams p;
    CHECK(vgs_for_current(p.specific_current(), p) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(vgs_for_current(p.specific_current() * std::exp(2.0), p) ==
          doctest::Approx(2.0 * p.eta * p.v_t).epsilon(1e-14));

    MosfetParams q;
    q.i0 = 1e-9;
    q.w_over_l = 1.0;
    q.eta = 1.5;
    q.v_t = 0.0258;
    // 1.5 * 0.0258 * ln(600) = 0.24755...
    CHECK(vgs_for_current(600e-9, q) == doctest::Approx(0.2475).epsilon(5e-4));
    CHECK(vgs_for_current(600e-9, q) == doctest::Approx(0.0387 * 6.3969296552161).epsilon(1e-12));
}

TEST_CASE("gate voltage round trip") {
    MosfetParams p;
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-0.2, 0.4);
    for (int i = 0; i < 20; ++i) {
        const double v = u(rng);
        CHECK(vgs_for_current(subthreshold_current(v, 0.0, p).amps, p) ==
              doctest::Approx(v).epsilon(1e-12).scale(1.0));
    }
}

TEST_CASE("non-positive current has no gate voltage") {
    MosfetParams p;
    CHECK_THROWS_AS(vgs_for_current(0.0, p), DomainError);
    CHECK_THROWS_AS(vgs_for_current(-1e-9, p), DomainError);
}

TEST_CASE("invalid MOSFET parameters are rejected") {
    MosfetParams p;
    p.eta = 0.0;
    CHECK_THROWS_AS(p.validate(), DomainError);
}

TEST_CASE("nominal cell is clamped by its series resistor") {
    const CellParams c = CellParams::nominal();
    CHECK(c.i_on == doctest::Approx(c.v_read / (c.r_series + c.r_fefet_on)));
    CHECK(1024.0 * c.i_on == doctest::Approx(600e-9).epsilon(1e-12));
}

TEST_CASE("zero variation returns the nominal cell") {
    const CellParams c = CellParams::nominal();
    Rng rng(1);
    const CellParams s = sample_cell(c, VariationSpec::zero(), rng);
    CHECK(s.i_on == c.i_on);
    CHECK(s.r_series == c.r_series);
    CHECK(s.vth_low == c.vth_low);
    CHECK(s.vth_high == c.vth_high);
}

TEST_CASE("cell current spread follows the series resistor") {
    const CellParams c = CellParams::nominal();
    VariationSpec spec;  // FeFET contribution attenuated to zero by default
    Rng rng(spec.rng_seed);
    const int n = 100000;
    double sum = 0.0;
    double sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double r = sample_cell(c, spec, rng).i_on / c.i_on;
        sum += r;
        sum2 += r * r;
    }
    const double mean = sum / n;
    const double sd = std::sqrt(sum2 / n - mean * mean);
    CHECK(sd >= 0.07);
    CHECK(sd <= 0.09);
}

TEST_CASE("sampled resistances stay positive") {
    const CellParams c = CellParams::nominal();
    VariationSpec spec;
    spec.sigma_r_rel = 0.4;
    Rng rng(3);
    for (int i = 0; i < 10000; ++i) {
        const CellParams s = sample_cell(c, spec, rng);
        REQUIRE(s.r_series > 0.0);
        REQUIRE(s.i_on > 0.0);
    }
}

TEST_CASE("sampling is deterministic for a fixed seed") {
    const CellParams c = CellParams::nominal();
    VariationSpec spec;
    spec.fefet_attenuation = 0.3;
    Rng a(spec.rng_seed);
    Rng b(spec.rng_seed);
    for (int i = 0; i < 100; ++i) {
        const CellParams x = sample_cell(c, spec, a);
        const CellParams y = sample_cell(c, spec, b);
        REQUIRE(x.i_on == y.i_on);
        REQUIRE(x.vth_low == y.vth_low);
        REQUIRE(x.vth_high == y.vth_high);
    }
}

TEST_CASE("attenuation adds the FeFET threshold term in quadrature") {
    const CellParams c = CellParams::nominal();
    VariationSpec spec;
    CHECK(spec.cell_current_sigma(c) == doctest::Approx(0.08));
    spec.fefet_attenuation = 1.0;
    const double f = spec.sigma_vth_low / (c.v_gate_read - c.vth_low);
    CHECK(spec.fefet_current_sigma(c) == doctest::Approx(f));
    CHECK(spec.cell_current_sigma(c) == doctest::Approx(std::sqrt(0.08 * 0.08 + f * f)));
}

TEST_CASE("global variation scales the transistor") {
    MosfetParams p;
    GlobalSample g;
    g.mos_size_scale = 1.1;
    g.mos_vth_shift = 0.02;
    const MosfetParams q = apply_global(p, g);
    CHECK(q.w_over_l == doctest::Approx(1.1));
    CHECK(q.vth_mos == doctest::Approx(p.vth_mos + 0.02));
    // A higher threshold lowers the current at fixed V_GS.
    CHECK(subthreshold_current(0.2, 0.0, q).amps <
          subthreshold_current(0.2, 0.0, p).amps * 1.1);
}
