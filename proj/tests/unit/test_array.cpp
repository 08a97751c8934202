#include <doctest.h>

#include <cmath>
#include <vector>

#include "cosime/array.hpp"
#include "cosime/error.hpp"
#include "cosime/translinear.hpp"
#include "cosime/variation.hpp"

using namespace cosime;
using namespace cosime::array;

namespace {

std::vector<BinaryVector> words(std::initializer_list<const char*> ws) {
    std::vector<BinaryVector> out;
    for (const char* w : ws) out.push_back(BinaryVector::from_string(w));
    return out;
}

ArrayGeometry geom(std::size_t rows, std::size_t dim, double n = 1.0) {
    ArrayGeometry g;
    g.rows = rows;
    g.dim = dim;
    g.scale_factor = n;
    return g;
}

}  // namespace

TEST_CASE("binary vector parsing and counts") {
    const auto a = BinaryVector::from_string("1100");
    const auto b = BinaryVector::from_string("1010");
    CHECK(a.popcount() == 2);
    CHECK(a.and_count(b) == 1);
    CHECK(a.xor_count(b) == 2);
    CHECK((~a).to_string() == "0011");
    CHECK_THROWS_AS(BinaryVector::from_string("10a1"), InputError);
    CHECK_THROWS_AS(a.and_count(BinaryVector::from_string("101")), ShapeError);
}

TEST_CASE("word files report the failing line") {
    CHECK(parse_words("0101\n1111\n\n").size() == 2);
    try {
        parse_words("0101\n1111\n01\n");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
    }
    try {
        parse_words("0101\n0x01\n");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
    }
    CHECK_THROWS_AS(parse_words("\n\n"), InputError);
}

TEST_CASE("zero variation programs uniform cells") {
    const auto stored = words({"1010", "0111"});
    const auto base = device::CellParams::nominal();
    const auto arr = program(stored, geom(2, 4), base, device::VariationSpec::zero());
    for (const auto& c : arr.cells_x) CHECK(c.i_on == base.i_on);
    for (const auto& c : arr.cells_y) CHECK(c.i_on == base.i_on);
    CHECK(arr.i_cell_nominal == base.i_on);
}

TEST_CASE("programming is deterministic for a seed") {
    const auto stored = words({"1010", "0111"});
    device::VariationSpec spec;
    const auto a = program(stored, geom(2, 4), device::CellParams::nominal(), spec);
    const auto b = program(stored, geom(2, 4), device::CellParams::nominal(), spec);
    for (std::size_t i = 0; i < a.cells_x.size(); ++i) {
        CHECK(a.cells_x[i].i_on == b.cells_x[i].i_on);
        CHECK(a.cells_y[i].i_on == b.cells_y[i].i_on);
    }
}

TEST_CASE("resistor tuning divides the cell current") {
    const auto stored = words({"1010", "0111"});
    const auto base = device::CellParams::nominal();
    const auto arr = program(stored, geom(2, 4, 8.0), base, device::VariationSpec::zero());
    CHECK(arr.i_cell_nominal == doctest::Approx(base.i_on / 8.0).epsilon(1e-15));
    const auto tuned = tune_cell(base, 8.0);
    CHECK(tuned.r_series == doctest::Approx(base.r_series * 8.0));
}

TEST_CASE("geometry and word shape errors") {
    const auto stored = words({"1010", "0111"});
    const auto base = device::CellParams::nominal();
    CHECK_THROWS_AS(program(stored, geom(2, 5), base, device::VariationSpec::zero()), ShapeError);
    CHECK_THROWS_AS(program(stored, geom(3, 4), base, device::VariationSpec::zero()), ShapeError);
    const auto arr = program(stored, geom(2, 4), base, device::VariationSpec::zero());
    CHECK_THROWS_AS(row_currents(arr, BinaryVector::from_string("10101")), ShapeError);
}

TEST_CASE("row currents count matching cells") {
    const auto stored = words({"1011", "0000"});
    const auto arr = program(stored, geom(2, 4), device::CellParams::nominal(),
                             device::VariationSpec::zero());
    const double c = arr.i_cell_nominal;
    const auto rc = row_currents(arr, BinaryVector::from_string("1001"));
    CHECK(rc.ix[0] == doctest::Approx(2.0 * c));
    CHECK(rc.iy[0] == doctest::Approx(3.0 * c));
    CHECK(rc.ix[1] == 0.0);
    CHECK(rc.iy[1] == 0.0);
    const auto self = row_currents(arr, BinaryVector::from_string("1011"));
    CHECK(self.ix[0] == self.iy[0]);
}

TEST_CASE("off-state leakage adds to the row currents") {
    const auto stored = words({"1011", "0100"});
    auto cell = device::CellParams::nominal();
    cell.i_off = cell.i_on * 1e-3;
    const auto arr = program(stored, geom(2, 4), cell, device::VariationSpec::zero());
    const auto rc = row_currents(arr, BinaryVector::from_string("1001"));
    // Every read cell that stores 0 leaks i_off.
    const double on = cell.i_on;
    const double off = cell.i_off;
    CHECK(rc.ix[0] == doctest::Approx(2.0 * on));
    CHECK(rc.iy[0] == doctest::Approx(3.0 * on + 1.0 * off));
    CHECK(rc.ix[1] == doctest::Approx(2.0 * off));
}

TEST_CASE("scaling by k with resistor tuning preserves Iz") {
    const auto sc = variation::worst_case_scenario(1024);
    const auto base_cell = device::CellParams::nominal();
    const auto base = program(sc.stored, geom(2, 1024), base_cell, device::VariationSpec::zero());
    for (double k : {1.0, 2.0, 4.0, 8.0}) {
        const auto scaled =
            program(sc.stored, geom(2, 1024, k), base_cell, device::VariationSpec::zero());
        const auto check = scaled_equivalence_check(base, scaled, sc.query, k);
        CHECK(check.equivalent);
        CHECK(check.max_rel_error < 1e-9);
    }
}

TEST_CASE("scaling by 4 under variation shifts mean Iz by less than the trial spread") {
    const auto sc = variation::worst_case_scenario(1024);
    const auto base_cell = device::CellParams::nominal();
    device::VariationSpec spec;
    translinear::TranslinearConfig tl;
    const std::size_t trials = 1000;
    std::vector<double> a(trials);
    std::vector<double> b(trials);
    for (std::size_t t = 0; t < trials; ++t) {
        Rng r1(derive_seed(11, t));
        Rng r2(derive_seed(12, t));
        const auto base = program(sc.stored, geom(2, 1024), base_cell, spec, r1);
        const auto scaled = program(sc.stored, geom(2, 1024, 4.0), base_cell, spec, r2);
        const auto c1 = row_currents(base, sc.query);
        const auto c2 = row_currents(scaled, sc.query);
        a[t] = translinear::squared_ratio(c1.ix[0], c1.iy[0], tl).iz;
        tl.mirror_ratio = 4.0;
        b[t] = translinear::squared_ratio(c2.ix[0], c2.iy[0], tl).iz;
        tl.mirror_ratio = 1.0;
    }
    auto mean = [](const std::vector<double>& v) {
        double s = 0.0;
        for (double x : v) s += x;
        return s / static_cast<double>(v.size());
    };
    const double ma = mean(a);
    const double mb = mean(b);
    double var = 0.0;
    for (double x : a) var += (x - ma) * (x - ma);
    const double sd = std::sqrt(var / static_cast<double>(trials - 1));
    CHECK(std::abs(ma - mb) < sd);
}

TEST_CASE("auto-tuned scale factor puts the mean norm current on target") {
    const auto stored = words({"1111", "1100"});
    const auto base = device::CellParams::nominal();
    const double n = scale_for_target(stored, base, 1.5 * base.i_on);
    // Mean popcount 3: 3 * i_on / n = 1.5 * i_on.
    CHECK(n == doctest::Approx(2.0));
}
