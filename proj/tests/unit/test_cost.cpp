#include <doctest.h>

#include "cosime/cost.hpp"
#include "cosime/error.hpp"

using namespace cosime;
using namespace cosime::cost;

namespace {

array::ArrayGeometry geom(std::size_t rows, std::size_t dim) {
    array::ArrayGeometry g;
    g.rows = rows;
    g.dim = dim;
    return g;
}

}  // namespace

TEST_CASE("reference geometry") {
    const CostReport r = estimate(geom(256, 1024), CostParams{});
    CHECK(r.energy == doctest::Approx(0.286e-15 * 256 * 1024).epsilon(1e-12));
    CHECK(r.energy == doctest::Approx(74.97e-12).epsilon(1e-4));
    CHECK(r.latency == 3e-9);
    CHECK(r.energy_wta + r.energy_translinear + r.energy_other == doctest::Approx(r.energy));
}

TEST_CASE("energy is linear in rows, flat in dims; latency is flat") {
    const CostParams p;
    const CostReport a = estimate(geom(128, 1024), p);
    const CostReport b = estimate(geom(256, 1024), p);
    CHECK(b.energy == doctest::Approx(2.0 * a.energy).epsilon(1e-15));
    CHECK(a.latency == b.latency);
    const CostReport small = estimate(geom(256, 64), p);
    CHECK(small.energy == b.energy);
    CHECK(small.latency == b.latency);
}

TEST_CASE("area scales with the cell count") {
    const CostParams p;
    const CostReport ref = estimate(geom(256, 256), p);
    CHECK(ref.area == doctest::Approx(0.0198e-6));
    const CostReport big = estimate(geom(256, 1024), p);
    CHECK(big.area == doctest::Approx(4.0 * ref.area));
    CHECK(big.area_per_cell == doctest::Approx(ref.area_per_cell));
}

TEST_CASE("bundled table ratios") {
    const auto table = bundled_baselines();
    CHECK(table.size() == 5);
    const CostReport ours = estimate(geom(256, 1024), CostParams{});
    const RatioRow approx = compare_one(ours, find_baseline(table, "Approx. Cosine"));
    CHECK(approx.energy_ratio == doctest::Approx(90.5).epsilon(0.005));
    CHECK(approx.latency_ratio == doctest::Approx(333.0).epsilon(0.01));
    const RatioRow tcam = compare_one(ours, find_baseline(table, "FeFET TCAM"));
    CHECK(tcam.latency_ratio == doctest::Approx(0.12).epsilon(1e-12));
    const RatioRow self = compare_one(ours, find_baseline(table, "COSIME"));
    CHECK(self.energy_ratio == doctest::Approx(1.0));
    CHECK(self.latency_ratio == doctest::Approx(1.0));
    CHECK(self.area_ratio == doctest::Approx(1.0));
}

TEST_CASE("baseline parsing and lookup errors") {
    const auto rows = parse_baselines(
        "name,technology,metric,energy_fJ_per_bit,latency_ns,area_mm2,process_nm\n"
        "X,RRAM,Hamming,1.0,2.0,0.5,90/65\n");
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].energy_per_bit == doctest::Approx(1e-15));
    CHECK(rows[0].latency == doctest::Approx(2e-9));
    CHECK(rows[0].area == doctest::Approx(0.5e-6));
    CHECK(rows[0].process == "90/65");
    CHECK_THROWS_AS(find_baseline(rows, "missing"), LookupError);
    CHECK_THROWS_AS(compare_to_baselines(CostReport{}, {}), LookupError);
    CHECK_THROWS_AS(parse_baselines("name,technology\nX,Y\n"), InputError);
    CHECK_THROWS_AS(
        parse_baselines("name,technology,metric,energy_fJ_per_bit,latency_ns,area_mm2,process_nm\n"
                        "X,RRAM,Hamming,abc,2.0,0.5,45\n"),
        ParseError);
}

TEST_CASE("bundled table matches the shipped CSV") {
    const auto file = load_baselines(COSIME_SOURCE_DIR "/data/table1_baselines.csv");
    const auto bundled = bundled_baselines();
    REQUIRE(file.size() == bundled.size());
    for (std::size_t i = 0; i < file.size(); ++i) {
        CHECK(file[i].name == bundled[i].name);
        CHECK(file[i].energy_per_bit == doctest::Approx(bundled[i].energy_per_bit));
        CHECK(file[i].latency == doctest::Approx(bundled[i].latency));
        CHECK(file[i].area == doctest::Approx(bundled[i].area));
    }
}
