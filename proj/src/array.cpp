#include "cosime/array.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cosime/error.hpp"
#include "cosime/translinear.hpp"

namespace cosime::array {

void ArrayGeometry::validate() const {
    if (rows < 2) throw ShapeError("array needs at least two rows");
    if (dim < 1) throw ShapeError("array word length must be >= 1");
    if (!(scale_factor > 0.0)) throw DomainError("array scale_factor must be > 0");
}

device::CellParams tune_cell(const device::CellParams& base, double scale_factor) {
    device::CellParams c = base;
    c.i_on = base.i_on / scale_factor;
    c.i_off = base.i_off / scale_factor;
    c.r_series = base.r_series * scale_factor;
    c.r_fefet_on = base.r_fefet_on * scale_factor;
    return c;
}

double scale_for_target(const std::vector<BinaryVector>& stored, const device::CellParams& base,
                        double iy_target) {
    if (stored.empty()) throw ShapeError("no stored words");
    if (!(iy_target > 0.0)) throw DomainError("iy target must be > 0");
    double ones = 0.0;
    for (const auto& w : stored) ones += static_cast<double>(w.popcount());
    ones /= static_cast<double>(stored.size());
    if (ones == 0.0) throw DomainError("stored words are all zero; cannot tune cell current");
    return ones * base.i_on / iy_target;
}

ArrayInstance program(const std::vector<BinaryVector>& stored, const ArrayGeometry& geometry,
                      const device::CellParams& base_cell, const device::VariationSpec& spec,
                      Rng& rng, double supply_scale) {
    geometry.validate();
    spec.validate();
    if (stored.size() != geometry.rows) {
        throw ShapeError("expected " + std::to_string(geometry.rows) + " stored words, got " +
                         std::to_string(stored.size()));
    }
    for (std::size_t r = 0; r < stored.size(); ++r) {
        if (stored[r].size() != geometry.dim) {
            throw ShapeError("stored word " + std::to_string(r) + " has length " +
                             std::to_string(stored[r].size()) + ", expected " +
                             std::to_string(geometry.dim));
        }
    }

    ArrayInstance arr;
    arr.geometry = geometry;
    arr.stored = stored;

    device::CellParams nominal = tune_cell(base_cell, geometry.scale_factor);
    nominal.i_on *= supply_scale;
    nominal.i_off *= supply_scale;
    nominal.v_read *= supply_scale;
    arr.i_cell_nominal = nominal.i_on;

    const std::size_t n = geometry.rows * geometry.dim;
    arr.cells_x.reserve(n);
    arr.cells_y.reserve(n);
    if (spec.is_zero()) {
        arr.cells_x.assign(n, nominal);
        arr.cells_y.assign(n, nominal);
        return arr;
    }
    for (std::size_t i = 0; i < n; ++i) arr.cells_x.push_back(device::sample_cell(nominal, spec, rng));
    for (std::size_t i = 0; i < n; ++i) arr.cells_y.push_back(device::sample_cell(nominal, spec, rng));
    return arr;
}

ArrayInstance program(const std::vector<BinaryVector>& stored, const ArrayGeometry& geometry,
                      const device::CellParams& base_cell, const device::VariationSpec& spec) {
    Rng rng(spec.rng_seed);
    return program(stored, geometry, base_cell, spec, rng);
}

RowCurrents row_currents(const ArrayInstance& arr, const BinaryVector& query) {
    const auto& g = arr.geometry;
    if (query.size() != g.dim) {
        throw ShapeError("query length " + std::to_string(query.size()) + " != word length " +
                         std::to_string(g.dim));
    }
    RowCurrents out;
    out.ix.assign(g.rows, 0.0);
    out.iy.assign(g.rows, 0.0);
    for (std::size_t r = 0; r < g.rows; ++r) {
        const BinaryVector& word = arr.stored[r];
        double ix = 0.0;
        double iy = 0.0;
        for (std::size_t d = 0; d < g.dim; ++d) {
            const bool stored_one = word.get(d);
            const auto& cx = arr.cell_x(r, d);
            const auto& cy = arr.cell_y(r, d);
            // Search line low: the cell is off regardless of state.
            if (query.get(d)) ix += stored_one ? cx.i_on : cx.i_off;
            iy += stored_one ? cy.i_on : cy.i_off;
        }
        out.ix[r] = ix;
        out.iy[r] = iy;
    }
    return out;
}

ScalingCheck scaled_equivalence_check(const ArrayInstance& base, const ArrayInstance& scaled,
                                      const BinaryVector& query, double k, double tolerance) {
    if (!(k > 0.0)) throw DomainError("scaling factor must be > 0");
    const std::size_t rows = base.geometry.rows;
    if (scaled.geometry.rows < rows) throw ShapeError("scaled array has fewer rows than base");
    for (std::size_t r = 0; r < rows; ++r) {
        if (!(scaled.stored[r] == base.stored[r]))
            throw ShapeError("scaled array content differs at row " + std::to_string(r));
    }

    translinear::TranslinearConfig plain;
    translinear::TranslinearConfig mirrored;
    mirrored.mirror_ratio = k;

    const RowCurrents a = row_currents(base, query);
    const RowCurrents b = row_currents(scaled, query);
    ScalingCheck check;
    check.equivalent = true;
    for (std::size_t r = 0; r < rows; ++r) {
        if (a.iy[r] <= 0.0) continue;  // empty word; no translinear output defined
        const double iz_a = translinear::squared_ratio(a.ix[r], a.iy[r], plain).iz;
        const double iz_b = translinear::squared_ratio(b.ix[r], b.iy[r], mirrored).iz;
        const double rel = iz_a == 0.0 ? std::abs(iz_b) : std::abs(iz_b - iz_a) / iz_a;
        check.max_rel_error = std::max(check.max_rel_error, rel);
        if (rel >= tolerance) check.equivalent = false;
    }
    return check;
}

}  // namespace cosime::array
