#pragma once

#include <cstddef>
#include <vector>

#include "cosime/binary_vector.hpp"
#include "cosime/device.hpp"
#include "cosime/rng.hpp"

namespace cosime::array {

struct ArrayGeometry {
    std::size_t rows = 2;       // stored words
    std::size_t dim = 1024;     // bits per word
    double scale_factor = 1.0;  // resistor-tuning divisor N: cell current becomes base / N

    void validate() const;
};

/// Both FeFET arrays after programming. The dot-product array (x) gates each
/// cell by the query bit; the norm array (y) drives every search line high.
struct ArrayInstance {
    ArrayGeometry geometry;
    std::vector<BinaryVector> stored;
    std::vector<device::CellParams> cells_x;  // row-major rows x dim
    std::vector<device::CellParams> cells_y;
    double i_cell_nominal = 0.0;

    const device::CellParams& cell_x(std::size_t row, std::size_t bit) const {
        return cells_x[row * geometry.dim + bit];
    }
    const device::CellParams& cell_y(std::size_t row, std::size_t bit) const {
        return cells_y[row * geometry.dim + bit];
    }
};

/// Cell tuned by the divisor N: currents / N, resistances * N.
device::CellParams tune_cell(const device::CellParams& base, double scale_factor);

/// Divisor N that puts the mean stored-word norm current at `iy_target`.
double scale_for_target(const std::vector<BinaryVector>& stored, const device::CellParams& base,
                        double iy_target);

/// Programs both arrays. Cells of the x grid are sampled first (row-major),
/// then the y grid, from `rng`. `supply_scale` scales every cell current.
ArrayInstance program(const std::vector<BinaryVector>& stored, const ArrayGeometry& geometry,
                      const device::CellParams& base_cell, const device::VariationSpec& spec,
                      Rng& rng, double supply_scale = 1.0);

/// Same, seeded from spec.rng_seed.
ArrayInstance program(const std::vector<BinaryVector>& stored, const ArrayGeometry& geometry,
                      const device::CellParams& base_cell, const device::VariationSpec& spec);

struct RowCurrents {
    std::vector<double> ix;  // dot-product wordline currents
    std::vector<double> iy;  // squared-norm wordline currents
};

RowCurrents row_currents(const ArrayInstance& arr, const BinaryVector& query);

struct ScalingCheck {
    bool equivalent = false;
    double max_rel_error = 0.0;
};

/// Compares Iz of the first `base.geometry.rows` rows of `scaled` (cell
/// current divided by k, mirrored back up by k) against `base`.
ScalingCheck scaled_equivalence_check(const ArrayInstance& base, const ArrayInstance& scaled,
                                      const BinaryVector& query, double k,
                                      double tolerance = 1e-9);

}  // namespace cosime::array
