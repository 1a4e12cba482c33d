#pragma once

#include "assouadlab/rational.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace assouadlab {

/// Finite occupancy on an integer grid over the unit frame [0,1]^d.
///
/// Cell c occupies prod_a [c_a / res_a, (c_a + 1) / res_a]. Resolutions may differ per axis
/// (carpet grids are anisotropic). Cells are stored flat, sorted lexicographically and unique,
/// so two GridSets with the same occupancy compare equal.
class GridSet {
public:
    GridSet() = default;
    GridSet(std::vector<std::int64_t> resolution, std::vector<std::int64_t> flat_cells);

    static GridSet full(std::vector<std::int64_t> resolution);

    std::size_t dim() const { return resolution_.size(); }
    std::size_t size() const { return dim() == 0 ? 0 : cells_.size() / dim(); }
    bool empty() const { return cells_.empty(); }

    const std::vector<std::int64_t>& resolution() const { return resolution_; }
    const std::vector<std::int64_t>& flat() const { return cells_; }

    std::span<const std::int64_t> cell(std::size_t index) const {
        return {cells_.data() + index * dim(), dim()};
    }

    /// Center of cell `index` along `axis`, in unit-frame coordinates.
    double center(std::size_t index, std::size_t axis) const {
        return (static_cast<double>(cells_[index * dim() + axis]) + 0.5) / static_cast<double>(resolution_[axis]);
    }

    /// Largest cell side length over all axes.
    double max_cell_side() const;
    double cell_diagonal() const;

    bool contains(std::span<const std::int64_t> c) const;
    /// Index of cell c, or size() when absent.
    std::size_t find(std::span<const std::int64_t> c) const;

    /// First cells with coordinate on axis 0 in [lo, hi): contiguous thanks to the lexicographic order.
    std::pair<std::size_t, std::size_t> axis0_range(std::int64_t lo, std::int64_t hi) const;

    bool operator==(const GridSet& other) const = default;

private:
    std::vector<std::int64_t> resolution_;
    std::vector<std::int64_t> cells_;
};

/// Axis-aligned rectangle with exact rational corners, used as a blow-up window.
struct Window {
    std::vector<Rational> lo;
    std::vector<Rational> hi;
};

/// Occupied cells inside `window`, renormalized to the unit frame at the induced resolution
/// res_a * (hi_a - lo_a). The window must be aligned to the grid (corners on cell boundaries).
/// Throws invalid-input for windows outside the frame or misaligned; scale error when empty.
GridSet blowup(const GridSet& set, const Window& window);

/// The exact window covered by `cell` in a grid of the given resolution.
Window cell_window(std::span<const std::int64_t> cell, std::span<const std::int64_t> resolution);

} // namespace assouadlab
