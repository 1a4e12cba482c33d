#include "assouadlab/grid.hpp"

#include "assouadlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace assouadlab {

namespace {

bool lex_less(const std::int64_t* a, const std::int64_t* b, std::size_t d) {
    return std::lexicographical_compare(a, a + d, b, b + d);
}

} // namespace

GridSet::GridSet(std::vector<std::int64_t> resolution, std::vector<std::int64_t> flat_cells)
    : resolution_(std::move(resolution)) {
    const std::size_t d = resolution_.size();
    if (d == 0) {
        throw invalid_input("grid needs at least one axis");
    }
    for (auto r : resolution_) {
        if (r < 1) {
            throw invalid_input("grid resolution must be positive");
        }
    }
    if (flat_cells.size() % d != 0) {
        throw invalid_input("flat cell array length is not a multiple of the dimension");
    }
    const std::size_t n = flat_cells.size() / d;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t a = 0; a < d; ++a) {
            auto c = flat_cells[i * d + a];
            if (c < 0 || c >= resolution_[a]) {
                throw invalid_input("cell coordinate " + std::to_string(c) + " outside resolution " +
                                    std::to_string(resolution_[a]));
            }
        }
    }
    if (d == 1) {
        std::sort(flat_cells.begin(), flat_cells.end());
        flat_cells.erase(std::unique(flat_cells.begin(), flat_cells.end()), flat_cells.end());
        cells_ = std::move(flat_cells);
        return;
    }
    if (d == 2) {
        std::vector<std::pair<std::int64_t, std::int64_t>> pairs(n);
        for (std::size_t i = 0; i < n; ++i) {
            pairs[i] = {flat_cells[2 * i], flat_cells[2 * i + 1]};
        }
        std::sort(pairs.begin(), pairs.end());
        pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
        cells_.resize(pairs.size() * 2);
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            cells_[2 * i] = pairs[i].first;
            cells_[2 * i + 1] = pairs[i].second;
        }
        return;
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    const std::int64_t* base = flat_cells.data();
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return lex_less(base + x * d, base + y * d, d); });
    cells_.reserve(flat_cells.size());
    for (std::size_t k = 0; k < n; ++k) {
        const std::int64_t* c = base + order[k] * d;
        if (k > 0 && std::equal(c, c + d, cells_.end() - static_cast<std::ptrdiff_t>(d))) {
            continue;
        }
        cells_.insert(cells_.end(), c, c + d);
    }
}

GridSet GridSet::full(std::vector<std::int64_t> resolution) {
    std::int64_t total = 1;
    for (auto r : resolution) {
        total *= r;
    }
    const std::size_t d = resolution.size();
    std::vector<std::int64_t> flat(static_cast<std::size_t>(total) * d);
    std::vector<std::int64_t> c(d, 0);
    for (std::int64_t k = 0; k < total; ++k) {
        std::copy(c.begin(), c.end(), flat.begin() + k * static_cast<std::int64_t>(d));
        for (std::size_t a = d; a-- > 0;) {
            if (++c[a] < resolution[a]) {
                break;
            }
            c[a] = 0;
        }
    }
    return GridSet(std::move(resolution), std::move(flat));
}

double GridSet::max_cell_side() const {
    auto m = *std::min_element(resolution_.begin(), resolution_.end());
    return 1.0 / static_cast<double>(m);
}

double GridSet::cell_diagonal() const {
    double s = 0;
    for (auto r : resolution_) {
        s += 1.0 / (static_cast<double>(r) * static_cast<double>(r));
    }
    return std::sqrt(s);
}

std::size_t GridSet::find(std::span<const std::int64_t> c) const {
    const std::size_t d = dim();
    std::size_t lo = 0, hi = size();
    while (lo < hi) {
        std::size_t mid = (lo + hi) / 2;
        if (lex_less(cells_.data() + mid * d, c.data(), d)) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    if (lo < size() && std::equal(c.begin(), c.end(), cells_.begin() + static_cast<std::ptrdiff_t>(lo * d))) {
        return lo;
    }
    return size();
}

bool GridSet::contains(std::span<const std::int64_t> c) const { return find(c) < size(); }

std::pair<std::size_t, std::size_t> GridSet::axis0_range(std::int64_t lo, std::int64_t hi) const {
    const std::size_t d = dim();
    auto first_at_least = [&](std::int64_t v) {
        std::size_t a = 0, b = size();
        while (a < b) {
            std::size_t mid = (a + b) / 2;
            if (cells_[mid * d] < v) {
                a = mid + 1;
            } else {
                b = mid;
            }
        }
        return a;
    };
    return {first_at_least(lo), first_at_least(hi)};
}

GridSet blowup(const GridSet& set, const Window& window) {
    const std::size_t d = set.dim();
    if (window.lo.size() != d || window.hi.size() != d) {
        throw invalid_input("window dimension does not match the grid");
    }
    std::vector<std::int64_t> cell_lo(d), cell_hi(d), induced(d);
    for (std::size_t a = 0; a < d; ++a) {
        if (window.lo[a] < 0 || window.hi[a] > 1 || window.hi[a] <= window.lo[a]) {
            throw invalid_input("window outside the unit frame or with non-positive side");
        }
        Rational lo = window.lo[a] * set.resolution()[a];
        Rational hi = window.hi[a] * set.resolution()[a];
        if (boost::multiprecision::denominator(lo) != 1 || boost::multiprecision::denominator(hi) != 1) {
            throw invalid_input("window is not aligned to the grid on axis " + std::to_string(a));
        }
        cell_lo[a] = boost::multiprecision::numerator(lo).convert_to<std::int64_t>();
        cell_hi[a] = boost::multiprecision::numerator(hi).convert_to<std::int64_t>();
        induced[a] = cell_hi[a] - cell_lo[a];
    }
    std::vector<std::int64_t> flat;
    auto [first, last] = set.axis0_range(cell_lo[0], cell_hi[0]);
    for (std::size_t i = first; i < last; ++i) {
        auto c = set.cell(i);
        bool inside = true;
        for (std::size_t a = 1; a < d && inside; ++a) {
            inside = c[a] >= cell_lo[a] && c[a] < cell_hi[a];
        }
        if (!inside) {
            continue;
        }
        for (std::size_t a = 0; a < d; ++a) {
            flat.push_back(c[a] - cell_lo[a]);
        }
    }
    if (flat.empty()) {
        throw scale_error("blow-up window contains no occupied cells");
    }
    return GridSet(std::move(induced), std::move(flat));
}

Window cell_window(std::span<const std::int64_t> cell, std::span<const std::int64_t> resolution) {
    Window w;
    for (std::size_t a = 0; a < cell.size(); ++a) {
        w.lo.emplace_back(cell[a], resolution[a]);
        w.hi.emplace_back(cell[a] + 1, resolution[a]);
    }
    return w;
}

} // namespace assouadlab
