#pragma once

// Random Bedford-McMullen carpets: grid IFS specs, dimension formulas, approximate squares,
// exact mixed-radix occupancy grids, the covering bound and the tangent product target.

#include "assouadlab/grid.hpp"
#include "assouadlab/rational.hpp"
#include "assouadlab/words.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace assouadlab {

struct Digit {
    int a = 0; // column, 0 <= a < m
    int b = 0; // row, 0 <= b < n

    auto operator<=>(const Digit&) const = default;
};

struct GridShape {
    int m = 2;
    int n = 3;
};

/// Maps (x, y) -> ((x + a)/m, (y + b)/n) for each chosen digit, with n > m >= 2.
class CarpetIFS {
public:
    CarpetIFS(int m, int n, std::vector<Digit> digits);

    int m() const { return m_; }
    int n() const { return n_; }
    GridShape shape() const { return {m_, n_}; }
    const std::vector<Digit>& digits() const { return digits_; }
    std::size_t size() const { return digits_.size(); }

    int columns() const { return columns_; }       // A: non-empty columns
    int max_column_count() const { return max_b_; } // B: most digits in one column
    int max_column() const { return max_col_; }    // lowest column attaining B
    /// Distinct column indices, ascending.
    const std::vector<int>& column_values() const { return column_values_; }
    /// Rows chosen in column `a`, ascending.
    std::vector<int> rows_in_column(int a) const;

    bool operator==(const CarpetIFS& o) const { return m_ == o.m_ && n_ == o.n_ && digits_ == o.digits_; }

private:
    int m_;
    int n_;
    std::vector<Digit> digits_;
    int columns_ = 0;
    int max_b_ = 0;
    int max_col_ = 0;
    std::vector<int> column_values_;
};

class CarpetRIFS {
public:
    CarpetRIFS(std::vector<CarpetIFS> ifss, ProbabilityVector probs);

    const std::vector<CarpetIFS>& ifss() const { return ifss_; }
    const CarpetIFS& ifs(Letter letter) const { return ifss_.at(letter - 1); }
    const ProbabilityVector& probs() const { return probs_; }
    std::size_t alphabet_size() const { return ifss_.size(); }
    std::vector<GridShape> shapes() const;
    int m_max() const;
    int n_max() const;
    bool uniform_grid() const;

    bool operator==(const CarpetRIFS&) const = default;

private:
    std::vector<CarpetIFS> ifss_;
    ProbabilityVector probs_;
};

/// log A / log m + log B / log n.
double mackay_dim(const CarpetIFS& ifs);

/// Standard deterministic carpet formulas, offered only as comparison inputs for gui_li_average.
double bm_box_dim(const CarpetIFS& ifs);
double bm_hausdorff_dim(const CarpetIFS& ifs);

struct CarpetAssouad {
    double value = 0;
    double column_term = 0; // max_i log A_i / log m_i
    double row_term = 0;    // max_i log B_i / log n_i
    Letter i = 1;           // attains the column term (lowest index on ties)
    Letter j = 1;           // attains the row term
    const char* label = "";
};

CarpetAssouad as_assouad_carpet(const CarpetRIFS& rifs);
CarpetAssouad sure_upper_carpet(const CarpetRIFS& rifs);

/// sum_i p_i dims[i]; requires m_i = m and n_i = n for all letters.
double gui_li_average(const CarpetRIFS& rifs, std::span<const double> per_ifs_dims);

struct KScales {
    std::size_t k1 = 0; // least k with prod_{l<=k} 1/n_{w_l} <= R
    std::size_t k2 = 0; // least k with prod_{l<=k} 1/m_{w_l} <= R
};

/// Exact scale indices for R in (0,1). Throws insufficient_prefix when the word is too short.
KScales k_scales(std::span<const Letter> word, std::span<const GridShape> shapes, const Rational& R);
KScales k_scales(std::span<const Letter> word, const CarpetRIFS& rifs, const Rational& R);

/// [x_lo, x_hi] x [y_lo, y_hi] with base prod_{l<=k2} 1/m and height prod_{l<=k1} 1/n.
struct ApproxSquare {
    Rational x_lo, x_hi, y_lo, y_hi;
    std::size_t k1 = 0;
    std::size_t k2 = 0;

    Window window() const { return {{x_lo, y_lo}, {x_hi, y_hi}}; }
};

/// The approximate R-square along `digit_path` (0-based digit indices per level).
ApproxSquare approximate_square(std::span<const Letter> word, const CarpetRIFS& rifs, const Rational& R,
                                std::span<const std::size_t> digit_path);

/// Checks base in (R/m_max, R] and height in (R/n_max, R] exactly.
bool approx_square_sides_ok(const ApproxSquare& q, const CarpetRIFS& rifs, const Rational& R);

struct CarpetGrid {
    std::size_t depth = 0;
    GridSet cells; // resolution (prod m, prod n)
};

/// All depth-k digit paths as cells of the mixed-radix grid.
CarpetGrid carpet_grid(std::span<const Letter> word, const CarpetRIFS& rifs, std::size_t depth,
                       std::size_t max_cells = 20'000'000);

/// Depth-k cells inside the approximate square `q` whose defining path is `digit_path`
/// (same resolution as carpet_grid; only the cells inside q are enumerated).
CarpetGrid carpet_grid_in_square(std::span<const Letter> word, const CarpetRIFS& rifs, std::size_t depth,
                                 const ApproxSquare& q, std::span<const std::size_t> digit_path,
                                 std::size_t max_cells = 20'000'000);

struct CoverSample {
    std::size_t cell = 0; // index into the grid's cells
    Rational R;
    Rational r;
};

struct CoverRecord {
    CoverSample sample;
    std::uint64_t count = 0; // approximate r-squares inside the approximate R-square at the cell
    double bound = 0;        // m_max n_max (R/r)^s
    std::optional<std::uint64_t> ball_count; // r-grid squares meeting B(x,R), informational
};

struct CoveringReport {
    std::size_t samples = 0;
    std::size_t violations = 0;
    double max_ratio = 0;      // max count / bound
    double exponent = 0;       // s used in the bound
    double constant = 0;       // m_max n_max
    double fitted_growth = 0;  // slope of log count vs log(R/r) over samples with R > r
    double max_ball_ratio = 0; // max ball_count / bound (no sure guarantee for this count)
    std::vector<CoverRecord> records;
};

/// Log-uniform (R, r) with the finest resolvable r = cell width, centers uniform over occupied cells.
std::vector<CoverSample> sample_cover_triples(const CarpetGrid& grid, std::size_t count, std::uint64_t seed,
                                              double rho = 0.25);

/// Checks N_r(Q_x n F) <= m_max n_max (R/r)^s at every sample, where Q_x is the approximate
/// R-square containing the sampled cell and the cover uses approximate r-squares (sides <= r).
CoveringReport covering_upper_check(std::span<const Letter> word, const CarpetRIFS& rifs, const CarpetGrid& grid,
                                    std::span<const CoverSample> samples, bool with_ball_counts = false);

/// Level-`level` approximation of pi_1(F_i) x E_j on the (m_i^level) x (n_j^level) grid.
CarpetGrid tangent_product_target(const CarpetRIFS& rifs, Letter i, Letter j, std::size_t level);

/// Digit path of length k2 for a scheduled stage: the j-run follows the maximal column of I_j,
/// every other level takes the first digit of its letter.
std::vector<std::size_t> good_square_path(std::span<const Letter> word, const CarpetRIFS& rifs,
                                          const CarpetScheduleStage& stage, Letter j);

struct ScheduleLevel {
    std::size_t n = 0;
    double l = 0;     // ceil(-log 2 / log(1 - p_j^n p_i^n)), may be +inf when saturated
    double K = 0;     // K(n), +inf once it overflows
    bool saturated = false;
};

struct ScheduleQuantities {
    double theta = 0; // max log n_i / min log m_i
    std::vector<ScheduleLevel> levels;
};

/// Read-only view of the full-measure schedule numbers; K_n(m+1) = ceil(theta K_n(m)) + n.
ScheduleQuantities schedule_quantities(const CarpetRIFS& rifs, Letter i, Letter j, std::size_t max_n);

} // namespace assouadlab
