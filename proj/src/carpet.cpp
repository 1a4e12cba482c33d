#include "assouadlab/carpet.hpp"

#include "assouadlab/errors.hpp"
#include "assouadlab/estimate.hpp"
#include "assouadlab/prng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

namespace assouadlab {

CarpetIFS::CarpetIFS(int m, int n, std::vector<Digit> digits) : m_(m), n_(n), digits_(std::move(digits)) {
    if (m_ < 2 || n_ <= m_) {
        throw invalid_input("carpet grid needs n > m >= 2, got m=" + std::to_string(m_) + " n=" + std::to_string(n_));
    }
    if (digits_.empty()) {
        throw invalid_input("carpet IFS needs at least one chosen rectangle");
    }
    std::set<Digit> seen;
    std::map<int, int> per_column;
    for (const auto& dg : digits_) {
        if (dg.a < 0 || dg.a >= m_ || dg.b < 0 || dg.b >= n_) {
            throw invalid_input("digit (" + std::to_string(dg.a) + "," + std::to_string(dg.b) + ") outside the " +
                                std::to_string(m_) + "x" + std::to_string(n_) + " grid");
        }
        if (!seen.insert(dg).second) {
            throw invalid_input("duplicate digit (" + std::to_string(dg.a) + "," + std::to_string(dg.b) + ")");
        }
        ++per_column[dg.a];
    }
    columns_ = static_cast<int>(per_column.size());
    for (const auto& [col, count] : per_column) {
        column_values_.push_back(col);
        if (count > max_b_) {
            max_b_ = count;
            max_col_ = col;
        }
    }
}

std::vector<int> CarpetIFS::rows_in_column(int a) const {
    std::vector<int> rows;
    for (const auto& dg : digits_) {
        if (dg.a == a) {
            rows.push_back(dg.b);
        }
    }
    std::sort(rows.begin(), rows.end());
    return rows;
}

CarpetRIFS::CarpetRIFS(std::vector<CarpetIFS> ifss, ProbabilityVector probs)
    : ifss_(std::move(ifss)), probs_(std::move(probs)) {
    if (ifss_.empty()) {
        throw invalid_input("a carpet RIFS needs at least one IFS");
    }
    if (ifss_.size() != probs_.size()) {
        throw invalid_input("probability vector length " + std::to_string(probs_.size()) + " != number of IFSs " +
                            std::to_string(ifss_.size()));
    }
}

std::vector<GridShape> CarpetRIFS::shapes() const {
    std::vector<GridShape> out;
    for (const auto& ifs : ifss_) {
        out.push_back(ifs.shape());
    }
    return out;
}

int CarpetRIFS::m_max() const {
    int v = 0;
    for (const auto& ifs : ifss_) {
        v = std::max(v, ifs.m());
    }
    return v;
}

int CarpetRIFS::n_max() const {
    int v = 0;
    for (const auto& ifs : ifss_) {
        v = std::max(v, ifs.n());
    }
    return v;
}

bool CarpetRIFS::uniform_grid() const {
    return std::all_of(ifss_.begin(), ifss_.end(), [&](const CarpetIFS& c) {
        return c.m() == ifss_.front().m() && c.n() == ifss_.front().n();
    });
}

double mackay_dim(const CarpetIFS& ifs) {
    return std::log(static_cast<double>(ifs.columns())) / std::log(static_cast<double>(ifs.m())) +
           std::log(static_cast<double>(ifs.max_column_count())) / std::log(static_cast<double>(ifs.n()));
}

double bm_box_dim(const CarpetIFS& ifs) {
    const double a = ifs.columns();
    const double total = static_cast<double>(ifs.size());
    return std::log(a) / std::log(static_cast<double>(ifs.m())) + std::log(total / a) / std::log(static_cast<double>(ifs.n()));
}

double bm_hausdorff_dim(const CarpetIFS& ifs) {
    const double theta = std::log(static_cast<double>(ifs.m())) / std::log(static_cast<double>(ifs.n()));
    double sum = 0;
    for (int col : ifs.column_values()) {
        sum += std::pow(static_cast<double>(ifs.rows_in_column(col).size()), theta);
    }
    return std::log(sum) / std::log(static_cast<double>(ifs.m()));
}

namespace {

CarpetAssouad carpet_formula(const CarpetRIFS& rifs) {
    CarpetAssouad out;
    out.column_term = -1;
    out.row_term = -1;
    for (std::size_t k = 0; k < rifs.alphabet_size(); ++k) {
        const auto& ifs = rifs.ifss()[k];
        double col = std::log(static_cast<double>(ifs.columns())) / std::log(static_cast<double>(ifs.m()));
        double row = std::log(static_cast<double>(ifs.max_column_count())) / std::log(static_cast<double>(ifs.n()));
        if (col > out.column_term) {
            out.column_term = col;
            out.i = static_cast<Letter>(k + 1);
        }
        if (row > out.row_term) {
            out.row_term = row;
            out.j = static_cast<Letter>(k + 1);
        }
    }
    out.value = out.column_term + out.row_term;
    return out;
}

} // namespace

CarpetAssouad as_assouad_carpet(const CarpetRIFS& rifs) {
    CarpetAssouad out = carpet_formula(rifs);
    out.label = "almost-sure Assouad dimension";
    return out;
}

CarpetAssouad sure_upper_carpet(const CarpetRIFS& rifs) {
    CarpetAssouad out = carpet_formula(rifs);
    out.label = "upper bound for every realization";
    return out;
}

double gui_li_average(const CarpetRIFS& rifs, std::span<const double> per_ifs_dims) {
    if (!rifs.uniform_grid()) {
        throw Error(ErrorKind::not_applicable, "weighted-average formula needs the same (m, n) for every IFS");
    }
    if (per_ifs_dims.size() != rifs.alphabet_size()) {
        throw invalid_input("need one dimension per IFS");
    }
    double acc = 0;
    for (std::size_t k = 0; k < per_ifs_dims.size(); ++k) {
        acc += rifs.probs().values()[k].convert_to<double>() * per_ifs_dims[k];
    }
    return acc;
}

namespace {

// Least k with 1 / prod_{l<=k} f(w_l) <= R, i.e. den(R) <= num(R) * prod.
std::size_t first_scale(std::span<const Letter> word, std::span<const GridShape> shapes, const Rational& R,
                        bool use_n, const char* name) {
    const BigInt num = boost::multiprecision::numerator(R);
    const BigInt den = boost::multiprecision::denominator(R);
    BigInt prod = 1;
    for (std::size_t k = 0; k < word.size(); ++k) {
        const Letter l = word[k];
        if (l < 1 || l > shapes.size()) {
            throw invalid_input("letter " + std::to_string(l) + " outside alphabet 1.." + std::to_string(shapes.size()));
        }
        prod *= use_n ? shapes[l - 1].n : shapes[l - 1].m;
        if (den <= num * prod) {
            return k + 1;
        }
    }
    int best = 0;
    for (const auto& s : shapes) {
        best = std::max(best, use_n ? s.n : s.m);
    }
    long double missing = log_big(den) - log_big(num * prod);
    auto extra = static_cast<std::size_t>(std::ceil(missing / std::log(static_cast<long double>(best))));
    throw Error(ErrorKind::insufficient_prefix, std::string("word of length ") + std::to_string(word.size()) +
                                                    " too short for " + name + "(R=" + to_string(R) +
                                                    "); needs at least " +
                                                    std::to_string(word.size() + std::max<std::size_t>(extra, 1)) +
                                                    " letters");
}

} // namespace

KScales k_scales(std::span<const Letter> word, std::span<const GridShape> shapes, const Rational& R) {
    if (R <= 0 || R >= 1) {
        throw invalid_input("R must lie in (0,1), got " + to_string(R));
    }
    return {first_scale(word, shapes, R, true, "k1"), first_scale(word, shapes, R, false, "k2")};
}

KScales k_scales(std::span<const Letter> word, const CarpetRIFS& rifs, const Rational& R) {
    auto shapes = rifs.shapes();
    return k_scales(word, shapes, R);
}

namespace {

const Digit& path_digit(const CarpetRIFS& rifs, Letter letter, std::size_t index, std::size_t level) {
    const auto& ifs = rifs.ifs(letter);
    if (index >= ifs.size()) {
        throw invalid_input("invalid digit index " + std::to_string(index) + " at level " + std::to_string(level) +
                            " for letter " + std::to_string(letter));
    }
    return ifs.digits()[index];
}

} // namespace

ApproxSquare approximate_square(std::span<const Letter> word, const CarpetRIFS& rifs, const Rational& R,
                                std::span<const std::size_t> digit_path) {
    KScales ks = k_scales(word, rifs, R);
    if (ks.k1 == ks.k2) {
        throw invalid_input("degenerate approximate square request: k1 = k2 = " + std::to_string(ks.k1));
    }
    if (digit_path.size() < ks.k2) {
        throw invalid_input("digit path of length " + std::to_string(digit_path.size()) + " shorter than k2 = " +
                            std::to_string(ks.k2));
    }
    BigInt x = 0, w = 1, y = 0, h = 1;
    for (std::size_t l = 0; l < ks.k2; ++l) {
        const Digit& dg = path_digit(rifs, word[l], digit_path[l], l + 1);
        const auto& ifs = rifs.ifs(word[l]);
        x = x * ifs.m() + dg.a;
        w *= ifs.m();
        if (l < ks.k1) {
            y = y * ifs.n() + dg.b;
            h *= ifs.n();
        }
    }
    ApproxSquare q;
    q.k1 = ks.k1;
    q.k2 = ks.k2;
    q.x_lo = Rational(x, w);
    q.x_hi = Rational(x + 1, w);
    q.y_lo = Rational(y, h);
    q.y_hi = Rational(y + 1, h);
    return q;
}

bool approx_square_sides_ok(const ApproxSquare& q, const CarpetRIFS& rifs, const Rational& R) {
    Rational base = q.x_hi - q.x_lo;
    Rational height = q.y_hi - q.y_lo;
    return base > R / rifs.m_max() && base <= R && height > R / rifs.n_max() && height <= R;
}

namespace {

struct Frame {
    std::int64_t width = 1;
    std::int64_t height = 1;
};

Frame frame_at(std::span<const Letter> word, const CarpetRIFS& rifs, std::size_t depth) {
    Frame f;
    for (std::size_t l = 0; l < depth; ++l) {
        const auto& ifs = rifs.ifs(word[l]);
        if (f.width > std::numeric_limits<std::int64_t>::max() / ifs.m() ||
            f.height > std::numeric_limits<std::int64_t>::max() / ifs.n()) {
            throw invalid_input("carpet grid at depth " + std::to_string(depth) + " exceeds 64-bit coordinates");
        }
        f.width *= ifs.m();
        f.height *= ifs.n();
    }
    return f;
}

void check_depth(std::span<const Letter> word, const CarpetRIFS& rifs, std::size_t depth) {
    if (depth > word.size()) {
        throw invalid_input("depth " + std::to_string(depth) + " exceeds word length " + std::to_string(word.size()));
    }
    validate_word(word.subspan(0, depth), rifs.alphabet_size());
}

// Expands cells level by level; `allowed(level, digit)` filters digits.
template <class Allowed>
CarpetGrid expand(std::span<const Letter> word, const CarpetRIFS& rifs, std::size_t depth, std::size_t max_cells,
                  Allowed allowed) {
    check_depth(word, rifs, depth);
    Frame f = frame_at(word, rifs, depth);
    std::vector<std::int64_t> cur{0, 0};
    for (std::size_t l = 0; l < depth; ++l) {
        const auto& ifs = rifs.ifs(word[l]);
        std::vector<const Digit*> digits;
        for (const auto& dg : ifs.digits()) {
            if (allowed(l, ifs, dg)) {
                digits.push_back(&dg);
            }
        }
        if ((cur.size() / 2) * digits.size() > max_cells) {
            throw invalid_input("carpet grid at depth " + std::to_string(depth) + " exceeds " +
                                std::to_string(max_cells) + " cells");
        }
        std::vector<std::int64_t> next;
        next.reserve(cur.size() * digits.size());
        for (std::size_t c = 0; c < cur.size(); c += 2) {
            for (const Digit* dg : digits) {
                next.push_back(cur[c] * ifs.m() + dg->a);
                next.push_back(cur[c + 1] * ifs.n() + dg->b);
            }
        }
        cur = std::move(next);
    }
    return {depth, GridSet({f.width, f.height}, std::move(cur))};
}

} // namespace

CarpetGrid carpet_grid(std::span<const Letter> word, const CarpetRIFS& rifs, std::size_t depth, std::size_t max_cells) {
    return expand(word, rifs, depth, max_cells, [](std::size_t, const CarpetIFS&, const Digit&) { return true; });
}

CarpetGrid carpet_grid_in_square(std::span<const Letter> word, const CarpetRIFS& rifs, std::size_t depth,
                                 const ApproxSquare& q, std::span<const std::size_t> digit_path,
                                 std::size_t max_cells) {
    if (depth < q.k2) {
        throw invalid_input("depth must reach k2 of the approximate square");
    }
    return expand(word, rifs, depth, max_cells, [&](std::size_t l, const CarpetIFS& ifs, const Digit& dg) {
        if (l >= q.k2) {
            return true;
        }
        const Digit& fixed = path_digit(rifs, word[l], digit_path[l], l + 1);
        (void)ifs;
        return l < q.k1 ? dg == fixed : dg.a == fixed.a;
    });
}

std::vector<CoverSample> sample_cover_triples(const CarpetGrid& grid, std::size_t count, std::uint64_t seed,
                                              double rho) {
    if (grid.cells.empty()) {
        throw scale_error("cannot sample covering triples from an empty grid");
    }
    const double r_min = grid.cells.max_cell_side();
    if (!(r_min < rho)) {
        throw scale_error("grid too coarse: finest resolvable r = " + std::to_string(r_min) + " >= rho = " +
                          std::to_string(rho));
    }
    SplitMix64 rng(seed);
    std::vector<CoverSample> out;
    out.reserve(count);
    const double lmin = std::log(r_min);
    const double lrho = std::log(rho);
    for (std::size_t s = 0; s < count; ++s) {
        CoverSample cs;
        cs.cell = static_cast<std::size_t>(rng.next() % grid.cells.size());
        double R = std::exp(lmin + (lrho - lmin) * rng.uniform());
        double r = std::exp(lmin + (std::log(R) - lmin) * rng.uniform());
        R = std::clamp(R, r_min, rho);
        r = std::clamp(r, r_min, R);
        cs.R = Rational(R);
        cs.r = Rational(r);
        out.push_back(std::move(cs));
    }
    return out;
}

CoveringReport covering_upper_check(std::span<const Letter> word, const CarpetRIFS& rifs, const CarpetGrid& grid,
                                    std::span<const CoverSample> samples, bool with_ball_counts) {
    const std::size_t depth = grid.depth;
    check_depth(word, rifs, depth);
    const auto shapes = rifs.shapes();
    std::vector<std::int64_t> W(depth + 1, 1), H(depth + 1, 1);
    for (std::size_t l = 0; l < depth; ++l) {
        W[l + 1] = W[l] * shapes[word[l] - 1].m;
        H[l + 1] = H[l] * shapes[word[l] - 1].n;
    }
    if (grid.cells.resolution() != std::vector<std::int64_t>{W[depth], H[depth]}) {
        throw invalid_input("grid does not belong to this word at depth " + std::to_string(depth));
    }
    const CarpetAssouad s = sure_upper_carpet(rifs);
    CoveringReport rep;
    rep.exponent = s.value;
    rep.constant = static_cast<double>(rifs.m_max()) * rifs.n_max();
    rep.samples = samples.size();
    const auto prefix = word.subspan(0, depth);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t fit_n = 0;
    for (const auto& smp : samples) {
        if (smp.cell >= grid.cells.size()) {
            throw invalid_input("sample cell index out of range");
        }
        if (!(smp.r > 0 && smp.r <= smp.R && smp.R < 1)) {
            throw invalid_input("samples need 0 < r <= R < 1");
        }
        KScales big, small;
        try {
            big = k_scales(prefix, shapes, smp.R);
            small = k_scales(prefix, shapes, smp.r);
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::insufficient_prefix) {
                throw scale_error("r = " + std::to_string(to_double(smp.r)) + " not resolvable at depth " +
                                  std::to_string(depth) + " (finest r = 1/" + std::to_string(W[depth]) + ")");
            }
            throw;
        }
        auto cell = grid.cells.cell(smp.cell);
        const std::int64_t fx = W[depth] / W[big.k2];
        const std::int64_t fy = H[depth] / H[big.k1];
        const std::int64_t qx = cell[0] / fx;
        const std::int64_t qy = cell[1] / fy;
        const std::int64_t gx = W[depth] / W[small.k2];
        const std::int64_t gy = H[depth] / H[small.k1];
        std::vector<std::pair<std::int64_t, std::int64_t>> addrs;
        auto [first, last] = grid.cells.axis0_range(qx * fx, (qx + 1) * fx);
        for (std::size_t k = first; k < last; ++k) {
            auto c = grid.cells.cell(k);
            if (c[1] / fy == qy) {
                addrs.emplace_back(c[0] / gx, c[1] / gy);
            }
        }
        std::sort(addrs.begin(), addrs.end());
        addrs.erase(std::unique(addrs.begin(), addrs.end()), addrs.end());

        CoverRecord rec;
        rec.sample = smp;
        rec.count = addrs.size();
        const double ratio_scale = to_double(smp.R / smp.r);
        rec.bound = rep.constant * std::pow(ratio_scale, s.value);
        const double ratio = static_cast<double>(rec.count) / rec.bound;
        rep.max_ratio = std::max(rep.max_ratio, ratio);
        if (ratio > 1.0 + 1e-12) {
            ++rep.violations;
        }
        if (with_ball_counts) {
            auto bc = local_count(grid.cells, smp.cell, to_double(smp.R), to_double(smp.r));
            rec.ball_count = bc;
            rep.max_ball_ratio = std::max(rep.max_ball_ratio, static_cast<double>(bc) / rec.bound);
        }
        if (ratio_scale > 1.0) {
            const double lx = std::log(ratio_scale);
            const double ly = std::log(static_cast<double>(rec.count));
            sx += lx;
            sy += ly;
            sxx += lx * lx;
            sxy += lx * ly;
            ++fit_n;
        }
        rep.records.push_back(std::move(rec));
    }
    if (fit_n >= 2) {
        const double nn = static_cast<double>(fit_n);
        const double denom = nn * sxx - sx * sx;
        rep.fitted_growth = denom > 0 ? (nn * sxy - sx * sy) / denom : 0.0;
    }
    return rep;
}

CarpetGrid tangent_product_target(const CarpetRIFS& rifs, Letter i, Letter j, std::size_t level) {
    const auto& fi = rifs.ifs(i);
    const auto& fj = rifs.ifs(j);
    const auto& cols = fi.column_values();
    const auto rows = fj.rows_in_column(fj.max_column());
    std::vector<std::int64_t> xs{0}, ys{0};
    std::int64_t wx = 1, hy = 1;
    for (std::size_t l = 0; l < level; ++l) {
        std::vector<std::int64_t> nx, ny;
        for (auto x : xs) {
            for (int a : cols) {
                nx.push_back(x * fi.m() + a);
            }
        }
        for (auto y : ys) {
            for (int b : rows) {
                ny.push_back(y * fj.n() + b);
            }
        }
        xs = std::move(nx);
        ys = std::move(ny);
        wx *= fi.m();
        hy *= fj.n();
    }
    std::vector<std::int64_t> flat;
    flat.reserve(xs.size() * ys.size() * 2);
    for (auto x : xs) {
        for (auto y : ys) {
            flat.push_back(x);
            flat.push_back(y);
        }
    }
    return {level, GridSet({wx, hy}, std::move(flat))};
}

std::vector<std::size_t> good_square_path(std::span<const Letter> word, const CarpetRIFS& rifs,
                                          const CarpetScheduleStage& stage, Letter j) {
    if (word.size() < stage.k2) {
        throw invalid_input("word shorter than the stage's k2");
    }
    const auto& fj = rifs.ifs(j);
    std::size_t column_digit = 0;
    for (std::size_t d = 0; d < fj.digits().size(); ++d) {
        if (fj.digits()[d].a == fj.max_column()) {
            column_digit = d;
            break;
        }
    }
    std::vector<std::size_t> path(stage.k2, 0);
    for (std::size_t l = stage.k1; l < stage.k1 + stage.run && l < stage.k2; ++l) {
        if (word[l] != j) {
            throw invalid_input("position " + std::to_string(l + 1) + " is not in the j-run");
        }
        path[l] = column_digit;
    }
    return path;
}

ScheduleQuantities schedule_quantities(const CarpetRIFS& rifs, Letter i, Letter j, std::size_t max_n) {
    ScheduleQuantities out;
    double max_log_n = 0, min_log_m = std::numeric_limits<double>::infinity();
    for (const auto& ifs : rifs.ifss()) {
        max_log_n = std::max(max_log_n, std::log(static_cast<double>(ifs.n())));
        min_log_m = std::min(min_log_m, std::log(static_cast<double>(ifs.m())));
    }
    out.theta = max_log_n / min_log_m;
    const long double pi = log_rational(rifs.probs()(i));
    const long double pj = log_rational(rifs.probs()(j));
    double K = 1;
    bool saturated = false;
    for (std::size_t n = 1; n <= max_n; ++n) {
        ScheduleLevel lv;
        lv.n = n;
        lv.K = saturated ? std::numeric_limits<double>::infinity() : K;
        // q = p_j^n p_i^n; log(1 - q) via log1p for tiny q
        const long double q = std::exp(static_cast<long double>(n) * (pi + pj));
        const long double l = std::ceil(-std::log(2.0L) / std::log1p(-q));
        lv.l = static_cast<double>(l);
        if (saturated || !std::isfinite(lv.l) || lv.l > 1e7) {
            saturated = true;
            lv.saturated = true;
            out.levels.push_back(lv);
            continue;
        }
        for (long long m = 0; m < static_cast<long long>(l); ++m) {
            K = std::ceil(out.theta * K) + static_cast<double>(n);
            if (!std::isfinite(K)) {
                break;
            }
        }
        if (!std::isfinite(K)) {
            saturated = true;
        }
        out.levels.push_back(lv);
    }
    return out;
}

} // namespace assouadlab
