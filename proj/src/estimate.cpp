#include "assouadlab/estimate.hpp"

#include "assouadlab/errors.hpp"
#include "assouadlab/parallel.hpp"
#include "assouadlab/prng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

namespace assouadlab {

namespace {

// Shared by the reference and the indexed kernels so that both make identical float decisions.
inline double center_dist2(const GridSet& S, std::size_t a, std::size_t b) {
    double acc = 0;
    for (std::size_t axis = 0; axis < S.dim(); ++axis) {
        const double diff = S.center(a, axis) - S.center(b, axis);
        acc += diff * diff;
    }
    return acc;
}

inline std::int64_t square_index(double coordinate, double r) {
    return static_cast<std::int64_t>(std::floor(coordinate / r));
}

void check_count_args(const GridSet& S, std::size_t center, double R, double r) {
    if (center >= S.size()) {
        throw invalid_input("center index out of range");
    }
    if (!(R > 0) || !(r > 0)) {
        throw invalid_input("scales must be positive");
    }
    if (r < S.max_cell_side()) {
        throw scale_error("r = " + std::to_string(r) + " is finer than the cell side " +
                          std::to_string(S.max_cell_side()));
    }
}

} // namespace

std::uint64_t local_count_reference(const GridSet& S, std::size_t center, double R, double r) {
    check_count_args(S, center, R, r);
    const double R2 = R * R;
    std::set<std::vector<std::int64_t>> squares;
    for (std::size_t k = 0; k < S.size(); ++k) {
        if (center_dist2(S, center, k) <= R2) {
            std::vector<std::int64_t> q(S.dim());
            for (std::size_t a = 0; a < S.dim(); ++a) {
                q[a] = square_index(S.center(k, a), r);
            }
            squares.insert(std::move(q));
        }
    }
    return squares.size();
}

CoverIndex::CoverIndex(const GridSet& S, double r) : set_(&S), r_(r) {
    if (S.empty()) {
        throw invalid_input("cannot index an empty set");
    }
    if (!(r > 0)) {
        throw invalid_input("r must be positive");
    }
    if (r < S.max_cell_side()) {
        throw scale_error("r = " + std::to_string(r) + " is finer than the cell side " +
                          std::to_string(S.max_cell_side()));
    }
    const std::size_t d = S.dim();
    span_.resize(d);
    unsigned __int128 total = 1;
    for (std::size_t a = 0; a < d; ++a) {
        span_[a] = square_index(1.0, r) + 1;
        total *= static_cast<unsigned __int128>(span_[a]);
    }
    if (total > std::numeric_limits<std::uint64_t>::max()) {
        throw scale_error("too many r-squares to index");
    }
    std::vector<std::pair<std::uint64_t, std::size_t>> tagged(S.size());
    for (std::size_t k = 0; k < S.size(); ++k) {
        std::uint64_t key = 0;
        for (std::size_t a = 0; a < d; ++a) {
            key = key * static_cast<std::uint64_t>(span_[a]) + static_cast<std::uint64_t>(square_index(S.center(k, a), r));
        }
        tagged[k] = {key, k};
    }
    std::sort(tagged.begin(), tagged.end());
    members_.reserve(tagged.size());
    for (std::size_t k = 0; k < tagged.size(); ++k) {
        if (k == 0 || tagged[k].first != tagged[k - 1].first) {
            keys_.push_back(tagged[k].first);
            offsets_.push_back(k);
        }
        members_.push_back(tagged[k].second);
    }
    offsets_.push_back(tagged.size());
}

std::uint64_t CoverIndex::count(std::size_t center, double R) const {
    const GridSet& S = *set_;
    check_count_args(S, center, R, r_);
    const std::size_t d = S.dim();
    const double R2 = R * R;
    // Square ranges padded by one on each side to absorb rounding in x +- R.
    std::vector<std::int64_t> lo(d), hi(d);
    std::vector<std::uint64_t> stride(d, 1);
    for (std::size_t a = d; a-- > 0;) {
        const double x = S.center(center, a);
        lo[a] = std::max<std::int64_t>(0, square_index(x - R, r_) - 1);
        hi[a] = std::min<std::int64_t>(span_[a] - 1, square_index(x + R, r_) + 1);
        if (a + 1 < d) {
            stride[a] = stride[a + 1] * static_cast<std::uint64_t>(span_[a + 1]);
        }
    }
    std::uint64_t count = 0;
    auto square_hit = [&](std::size_t q) {
        for (std::size_t i = offsets_[q]; i < offsets_[q + 1]; ++i) {
            if (center_dist2(S, center, members_[i]) <= R2) {
                return true;
            }
        }
        return false;
    };
    // Walk the leading axes value by value; on the last axis the occupied squares in range
    // form one contiguous run of keys.
    auto visit = [&](auto&& self, std::size_t axis, std::uint64_t base, std::size_t first, std::size_t last) -> void {
        if (axis + 1 == d) {
            auto b = std::lower_bound(keys_.begin() + static_cast<std::ptrdiff_t>(first),
                                      keys_.begin() + static_cast<std::ptrdiff_t>(last),
                                      base + static_cast<std::uint64_t>(lo[axis]));
            for (auto it = b; it != keys_.begin() + static_cast<std::ptrdiff_t>(last) &&
                              *it <= base + static_cast<std::uint64_t>(hi[axis]);
                 ++it) {
                if (square_hit(static_cast<std::size_t>(it - keys_.begin()))) {
                    ++count;
                }
            }
            return;
        }
        for (std::int64_t v = lo[axis]; v <= hi[axis]; ++v) {
            const std::uint64_t start = base + static_cast<std::uint64_t>(v) * stride[axis];
            auto b = std::lower_bound(keys_.begin() + static_cast<std::ptrdiff_t>(first),
                                      keys_.begin() + static_cast<std::ptrdiff_t>(last), start);
            auto e = std::lower_bound(b, keys_.begin() + static_cast<std::ptrdiff_t>(last), start + stride[axis]);
            if (b != e) {
                self(self, axis + 1, start, static_cast<std::size_t>(b - keys_.begin()),
                     static_cast<std::size_t>(e - keys_.begin()));
            }
            first = static_cast<std::size_t>(e - keys_.begin());
        }
    };
    visit(visit, 0, 0, 0, keys_.size());
    return count;
}

std::uint64_t local_count(const GridSet& S, std::size_t center, double R, double r) {
    return CoverIndex(S, r).count(center, R);
}

std::uint64_t sup_local_count(const GridSet& S, std::span<const std::size_t> centers, double R, double r) {
    const CoverIndex index(S, r);
    for (std::size_t c : centers) {
        check_count_args(S, c, R, r);
    }
    std::uint64_t best = 0;
    const auto n = static_cast<std::ptrdiff_t>(centers.size());
#pragma omp parallel for schedule(dynamic, 16) reduction(max : best) num_threads(thread_count())
    for (std::ptrdiff_t k = 0; k < n; ++k) {
        best = std::max(best, index.count(centers[static_cast<std::size_t>(k)], R));
    }
    return best;
}

std::uint64_t sup_local_count_reference(const GridSet& S, std::span<const std::size_t> centers, double R,
                                        double r) {
    std::uint64_t best = 0;
    for (std::size_t c : centers) {
        best = std::max(best, local_count_reference(S, c, R, r));
    }
    return best;
}

ScaleLadder doubling_ladder(const GridSet& S, double rho) {
    ScaleLadder ladder;
    ladder.rho = rho;
    const double r = S.max_cell_side();
    for (double R = 2 * r; R <= rho; R *= 2) {
        ladder.pairs.push_back({R, r});
    }
    if (ladder.pairs.empty()) {
        throw scale_error("grid too coarse for a ladder below rho = " + std::to_string(rho));
    }
    return ladder;
}

void validate_ladder(const GridSet& S, const ScaleLadder& ladder) {
    if (ladder.pairs.empty()) {
        throw invalid_input("empty scale ladder");
    }
    for (const auto& pr : ladder.pairs) {
        if (!(pr.r > 0) || !(pr.r < pr.R) || !(pr.R <= ladder.rho)) {
            throw invalid_input("ladder pairs need 0 < r < R <= rho, got R=" + std::to_string(pr.R) +
                                " r=" + std::to_string(pr.r));
        }
        if (pr.r < S.max_cell_side()) {
            throw scale_error("ladder r = " + std::to_string(pr.r) + " below the cell side " +
                              std::to_string(S.max_cell_side()));
        }
    }
}

std::vector<std::size_t> choose_centers(const GridSet& S, const CenterChoice& choice) {
    if (S.empty()) {
        throw scale_error("no occupied cells to center balls on");
    }
    std::vector<std::size_t> out;
    if (!choice.sample || *choice.sample >= S.size()) {
        out.resize(S.size());
        std::iota(out.begin(), out.end(), std::size_t{0});
        return out;
    }
    for (std::size_t k = 0; k < *choice.sample; ++k) {
        out.push_back(static_cast<std::size_t>(splitmix64_at(choice.seed, k) % S.size()));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

AssouadEstimate assouad_estimate(const GridSet& S, const ScaleLadder& ladder, const CenterChoice& centers) {
    validate_ladder(S, ladder);
    const auto idx = choose_centers(S, centers);
    AssouadEstimate out;
    out.ladder = ladder;
    out.centers = idx.size();
    std::vector<double> xs, ys;
    for (const auto& pr : ladder.pairs) {
        const auto M = sup_local_count(S, idx, pr.R, pr.r);
        out.counts.push_back(M);
        xs.push_back(std::log(pr.R / pr.r));
        ys.push_back(std::log(static_cast<double>(M)));
    }
    const double n = static_cast<double>(xs.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        sxx += (xs[k] - mx) * (xs[k] - mx);
        sxy += (xs[k] - mx) * (ys[k] - my);
    }
    out.exponent = sxx > 0 ? sxy / sxx : 0.0;
    out.intercept = my - out.exponent * mx;
    double ss = 0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        const double e = ys[k] - (out.intercept + out.exponent * xs[k]);
        ss += e * e;
    }
    out.residual = std::sqrt(ss / n);
    return out;
}

namespace {

std::vector<double> centers_of(const GridSet& S) {
    std::vector<double> pts(S.size() * S.dim());
    for (std::size_t k = 0; k < S.size(); ++k) {
        for (std::size_t a = 0; a < S.dim(); ++a) {
            pts[k * S.dim() + a] = S.center(k, a);
        }
    }
    return pts;
}

void check_pair(const GridSet& A, const GridSet& B) {
    if (A.empty() || B.empty()) {
        throw invalid_input("distances need non-empty sets");
    }
    if (A.dim() != B.dim()) {
        throw invalid_input("distance between sets of different dimension");
    }
}

inline double dist2(const double* a, const double* b, std::size_t dim) {
    double acc = 0;
    for (std::size_t k = 0; k < dim; ++k) {
        const double diff = a[k] - b[k];
        acc += diff * diff;
    }
    return acc;
}

double directed_reference(std::span<const double> A, std::span<const double> B, std::size_t dim) {
    double worst = 0;
    for (std::size_t i = 0; i < A.size(); i += dim) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < B.size(); j += dim) {
            best = std::min(best, dist2(&A[i], &B[j], dim));
        }
        worst = std::max(worst, best);
    }
    return std::sqrt(worst);
}

// Uniform bucket grid over the bounding box of B; nearest neighbours found ring by ring.
class NearestIndex {
public:
    NearestIndex(std::span<const double> B, std::size_t dim) : B_(B), dim_(dim) {
        const std::size_t n = B.size() / dim;
        lo_.assign(dim, std::numeric_limits<double>::infinity());
        std::vector<double> hi(dim, -std::numeric_limits<double>::infinity());
        for (std::size_t k = 0; k < n; ++k) {
            for (std::size_t a = 0; a < dim; ++a) {
                lo_[a] = std::min(lo_[a], B[k * dim + a]);
                hi[a] = std::max(hi[a], B[k * dim + a]);
            }
        }
        double extent = 0;
        for (std::size_t a = 0; a < dim; ++a) {
            extent = std::max(extent, hi[a] - lo_[a]);
        }
        const double cap = std::pow(2.0, 22.0 / static_cast<double>(dim));
        g_ = static_cast<std::int64_t>(std::clamp(std::floor(std::pow(static_cast<double>(n), 1.0 / static_cast<double>(dim))), 1.0, cap));
        h_ = extent > 0 ? extent / static_cast<double>(g_) : 1.0;
        std::size_t total = 1;
        for (std::size_t a = 0; a < dim; ++a) {
            total *= static_cast<std::size_t>(g_);
        }
        offsets_.assign(total + 1, 0);
        std::vector<std::size_t> bucket(n);
        for (std::size_t k = 0; k < n; ++k) {
            bucket[k] = bucket_of(&B[k * dim]);
            ++offsets_[bucket[k] + 1];
        }
        std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
        members_.resize(n);
        std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
        for (std::size_t k = 0; k < n; ++k) {
            members_[fill[bucket[k]]++] = k;
        }
    }

    /// Squared distance to the nearest point of B. Stops early, returning some value <= stop,
    /// once a point within sqrt(stop) is found.
    double nearest2(const double* x, double stop = -1) const {
        std::vector<std::int64_t> c(dim_);
        for (std::size_t a = 0; a < dim_; ++a) {
            c[a] = cell(x[a], a);
        }
        double best = std::numeric_limits<double>::infinity();
        std::vector<std::int64_t> off(dim_);
        const std::size_t last = dim_ - 1;
        for (std::int64_t ring = 0; ring <= g_; ++ring) {
            // Points in ring k are at least (k - 1) h away from x; one more ring of slack for rounding.
            if (ring >= 2) {
                const double gap = static_cast<double>(ring - 2) * h_;
                if (gap > 0 && gap * gap > best) {
                    break;
                }
            }
            // Walk the shell of Chebyshev radius `ring`: the last axis only takes +-ring unless
            // an earlier axis already sits on the shell.
            std::fill(off.begin(), off.end(), -ring);
            for (;;) {
                std::int64_t cheb = 0;
                for (std::size_t a = 0; a < last; ++a) {
                    cheb = std::max(cheb, std::abs(off[a]));
                }
                const std::int64_t step = (cheb == ring || ring == 0) ? 1 : 2 * ring;
                for (off[last] = -ring; off[last] <= ring; off[last] += step) {
                    scan(c, off, x, best);
                }
                if (best <= stop) {
                    return best;
                }
                std::size_t a = last;
                while (a-- > 0) {
                    if (++off[a] <= ring) {
                        break;
                    }
                    off[a] = -ring;
                }
                if (a == static_cast<std::size_t>(-1)) {
                    break;
                }
            }
        }
        return best;
    }

private:
    void scan(std::span<const std::int64_t> c, std::span<const std::int64_t> off, const double* x, double& best) const {
        std::size_t flat = 0;
        for (std::size_t a = 0; a < dim_; ++a) {
            const std::int64_t v = c[a] + off[a];
            if (v < 0 || v >= g_) {
                return;
            }
            flat = flat * static_cast<std::size_t>(g_) + static_cast<std::size_t>(v);
        }
        for (std::size_t i = offsets_[flat]; i < offsets_[flat + 1]; ++i) {
            best = std::min(best, dist2(x, &B_[members_[i] * dim_], dim_));
        }
    }

    std::int64_t cell(double v, std::size_t a) const {
        return std::clamp<std::int64_t>(static_cast<std::int64_t>(std::floor((v - lo_[a]) / h_)), 0, g_ - 1);
    }

    std::size_t bucket_of(const double* x) const {
        std::size_t flat = 0;
        for (std::size_t a = 0; a < dim_; ++a) {
            flat = flat * static_cast<std::size_t>(g_) + static_cast<std::size_t>(cell(x[a], a));
        }
        return flat;
    }

    std::span<const double> B_;
    std::size_t dim_;
    std::vector<double> lo_;
    std::int64_t g_ = 1;
    double h_ = 1;
    std::vector<std::size_t> offsets_;
    std::vector<std::size_t> members_;
};

double directed(std::span<const double> A, std::span<const double> B, std::size_t dim) {
    const NearestIndex index(B, dim);
    const auto n = static_cast<std::ptrdiff_t>(A.size() / dim);
    double worst = 0;
#pragma omp parallel for schedule(dynamic, 64) reduction(max : worst) num_threads(thread_count())
    for (std::ptrdiff_t k = 0; k < n; ++k) {
        // Points already within the running max cannot raise it, so their search may stop early.
        worst = std::max(worst, index.nearest2(&A[static_cast<std::size_t>(k) * dim], worst));
    }
    return std::sqrt(worst);
}

void check_points(std::span<const double> A, std::span<const double> B, std::size_t dim) {
    if (dim == 0 || A.empty() || B.empty() || A.size() % dim != 0 || B.size() % dim != 0) {
        throw invalid_input("distances need non-empty point clouds of matching dimension");
    }
}

} // namespace

double pseudo_hausdorff(const GridSet& A, const GridSet& B) {
    check_pair(A, B);
    return directed(centers_of(A), centers_of(B), A.dim());
}

double pseudo_hausdorff_reference(const GridSet& A, const GridSet& B) {
    check_pair(A, B);
    return directed_reference(centers_of(A), centers_of(B), A.dim());
}

double hausdorff_distance(const GridSet& A, const GridSet& B) {
    check_pair(A, B);
    const auto a = centers_of(A);
    const auto b = centers_of(B);
    return std::max(directed(a, b, A.dim()), directed(b, a, A.dim()));
}

double hausdorff_distance_reference(const GridSet& A, const GridSet& B) {
    check_pair(A, B);
    const auto a = centers_of(A);
    const auto b = centers_of(B);
    return std::max(directed_reference(a, b, A.dim()), directed_reference(b, a, A.dim()));
}

double pseudo_hausdorff_points(std::span<const double> A, std::span<const double> B, std::size_t dim) {
    check_points(A, B, dim);
    return directed(A, B, dim);
}

double hausdorff_distance_points(std::span<const double> A, std::span<const double> B, std::size_t dim) {
    check_points(A, B, dim);
    return std::max(directed(A, B, dim), directed(B, A, dim));
}

ConvergenceReport tangent_convergence(std::span<const GridSet> blown, std::span<const GridSet> targets,
                                      std::span<const double> bounds) {
    if (blown.size() < 2 || blown.size() != targets.size() || bounds.size() != blown.size()) {
        throw invalid_input("tangent convergence needs >= 2 stages with one target and one bound each");
    }
    ConvergenceReport rep;
    for (std::size_t l = 0; l < blown.size(); ++l) {
        const double dist = hausdorff_distance(blown[l], targets[l]);
        rep.distances.push_back(dist);
        rep.bounds.push_back(bounds[l]);
        rep.dominated = rep.dominated && dist <= bounds[l];
    }
    return rep;
}

ConvergenceReport tangent_convergence(const GridSet& S, std::span<const Window> windows,
                                      std::span<const GridSet> targets, std::span<const double> bounds) {
    std::vector<GridSet> blown;
    blown.reserve(windows.size());
    for (const auto& w : windows) {
        blown.push_back(blowup(S, w));
    }
    return tangent_convergence(std::span<const GridSet>(blown), targets, bounds);
}

} // namespace assouadlab
