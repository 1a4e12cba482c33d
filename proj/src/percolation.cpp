#include "assouadlab/percolation.hpp"

#include "assouadlab/errors.hpp"
#include "assouadlab/parallel.hpp"
#include "assouadlab/prng.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace assouadlab {

void validate(const PercConfig& config) {
    if (config.n < 2) {
        throw invalid_input("percolation needs n >= 2, got " + std::to_string(config.n));
    }
    if (config.d < 1 || config.d > 8) {
        throw invalid_input("percolation needs 1 <= d <= 8, got " + std::to_string(config.d));
    }
    if (config.p <= 0 || config.p > 1) {
        throw invalid_input("percolation needs 0 < p <= 1, got " + to_string(config.p));
    }
}

bool supercritical(int n, int d, const Rational& p) {
    return p * ipow(BigInt(n), static_cast<std::uint64_t>(d)) > 1;
}

namespace {

std::uint64_t children_of(int n, int d) {
    std::uint64_t c = 1;
    for (int a = 0; a < d; ++a) {
        c *= static_cast<std::uint64_t>(n);
    }
    return c;
}

void check_depth(int n, int d, std::size_t depth) {
    if (depth > max_depth(n, d)) {
        throw invalid_input("depth " + std::to_string(depth) + " exceeds the 64-bit key limit " +
                            std::to_string(max_depth(n, d)) + " for n=" + std::to_string(n) +
                            " d=" + std::to_string(d));
    }
}

bool keep(std::uint64_t seed, std::size_t level, std::uint64_t key, unsigned __int128 threshold) {
    return static_cast<unsigned __int128>(keyed_draw(seed, level, key)) < threshold;
}

void expand_into(std::span<const std::uint64_t> parents, std::uint64_t C, std::uint64_t seed, std::size_t level,
                 unsigned __int128 threshold, std::vector<std::uint64_t>& out) {
    for (std::uint64_t parent : parents) {
        for (std::uint64_t digit = 0; digit < C; ++digit) {
            const std::uint64_t child = parent * C + digit;
            if (keep(seed, level, child, threshold)) {
                out.push_back(child);
            }
        }
    }
}

} // namespace

std::size_t max_depth(int n, int d) {
    const std::uint64_t C = children_of(n, d);
    std::size_t k = 0;
    unsigned __int128 size = 1;
    while (size * C <= (static_cast<unsigned __int128>(1) << 63U)) {
        size *= C;
        ++k;
    }
    return k;
}

PercLevels::PercLevels(int n, int d, std::vector<std::vector<std::uint64_t>> levels)
    : n_(n), d_(d), children_(children_of(n, d)), levels_(std::move(levels)) {
    if (levels_.empty()) {
        levels_.push_back({0});
    }
    if (levels_.front() != std::vector<std::uint64_t>{0}) {
        throw invalid_input("level 0 must be the single root cube");
    }
    check_depth(n_, d_, depth());
    for (std::size_t k = 1; k < levels_.size(); ++k) {
        auto& lv = levels_[k];
        std::sort(lv.begin(), lv.end());
        lv.erase(std::unique(lv.begin(), lv.end()), lv.end());
        for (std::uint64_t key : lv) {
            if (!std::binary_search(levels_[k - 1].begin(), levels_[k - 1].end(), key / children_)) {
                throw invalid_input("cube at level " + std::to_string(k) + " has no surviving parent");
            }
        }
    }
}

std::vector<std::int64_t> PercLevels::coords(std::size_t k, std::uint64_t key) const {
    std::vector<std::int64_t> c(static_cast<std::size_t>(d_), 0);
    std::int64_t pw = 1;
    for (std::size_t l = 0; l < k; ++l) {
        std::uint64_t digit = key % children_;
        key /= children_;
        for (int a = 0; a < d_; ++a) {
            c[static_cast<std::size_t>(a)] += static_cast<std::int64_t>(digit % static_cast<std::uint64_t>(n_)) * pw;
            digit /= static_cast<std::uint64_t>(n_);
        }
        pw *= n_;
    }
    return c;
}

std::uint64_t PercLevels::key_of(std::size_t k, std::span<const std::int64_t> coords) const {
    std::vector<std::int64_t> c(coords.begin(), coords.end());
    std::uint64_t key = 0;
    std::uint64_t pw = 1;
    for (std::size_t l = 0; l < k; ++l) {
        std::uint64_t digit = 0;
        std::uint64_t place = 1;
        for (int a = 0; a < d_; ++a) {
            digit += static_cast<std::uint64_t>(c[static_cast<std::size_t>(a)] % n_) * place;
            c[static_cast<std::size_t>(a)] /= n_;
            place *= static_cast<std::uint64_t>(n_);
        }
        key += digit * pw;
        pw *= children_;
    }
    return key;
}

bool PercLevels::contains(std::size_t k, std::uint64_t key) const {
    const auto& lv = levels_.at(k);
    return std::binary_search(lv.begin(), lv.end(), key);
}

GridSet PercLevels::grid(std::size_t k) const {
    std::int64_t res = 1;
    for (std::size_t l = 0; l < k; ++l) {
        res *= n_;
    }
    std::vector<std::int64_t> flat;
    flat.reserve(levels_.at(k).size() * static_cast<std::size_t>(d_));
    for (std::uint64_t key : levels_[k]) {
        auto c = coords(k, key);
        flat.insert(flat.end(), c.begin(), c.end());
    }
    return GridSet(std::vector<std::int64_t>(static_cast<std::size_t>(d_), res), std::move(flat));
}

PercLevels simulate_serial(const PercConfig& config, std::size_t depth) {
    validate(config);
    check_depth(config.n, config.d, depth);
    const std::uint64_t C = children_of(config.n, config.d);
    const auto threshold = probability_threshold(config.p);
    std::vector<std::vector<std::uint64_t>> levels{{0}};
    for (std::size_t k = 1; k <= depth; ++k) {
        std::vector<std::uint64_t> next;
        expand_into(levels.back(), C, config.seed, k, threshold, next);
        levels.push_back(std::move(next));
    }
    return PercLevels(config.n, config.d, std::move(levels));
}

PercLevels simulate(const PercConfig& config, std::size_t depth) {
    validate(config);
    check_depth(config.n, config.d, depth);
    const std::uint64_t C = children_of(config.n, config.d);
    const auto threshold = probability_threshold(config.p);
    const int threads = thread_count();
    std::vector<std::vector<std::uint64_t>> levels{{0}};
    for (std::size_t k = 1; k <= depth; ++k) {
        const auto& parents = levels.back();
        // Chunks are fixed by size, not thread count, and concatenated in order, so the
        // (already sorted) result never depends on scheduling.
        constexpr std::size_t chunk = 4096;
        const std::size_t chunks = (parents.size() + chunk - 1) / chunk;
        std::vector<std::vector<std::uint64_t>> parts(chunks);
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads) if (chunks > 1)
        for (std::size_t c = 0; c < chunks; ++c) {
            const std::size_t lo = c * chunk;
            const std::size_t hi = std::min(parents.size(), lo + chunk);
            expand_into(std::span(parents).subspan(lo, hi - lo), C, config.seed, k, threshold, parts[c]);
        }
        std::vector<std::uint64_t> next;
        std::size_t total = 0;
        for (const auto& p : parts) {
            total += p.size();
        }
        next.reserve(total);
        for (const auto& p : parts) {
            next.insert(next.end(), p.begin(), p.end());
        }
        levels.push_back(std::move(next));
    }
    return PercLevels(config.n, config.d, std::move(levels));
}

bool survives_to(const PercConfig& config, std::size_t depth) {
    validate(config);
    check_depth(config.n, config.d, depth);
    if (depth == 0) {
        return true;
    }
    const std::uint64_t C = children_of(config.n, config.d);
    const auto threshold = probability_threshold(config.p);
    // Depth-first with an explicit stack of (level, key); children pushed in reverse so the
    // search order is lexicographic in keys.
    std::vector<std::pair<std::size_t, std::uint64_t>> stack{{0, 0}};
    while (!stack.empty()) {
        auto [k, key] = stack.back();
        stack.pop_back();
        for (std::uint64_t digit = C; digit-- > 0;) {
            const std::uint64_t child = key * C + digit;
            if (keep(config.seed, k + 1, child, threshold)) {
                if (k + 1 == depth) {
                    return true;
                }
                stack.emplace_back(k + 1, child);
            }
        }
    }
    return false;
}

namespace {

long double gen_step(long double q, long double p, long double C) {
    return std::pow(1.0L - p + p * q, C);
}

} // namespace

Extinction extinction_probability(int n, int d, const Rational& p) {
    validate({n, d, p, 0});
    Extinction out;
    if (!supercritical(n, d, p)) {
        out.q = 1;
        out.p_noext = 0;
        return out;
    }
    const long double pp = p.convert_to<long double>();
    const auto C = static_cast<long double>(children_of(n, d));
    long double q = 0;
    for (std::size_t it = 0; it < 100'000'000; ++it) {
        const long double next = gen_step(q, pp, C);
        out.iterations = it + 1;
        const long double delta = next - q;
        q = next;
        if (delta < 1e-16L) {
            break;
        }
    }
    out.q = static_cast<double>(q);
    out.p_noext = static_cast<double>(1.0L - q);
    out.residual = static_cast<double>(std::fabs(q - gen_step(q, pp, C)));
    return out;
}

double survival_iterate(int n, int d, const Rational& p, std::size_t k) {
    validate({n, d, p, 0});
    const long double pp = p.convert_to<long double>();
    const auto C = static_cast<long double>(children_of(n, d));
    long double q = 0;
    for (std::size_t it = 0; it < k; ++it) {
        q = gen_step(q, pp, C);
    }
    return static_cast<double>(q);
}

DimValue hausdorff_dim_percolation(int n, int d, const Rational& p) {
    validate({n, d, p, 0});
    const Rational scaled = p * ipow(BigInt(n), static_cast<std::uint64_t>(d));
    if (scaled < 1) {
        throw Error(ErrorKind::not_applicable, "subcritical: p = " + to_string(p) + " < 1/n^d, the set is a.s. empty");
    }
    if (scaled == 1) {
        return {0.0, "critical p = 1/n^d: the set is a.s. empty; value is the formula's boundary root"};
    }
    return {static_cast<double>(log_rational(scaled) / std::log(static_cast<long double>(n))),
            "almost sure, conditioned on non-extinction"};
}

DimValue assouad_dim_percolation(int n, int d, const Rational& p) {
    validate({n, d, p, 0});
    if (!supercritical(n, d, p)) {
        throw Error(ErrorKind::not_applicable, "subcritical: p = " + to_string(p) + " <= 1/n^d");
    }
    return {static_cast<double>(d), "almost sure, conditioned on non-extinction; independent of p"};
}

DimValue projection_assouad(int n, int d, const Rational& p, int k) {
    validate({n, d, p, 0});
    if (k < 1 || k > d) {
        throw invalid_input("projection rank k must satisfy 1 <= k <= d");
    }
    if (!supercritical(n, d, p)) {
        throw Error(ErrorKind::not_applicable, "subcritical: p = " + to_string(p) + " <= 1/n^d");
    }
    return {static_cast<double>(k), "every rank-k orthogonal projection, almost surely; the set cannot be "
                                    "embedded bi-Lipschitz into a lower-dimensional Euclidean space"};
}

SubtreeQuantities subtree_quantities(std::uint64_t N, std::uint64_t m, const Rational& p, double p_noext) {
    if (N < 2 || m < 1) {
        throw invalid_input("subtree quantities need N >= 2 and m >= 1");
    }
    if (p <= 0 || p > 1 || !(p_noext > 0) || p_noext > 1) {
        throw invalid_input("subtree quantities need 0 < p <= 1 and 0 < p_noext <= 1");
    }
    SubtreeQuantities out;
    const BigInt Nb(N);
    out.L = (ipow(Nb, m + 1) - Nb) / (Nb - 1) - BigInt(m);
    const BigInt leaves = ipow(Nb, m) - 1;
    const long double lp = log_rational(p);
    const long double ln = std::log(static_cast<long double>(p_noext));
    out.log_p_hat = (lp == 0 ? 0.0L : lp * static_cast<long double>(out.L.convert_to<long double>())) +
                    (ln == 0 ? 0.0L : ln * leaves.convert_to<long double>());
    out.p_hat = static_cast<double>(std::exp(out.log_p_hat));
    const long double log2 = std::log(2.0L);
    if (out.p_hat >= 1.0) {
        out.k_of_m = m;
        out.log_k_estimate = std::log(static_cast<long double>(m));
        return out;
    }
    if (out.p_hat > 1e-300) {
        const long double per = std::ceil(-log2 / std::log1p(-static_cast<long double>(out.p_hat)));
        const long double k = per * static_cast<long double>(m);
        out.log_k_estimate = std::log(k);
        if (k < 9.0e18L) {
            out.k_of_m = static_cast<std::uint64_t>(k);
            return out;
        }
    } else {
        out.log_k_estimate = std::log(static_cast<long double>(m)) + std::log(log2) - out.log_p_hat;
    }
    return out;
}

std::vector<std::vector<std::uint32_t>> full_subtree_heights(const PercLevels& levels) {
    const std::size_t D = levels.depth();
    const std::uint64_t C = levels.children();
    std::vector<std::vector<std::uint32_t>> h(D + 1);
    h[D].assign(levels.level(D).size(), 0);
    for (std::size_t k = D; k-- > 0;) {
        const auto& cur = levels.level(k);
        const auto& below = levels.level(k + 1);
        h[k].assign(cur.size(), 0);
        std::size_t pos = 0;
        for (std::size_t idx = 0; idx < cur.size(); ++idx) {
            const std::uint64_t first = cur[idx] * C;
            while (pos < below.size() && below[pos] < first) {
                ++pos;
            }
            // Children are contiguous keys first..first+C-1; all present iff the next C
            // entries are exactly those keys.
            if (pos + C <= below.size() && below[pos] == first && below[pos + C - 1] == first + C - 1) {
                std::uint32_t m = std::numeric_limits<std::uint32_t>::max();
                for (std::uint64_t c = 0; c < C; ++c) {
                    m = std::min(m, h[k + 1][pos + c]);
                }
                h[k][idx] = m + 1;
            }
        }
    }
    return h;
}

bool has_full_subtree(const PercLevels& levels, std::size_t k, std::uint64_t key, std::size_t m) {
    if (k + m > levels.depth() || !levels.contains(k, key)) {
        return false;
    }
    std::uint64_t lo = key, count = 1;
    for (std::size_t a = 1; a <= m; ++a) {
        lo *= levels.children();
        count *= levels.children();
        for (std::uint64_t c = 0; c < count; ++c) {
            if (!levels.contains(k + a, lo + c)) {
                return false;
            }
        }
    }
    return true;
}

std::optional<TangentWitness> tangent_witness_search(const PercLevels& levels, std::size_t m_target) {
    if (m_target == 0) {
        return std::nullopt;
    }
    const auto h = full_subtree_heights(levels);
    std::size_t best_m = 0;
    for (const auto& lv : h) {
        for (std::uint32_t v : lv) {
            best_m = std::max<std::size_t>(best_m, std::min<std::size_t>(v, m_target));
        }
    }
    if (best_m == 0) {
        return std::nullopt;
    }
    for (std::size_t k = 0; k < h.size(); ++k) {
        std::optional<std::vector<std::int64_t>> best;
        for (std::size_t idx = 0; idx < h[k].size(); ++idx) {
            if (h[k][idx] >= best_m) {
                auto c = levels.coords(k, levels.level(k)[idx]);
                if (!best || c < *best) {
                    best = std::move(c);
                }
            }
        }
        if (best) {
            TangentWitness w;
            w.level = k;
            w.coord = std::move(*best);
            w.m = best_m;
            w.bound = std::sqrt(static_cast<double>(levels.d())) * std::pow(static_cast<double>(levels.n()),
                                                                              -static_cast<double>(best_m));
            return w;
        }
    }
    return std::nullopt;
}

ConditionedRun conditioned_sample(const PercConfig& config, std::size_t depth, std::size_t max_retries) {
    validate(config);
    if (max_retries < 1) {
        throw invalid_input("max_retries must be at least 1");
    }
    if (!supercritical(config.n, config.d, config.p)) {
        throw Error(ErrorKind::not_applicable, "conditioning needs a supercritical p > 1/n^d");
    }
    PercConfig cfg = config;
    for (std::size_t attempt = 0; attempt < max_retries; ++attempt) {
        cfg.seed = config.seed + attempt;
        if (survives_to(cfg, depth)) {
            return {simulate(cfg, depth), cfg.seed, attempt};
        }
    }
    const double reach = 1.0 - survival_iterate(config.n, config.d, config.p, depth);
    const Extinction ext = extinction_probability(config.n, config.d, config.p);
    throw Error(ErrorKind::retries_exhausted,
                "no survival to depth " + std::to_string(depth) + " in " + std::to_string(max_retries) +
                    " seeds starting at " + std::to_string(config.seed) + "; P(survive to depth) = " +
                    std::to_string(reach) + ", P(non-extinction) = " + std::to_string(ext.p_noext));
}

GridSet witness_blowup(const PercLevels& levels, const TangentWitness& w) {
    if (w.level + w.m > levels.depth()) {
        throw invalid_input("witness subtree reaches beyond the simulated depth");
    }
    const std::uint64_t key = levels.key_of(w.level, w.coord);
    if (!levels.contains(w.level, key)) {
        throw invalid_input("witness cube is not a surviving cube");
    }
    std::uint64_t span = 1;
    std::int64_t res = 1;
    for (std::size_t a = 0; a < w.m; ++a) {
        span *= levels.children();
        res *= levels.n();
    }
    const auto& below = levels.level(w.level + w.m);
    auto lo = std::lower_bound(below.begin(), below.end(), key * span);
    auto hi = std::lower_bound(below.begin(), below.end(), (key + 1) * span);
    std::vector<std::int64_t> flat;
    for (auto it = lo; it != hi; ++it) {
        auto c = levels.coords(w.level + w.m, *it);
        for (std::size_t a = 0; a < c.size(); ++a) {
            flat.push_back(c[a] - w.coord[a] * res);
        }
    }
    return GridSet(std::vector<std::int64_t>(static_cast<std::size_t>(levels.d()), res), std::move(flat));
}

} // namespace assouadlab
