#pragma once

// Mandelbrot percolation: keyed simulation, Galton-Watson analytics, dimension formulas
// and the full-subtree tangent witness search.

#include "assouadlab/grid.hpp"
#include "assouadlab/rational.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace assouadlab {

struct PercConfig {
    int n = 2;
    int d = 2;
    Rational p{7, 10};
    std::uint64_t seed = 0;
};

/// Throws invalid-input unless n >= 2, 1 <= d <= 8 and 0 < p <= 1.
void validate(const PercConfig& config);

/// p > 1/n^d, exactly.
bool supercritical(int n, int d, const Rational& p);

/// Surviving cubes per level as tree keys: key(child) = key(parent) * n^d + digit, where digit
/// packs the per-axis child offsets as sum_a b_a n^a. Keys are sorted within a level.
class PercLevels {
public:
    PercLevels(int n, int d, std::vector<std::vector<std::uint64_t>> levels);

    int n() const { return n_; }
    int d() const { return d_; }
    std::size_t depth() const { return levels_.size() - 1; }
    const std::vector<std::uint64_t>& level(std::size_t k) const { return levels_.at(k); }
    const std::vector<std::vector<std::uint64_t>>& levels() const { return levels_; }
    std::uint64_t children() const { return children_; }

    /// Integer coordinates in [0, n^k)^d of a level-k key.
    std::vector<std::int64_t> coords(std::size_t k, std::uint64_t key) const;
    std::uint64_t key_of(std::size_t k, std::span<const std::int64_t> coords) const;
    bool contains(std::size_t k, std::uint64_t key) const;

    /// Level k as an occupancy grid at resolution n^k per axis.
    GridSet grid(std::size_t k) const;

    bool operator==(const PercLevels&) const = default;

private:
    int n_;
    int d_;
    std::uint64_t children_;
    std::vector<std::vector<std::uint64_t>> levels_;
};

/// Largest depth whose keys fit in 64 bits for this (n, d).
std::size_t max_depth(int n, int d);

PercLevels simulate(const PercConfig& config, std::size_t depth);
/// Single-threaded reference expansion (identical output).
PercLevels simulate_serial(const PercConfig& config, std::size_t depth);

/// Whether some cube survives at `depth`; stops at the first surviving path.
bool survives_to(const PercConfig& config, std::size_t depth);

struct Extinction {
    double q = 1;        // least fixed point of f(q) = (1 - p + p q)^{n^d}
    double p_noext = 0;  // 1 - q
    double residual = 0; // |q - f(q)|
    std::size_t iterations = 0;
};

Extinction extinction_probability(int n, int d, const Rational& p);

/// f^k(0): probability of extinction by level k. 1 - survival_iterate(k) = P(level k non-empty).
double survival_iterate(int n, int d, const Rational& p, std::size_t k);

struct DimValue {
    double value = 0;
    std::string note;
};

/// log(n^d p) / log n. Boundary p = 1/n^d gives 0 with a warning note; below throws not-applicable.
DimValue hausdorff_dim_percolation(int n, int d, const Rational& p);
/// d, almost surely on non-extinction.
DimValue assouad_dim_percolation(int n, int d, const Rational& p);
/// k for every k-dimensional projection, 1 <= k <= d.
DimValue projection_assouad(int n, int d, const Rational& p, int k);

struct SubtreeQuantities {
    BigInt L;                     // (N^{m+1} - N)/(N - 1) - m
    long double log_p_hat = 0;    // L log p + (N^m - 1) log p_noext
    double p_hat = 0;             // exp(log_p_hat), may underflow to 0
    std::optional<std::uint64_t> k_of_m; // m ceil(-log 2 / log(1 - p_hat)); empty when saturated
    long double log_k_estimate = 0;      // log k(m) ~ log m + log log 2 - log p_hat when saturated
};

SubtreeQuantities subtree_quantities(std::uint64_t N, std::uint64_t m, const Rational& p, double p_noext);

struct TangentWitness {
    std::size_t level = 0;
    std::vector<std::int64_t> coord;
    std::size_t m = 0;
    double bound = 0; // sqrt(d) n^{-m}
};

/// Max m <= m_target such that some cube's complete m-level subtree survived; ties go to the
/// smallest level, then the lexicographically smallest coordinate.
std::optional<TangentWitness> tangent_witness_search(const PercLevels& levels, std::size_t m_target);

/// Largest h such that every descendant of each cube down to h levels survived, per level.
std::vector<std::vector<std::uint32_t>> full_subtree_heights(const PercLevels& levels);

/// Reference check: all C^a descendants at offsets a = 1..m of the level-k cube are present.
bool has_full_subtree(const PercLevels& levels, std::size_t k, std::uint64_t key, std::size_t m);

struct ConditionedRun {
    PercLevels levels;
    std::uint64_t seed_used = 0;
    std::size_t retries = 0; // rejected seeds before acceptance
};

/// Tries seed, seed+1, ... until level `depth` is non-empty. Throws retries-exhausted.
ConditionedRun conditioned_sample(const PercConfig& config, std::size_t depth, std::size_t max_retries);

/// Occupancy of the witness cube's subtree `m` levels down, renormalized to [0,1]^d.
GridSet witness_blowup(const PercLevels& levels, const TangentWitness& w);

} // namespace assouadlab
