#pragma once

// Covering counts, two-scale exponent fits and Hausdorff-type distances on cell-center sets.
// Each kernel has a brute-force *_reference twin that tests compare against bit for bit.

#include "assouadlab/grid.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace assouadlab {

/// Number of distinct side-r grid squares (floor(center / r) per axis) holding the centers of
/// occupied cells whose center lies within Euclidean distance R of the center of `center`.
/// Throws scale-error when r is finer than the cells.
std::uint64_t local_count_reference(const GridSet& S, std::size_t center, double R, double r);

/// Bucketed version of local_count_reference for one side length r; reuse it across centers.
class CoverIndex {
public:
    CoverIndex(const GridSet& S, double r);

    double r() const { return r_; }
    std::uint64_t count(std::size_t center, double R) const;

private:
    const GridSet* set_;
    double r_;
    std::vector<std::int64_t> span_; // squares per axis
    std::vector<std::uint64_t> keys_;   // sorted square keys, one entry per occupied square
    std::vector<std::size_t> offsets_;  // members of square q are members_[offsets_[q] .. offsets_[q+1])
    std::vector<std::size_t> members_;  // cell indices
};

std::uint64_t local_count(const GridSet& S, std::size_t center, double R, double r);

/// max over `centers` of local_count; parallel over centers.
std::uint64_t sup_local_count(const GridSet& S, std::span<const std::size_t> centers, double R, double r);
std::uint64_t sup_local_count_reference(const GridSet& S, std::span<const std::size_t> centers, double R,
                                        double r);

struct ScalePair {
    double R = 0;
    double r = 0;
};

struct ScaleLadder {
    std::vector<ScalePair> pairs;
    double rho = 0.25;
};

/// Fixed finest r = one cell side and R = r 2^j for j = 1, 2, ... while R <= rho.
ScaleLadder doubling_ladder(const GridSet& S, double rho = 0.25);

/// Throws invalid-input for an empty ladder or r >= R or R > rho, scale-error for unresolvable r.
void validate_ladder(const GridSet& S, const ScaleLadder& ladder);

struct CenterChoice {
    std::optional<std::size_t> sample; // empty: all occupied cells
    std::uint64_t seed = 0;

    static CenterChoice all() { return {}; }
    static CenterChoice sampled(std::size_t k, std::uint64_t seed) { return {k, seed}; }
};

/// Cell indices chosen by `choice`, sorted and distinct.
std::vector<std::size_t> choose_centers(const GridSet& S, const CenterChoice& choice);

struct AssouadEstimate {
    ScaleLadder ladder;
    std::vector<std::uint64_t> counts; // M(R, r) per ladder pair
    double exponent = 0;               // least-squares slope of log M against log(R/r)
    double intercept = 0;
    double residual = 0;               // RMS of the fit residuals
    std::size_t centers = 0;
};

AssouadEstimate assouad_estimate(const GridSet& S, const ScaleLadder& ladder, const CenterChoice& centers);

/// sup_{a in A} min_{b in B} |a - b| over cell centers. Throws invalid-input on empty sets or
/// mismatched dimensions.
double pseudo_hausdorff(const GridSet& A, const GridSet& B);
double pseudo_hausdorff_reference(const GridSet& A, const GridSet& B);

double hausdorff_distance(const GridSet& A, const GridSet& B);
double hausdorff_distance_reference(const GridSet& A, const GridSet& B);

/// Same distances for explicit point clouds (row-major, `dim` coordinates per point).
double pseudo_hausdorff_points(std::span<const double> A, std::span<const double> B, std::size_t dim);
double hausdorff_distance_points(std::span<const double> A, std::span<const double> B, std::size_t dim);

struct ConvergenceReport {
    std::vector<double> distances;
    std::vector<double> bounds;
    bool dominated = true; // distances[l] <= bounds[l] for every stage
};

/// d_H(blowup(S, windows[l]), targets[l]) per stage, compared with the caller's bounds.
ConvergenceReport tangent_convergence(const GridSet& S, std::span<const Window> windows,
                                      std::span<const GridSet> targets, std::span<const double> bounds);
/// Variant for stages whose blown-up sets were built elsewhere.
ConvergenceReport tangent_convergence(std::span<const GridSet> blown, std::span<const GridSet> targets,
                                      std::span<const double> bounds);

} // namespace assouadlab
