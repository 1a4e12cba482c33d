#pragma once

// Random self-similar systems: homothetic maps with exact rational data, Moran-type
// equations, separation checks, periodic compositions and finite-depth attractor boxes.

#include "assouadlab/grid.hpp"
#include "assouadlab/rational.hpp"
#include "assouadlab/words.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace assouadlab {

/// x -> ratio * x + translation, mapping [0,1]^d into itself.
struct SimilarityMap {
    Rational ratio;
    std::vector<Rational> translation;

    SimilarityMap(Rational c, std::vector<Rational> t);

    std::size_t dim() const { return translation.size(); }
    bool operator==(const SimilarityMap&) const = default;
};

class SimilarityIFS {
public:
    explicit SimilarityIFS(std::vector<SimilarityMap> maps);

    const std::vector<SimilarityMap>& maps() const { return maps_; }
    std::size_t size() const { return maps_.size(); }
    std::size_t dim() const { return maps_.front().dim(); }
    std::vector<Rational> ratios() const;

    bool operator==(const SimilarityIFS&) const = default;

private:
    std::vector<SimilarityMap> maps_;
};

class SimilarityRIFS {
public:
    SimilarityRIFS(std::vector<SimilarityIFS> ifss, ProbabilityVector probs);

    const std::vector<SimilarityIFS>& ifss() const { return ifss_; }
    const SimilarityIFS& ifs(Letter letter) const { return ifss_.at(letter - 1); }
    const ProbabilityVector& probs() const { return probs_; }
    std::size_t alphabet_size() const { return ifss_.size(); }
    std::size_t dim() const { return ifss_.front().dim(); }

    bool operator==(const SimilarityRIFS&) const = default;

private:
    std::vector<SimilarityIFS> ifss_;
    ProbabilityVector probs_;
};

/// Root s >= 0 of sum c_i^s = 1, by bisection to 1e-12.
double similarity_dimension(std::span<const Rational> ratios);
double similarity_dimension(const SimilarityIFS& ifs);

/// Root of sum_i p_i log(sum_j c_{ij}^s) = 0 (almost-sure Hausdorff dimension under UOSC).
double almost_sure_hausdorff(const SimilarityRIFS& rifs);

enum class UoscVerdict { verified, refuted_for_unit_cube, inconclusive };
std::string to_string(UoscVerdict v);

/// UOSC with the candidate open set (0,1)^d: every IFS must send it to pairwise disjoint
/// open boxes inside itself. A refutation only concerns this candidate.
UoscVerdict check_uosc(const SimilarityRIFS& rifs);

struct AssouadBound {
    double value = 0;
    UoscVerdict uosc = UoscVerdict::inconclusive;
    bool valid = false; // the label's claim holds (UOSC verified)
    std::string label;
};

/// max_i dim_A F_i; a bound for every realization only when UOSC is verified.
AssouadBound sure_assouad_upper(const SimilarityRIFS& rifs);
/// Same value, read as the almost-sure Assouad dimension (valid when UOSC is verified).
AssouadBound as_assouad_selfsimilar(const SimilarityRIFS& rifs);

/// Signed prime exponents of a positive rational (numerator positive, denominator negative).
std::map<BigInt, long> prime_exponents(const Rational& value);

/// True iff log c1 / log c2 is rational, i.e. the exponent vectors are parallel.
bool multiplicative_dependence(const Rational& c1, const Rational& c2);

/// All compositions S_{w1,i1} o ... o S_{wp,ip} over one period of `pattern`.
SimilarityIFS compose_period(const SimilarityRIFS& rifs, std::span<const Letter> pattern);

struct IndependentPair {
    Word pattern;
    Rational c1;
    Rational c2;
};

struct PeriodicProbe {
    double value = 0;           // max similarity dimension over composed periods
    Word best_pattern;
    std::size_t patterns_examined = 0;
    bool within_ifs_all_dependent = true; // every pair of ratios inside one IFS is dependent
    std::vector<IndependentPair> witnesses; // independent composed pairs (capped)
};

/// Upper-envelope probe over eventually periodic words with period <= max_period.
PeriodicProbe periodic_sup_probe(const SimilarityRIFS& rifs, std::size_t max_period,
                                 std::size_t pattern_cap = 1'000'000, std::size_t witness_cap = 4096);

struct Box {
    std::vector<Rational> lo;
    Rational side;
    std::vector<std::uint32_t> address; // 0-based map index chosen at each level

    bool operator==(const Box&) const = default;
};

struct BoxSet {
    std::size_t depth = 0;
    std::size_t dim = 0;
    std::vector<Box> boxes;
};

/// Level-`depth` construction boxes for the realization `word`.
BoxSet attractor_boxes(const SimilarityRIFS& rifs, std::span<const Letter> word, std::size_t depth,
                       std::size_t max_boxes = 5'000'000);

/// The depth-`depth` boxes descended from `ancestor` (by address prefix), mapped back to [0,1]^d by
/// the inverse of the ancestor's composed map.
std::vector<Box> blowup_descendants(const BoxSet& set, const Box& ancestor);

/// Boxes whose closure lies inside `window`, renormalized to [0,1]^d.
std::vector<Box> blowup_window(const BoxSet& set, const Box& window);

/// Canonical ordering for set comparisons of boxes (addresses ignored).
std::vector<std::pair<std::vector<Rational>, Rational>> box_geometry(std::span<const Box> boxes);

/// Cells of a resolution^d grid whose interior meets some box.
GridSet rasterize(const BoxSet& set, std::int64_t resolution);

} // namespace assouadlab
