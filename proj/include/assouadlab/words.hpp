#pragma once

// Symbolic sample space: words over the alphabet {1..N}, cylinders, the word metric,
// Bernoulli measure, seeded realizations and the "good set" word constructors.

#include "assouadlab/rational.hpp"

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace assouadlab {

using Letter = std::uint32_t; // 1-based
using Word = std::vector<Letter>;

/// Throws invalid-input unless every letter lies in 1..alphabet_size.
void validate_word(std::span<const Letter> word, std::size_t alphabet_size);

/// Comma-separated 1-based letters, e.g. "1,2,2".
std::string format_word(std::span<const Letter> word);
Word parse_word(std::string_view text);

/// Exact Bernoulli weights p_1..p_N, all positive, summing to exactly 1.
class ProbabilityVector {
public:
    explicit ProbabilityVector(std::vector<Rational> probs);
    static ProbabilityVector uniform(std::size_t n);

    std::size_t size() const { return probs_.size(); }
    const Rational& operator()(Letter letter) const; // 1-based
    const std::vector<Rational>& values() const { return probs_; }

    /// Inverse-CDF draw: the first letter whose exact cumulative threshold exceeds u.
    Letter sample(std::uint64_t u) const;

    bool operator==(const ProbabilityVector& other) const { return probs_ == other.probs_; }

private:
    std::vector<Rational> probs_;
    std::vector<unsigned __int128> cumulative_; // ceil(cum_i * 2^64)
};

/// mu(C_k(w)) = p_{w_1} ... p_{w_k}; 1 for the empty word.
Rational cylinder_measure(std::span<const Letter> word, const ProbabilityVector& p);

std::size_t common_prefix_length(std::span<const Letter> u, std::span<const Letter> v);

/// d(u, v) = 2^{-(u ^ v)} with u ^ v the common prefix length. Equal finite words get 2^{-len}.
double word_metric(std::span<const Letter> u, std::span<const Letter> v);

/// i.i.d. letters drawn by inverse CDF from the splitmix64 stream of `seed`.
Word sample_realization(std::uint64_t seed, const ProbabilityVector& p, std::size_t length);

/// Forces `letter` on positions [start, start + length) (1-based).
struct Splice {
    std::size_t start = 1;
    std::size_t length = 0;
    Letter letter = 1;

    bool operator==(const Splice&) const = default;
};

/// A lazily generated infinite word.
class RealizationStream {
public:
    enum class Mode { iid, periodic, constant, spliced };

    static RealizationStream iid(ProbabilityVector p, std::uint64_t seed);
    static RealizationStream periodic(Word pattern);
    static RealizationStream constant(Letter letter);
    static RealizationStream spliced(RealizationStream base, std::vector<Splice> splices);

    Mode mode() const { return mode_; }

    /// Letter at 1-based position `index`.
    Letter at(std::size_t index) const;
    Word prefix(std::size_t length) const;

    /// Largest letter this stream can emit (alphabet lower bound).
    Letter max_letter() const;

    // Accessors used for serialization.
    std::uint64_t seed() const { return seed_; }
    const ProbabilityVector* probs() const { return probs_.get(); }
    const Word& pattern() const { return pattern_; }
    const std::vector<Splice>& splices() const { return splices_; }
    const RealizationStream* base() const { return base_.get(); }

private:
    RealizationStream() = default;

    Mode mode_ = Mode::constant;
    std::uint64_t seed_ = 0;
    std::shared_ptr<const ProbabilityVector> probs_;
    Word pattern_; // periodic pattern, or the single letter for constant mode
    std::shared_ptr<const RealizationStream> base_;
    std::vector<Splice> splices_;
};

/// Writes runs of `letter` at the given 1-based positions over the base word.
/// Output length is max(length, end of the last run).
Word good_word_selfsimilar(const RealizationStream& base, Letter letter,
                           std::span<const std::size_t> run_lengths,
                           std::span<const std::size_t> run_positions, std::size_t length);

class CarpetRIFS;

struct CarpetScheduleEntry {
    Rational R;
    std::size_t run = 0; // n_l
};

/// One realized stage of a carpet good word: j occupies (k1, k1+run], i occupies (k2, k2+run].
struct CarpetScheduleStage {
    Rational R;
    std::size_t run = 0;
    std::size_t k1 = 0;
    std::size_t k2 = 0;
};

struct CarpetGoodWord {
    Word word;
    std::vector<CarpetScheduleStage> stages;
};

/// Left-to-right splicer for the carpet good set: for each (R_l, n_l) the j-run is written after
/// k1(R_l), then k2(R_l) is recomputed on the updated word and the i-run written after it.
/// Throws infeasible_schedule naming l when a run does not fit or would overwrite an earlier stage.
CarpetGoodWord good_word_carpet(const CarpetRIFS& rifs, const RealizationStream& base, Letter i,
                                Letter j, std::span<const CarpetScheduleEntry> schedule,
                                std::size_t length);

/// dim_H of the sequence space under the 2^{-n} metric: log N / log 2.
double omega_hausdorff_dim(std::size_t alphabet_size);

/// Lower bound alpha_n for the exceptional set:
/// log(N^h - M^h) / (h log 2), h = ceil(n/2), M = number of non-maximizing letters.
double exceptional_dim_lower(std::size_t alphabet_size, std::size_t non_maximal, std::size_t n);

struct MassDistributionCheck {
    Rational nu;           // (N^h - M^h)^{-k}
    long double diameter_pow; // |U_k|^{alpha_n}
    long double discrepancy;  // |log nu - alpha_n log |U_k||
};

MassDistributionCheck mass_distribution_check(std::size_t alphabet_size, std::size_t non_maximal,
                                              std::size_t n, std::size_t k);

} // namespace assouadlab
