#include "assouadlab/words.hpp"

#include "assouadlab/errors.hpp"
#include "assouadlab/prng.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace assouadlab {

void validate_word(std::span<const Letter> word, std::size_t alphabet_size) {
    for (std::size_t k = 0; k < word.size(); ++k) {
        if (word[k] < 1 || word[k] > alphabet_size) {
            throw invalid_input("letter " + std::to_string(word[k]) + " at position " + std::to_string(k + 1) +
                                " outside alphabet 1.." + std::to_string(alphabet_size));
        }
    }
}

std::string format_word(std::span<const Letter> word) {
    std::string out;
    for (std::size_t k = 0; k < word.size(); ++k) {
        if (k > 0) {
            out += ',';
        }
        out += std::to_string(word[k]);
    }
    return out;
}

Word parse_word(std::string_view text) {
    Word word;
    std::string token;
    std::istringstream in{std::string(text)};
    while (std::getline(in, token, ',')) {
        token.erase(std::remove_if(token.begin(), token.end(), [](unsigned char c) { return std::isspace(c); }),
                    token.end());
        if (token.empty()) {
            throw invalid_input("empty letter in word '" + std::string(text) + "'");
        }
        try {
            std::size_t used = 0;
            long v = std::stol(token, &used);
            if (used != token.size() || v < 1) {
                throw invalid_input("bad letter '" + token + "'");
            }
            word.push_back(static_cast<Letter>(v));
        } catch (const std::logic_error&) {
            throw invalid_input("bad letter '" + token + "'");
        }
    }
    return word;
}

ProbabilityVector::ProbabilityVector(std::vector<Rational> probs) : probs_(std::move(probs)) {
    if (probs_.empty()) {
        throw invalid_input("probability vector must be non-empty");
    }
    Rational sum = 0;
    for (const auto& p : probs_) {
        if (p <= 0 || p > 1) {
            throw invalid_input("probability " + to_string(p) + " outside (0,1]");
        }
        sum += p;
        cumulative_.push_back(probability_threshold(sum));
    }
    if (sum != 1) {
        throw invalid_input("probabilities sum to " + to_string(sum) + ", not 1");
    }
}

ProbabilityVector ProbabilityVector::uniform(std::size_t n) {
    return ProbabilityVector(std::vector<Rational>(n, Rational(1, static_cast<long>(n))));
}

const Rational& ProbabilityVector::operator()(Letter letter) const {
    if (letter < 1 || letter > probs_.size()) {
        throw invalid_input("letter " + std::to_string(letter) + " outside alphabet 1.." +
                            std::to_string(probs_.size()));
    }
    return probs_[letter - 1];
}

Letter ProbabilityVector::sample(std::uint64_t u) const {
    const unsigned __int128 x = u;
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), x);
    return static_cast<Letter>(std::distance(cumulative_.begin(), it) + 1);
}

Rational cylinder_measure(std::span<const Letter> word, const ProbabilityVector& p) {
    Rational m = 1;
    for (Letter l : word) {
        m *= p(l);
    }
    return m;
}

std::size_t common_prefix_length(std::span<const Letter> u, std::span<const Letter> v) {
    auto [a, b] = std::mismatch(u.begin(), u.end(), v.begin(), v.end());
    return static_cast<std::size_t>(a - u.begin());
}

double word_metric(std::span<const Letter> u, std::span<const Letter> v) {
    return std::ldexp(1.0, -static_cast<int>(common_prefix_length(u, v)));
}

Word sample_realization(std::uint64_t seed, const ProbabilityVector& p, std::size_t length) {
    Word w(length);
    for (std::size_t k = 0; k < length; ++k) {
        w[k] = p.sample(splitmix64_at(seed, k));
    }
    return w;
}

RealizationStream RealizationStream::iid(ProbabilityVector p, std::uint64_t seed) {
    RealizationStream s;
    s.mode_ = Mode::iid;
    s.seed_ = seed;
    s.probs_ = std::make_shared<const ProbabilityVector>(std::move(p));
    return s;
}

RealizationStream RealizationStream::periodic(Word pattern) {
    if (pattern.empty()) {
        throw invalid_input("periodic pattern must be non-empty");
    }
    validate_word(pattern, ~Letter{0});
    RealizationStream s;
    s.mode_ = Mode::periodic;
    s.pattern_ = std::move(pattern);
    return s;
}

RealizationStream RealizationStream::constant(Letter letter) {
    if (letter < 1) {
        throw invalid_input("letters are 1-based");
    }
    RealizationStream s;
    s.mode_ = Mode::constant;
    s.pattern_ = {letter};
    return s;
}

RealizationStream RealizationStream::spliced(RealizationStream base, std::vector<Splice> splices) {
    for (const auto& sp : splices) {
        if (sp.start < 1 || sp.letter < 1) {
            throw invalid_input("splices use 1-based positions and letters");
        }
    }
    RealizationStream s;
    s.mode_ = Mode::spliced;
    s.base_ = std::make_shared<const RealizationStream>(std::move(base));
    s.splices_ = std::move(splices);
    return s;
}

Letter RealizationStream::at(std::size_t index) const {
    if (index < 1) {
        throw invalid_input("word positions are 1-based");
    }
    switch (mode_) {
    case Mode::iid:
        return probs_->sample(splitmix64_at(seed_, index - 1));
    case Mode::periodic:
        return pattern_[(index - 1) % pattern_.size()];
    case Mode::constant:
        return pattern_.front();
    case Mode::spliced:
        for (auto it = splices_.rbegin(); it != splices_.rend(); ++it) {
            if (index >= it->start && index < it->start + it->length) {
                return it->letter;
            }
        }
        return base_->at(index);
    }
    return 1;
}

Word RealizationStream::prefix(std::size_t length) const {
    if (mode_ == Mode::iid) {
        return sample_realization(seed_, *probs_, length);
    }
    if (mode_ == Mode::spliced) {
        Word w = base_->prefix(length);
        for (const auto& sp : splices_) {
            for (std::size_t k = sp.start; k < sp.start + sp.length && k <= length; ++k) {
                w[k - 1] = sp.letter;
            }
        }
        return w;
    }
    Word w(length);
    for (std::size_t k = 0; k < length; ++k) {
        w[k] = at(k + 1);
    }
    return w;
}

Letter RealizationStream::max_letter() const {
    switch (mode_) {
    case Mode::iid:
        return static_cast<Letter>(probs_->size());
    case Mode::periodic:
    case Mode::constant:
        return *std::max_element(pattern_.begin(), pattern_.end());
    case Mode::spliced: {
        Letter m = base_->max_letter();
        for (const auto& sp : splices_) {
            m = std::max(m, sp.letter);
        }
        return m;
    }
    }
    return 1;
}

Word good_word_selfsimilar(const RealizationStream& base, Letter letter, std::span<const std::size_t> run_lengths,
                           std::span<const std::size_t> run_positions, std::size_t length) {
    if (run_lengths.size() != run_positions.size()) {
        throw Error(ErrorKind::invalid_schedule, "run_lengths and run_positions differ in size");
    }
    std::size_t end = length;
    for (std::size_t r = 0; r < run_positions.size(); ++r) {
        if (run_positions[r] < 1) {
            throw Error(ErrorKind::invalid_schedule, "run positions are 1-based");
        }
        if (r > 0 && run_positions[r] < run_positions[r - 1] + run_lengths[r - 1]) {
            throw Error(ErrorKind::invalid_schedule,
                        "run " + std::to_string(r + 1) + " at position " + std::to_string(run_positions[r]) +
                            " overlaps run " + std::to_string(r));
        }
        end = std::max(end, run_positions[r] + run_lengths[r] - 1);
    }
    Word w = base.prefix(end);
    for (std::size_t r = 0; r < run_positions.size(); ++r) {
        std::fill_n(w.begin() + static_cast<std::ptrdiff_t>(run_positions[r] - 1), run_lengths[r], letter);
    }
    return w;
}

double omega_hausdorff_dim(std::size_t alphabet_size) {
    if (alphabet_size < 1) {
        throw invalid_input("alphabet must be non-empty");
    }
    return std::log(static_cast<double>(alphabet_size)) / std::log(2.0);
}

namespace {

void check_exceptional_params(std::size_t n_letters, std::size_t non_maximal, std::size_t n) {
    if (non_maximal < 1 || non_maximal >= n_letters) {
        throw invalid_input("need 1 <= non-maximal letters < alphabet size");
    }
    if (n < 1) {
        throw invalid_input("run bound n must be >= 1");
    }
}

// log(N^h - M^h) = h log N + log1p(-(M/N)^h), stable for large h.
long double log_block_count(std::size_t n_letters, std::size_t non_maximal, std::size_t h) {
    long double ratio = static_cast<long double>(non_maximal) / static_cast<long double>(n_letters);
    return static_cast<long double>(h) * std::log(static_cast<long double>(n_letters)) +
           std::log1p(-std::pow(ratio, static_cast<long double>(h)));
}

long double alpha_n(std::size_t n_letters, std::size_t non_maximal, std::size_t n) {
    std::size_t h = (n + 1) / 2;
    return log_block_count(n_letters, non_maximal, h) / (static_cast<long double>(h) * std::log(2.0L));
}

} // namespace

double exceptional_dim_lower(std::size_t alphabet_size, std::size_t non_maximal, std::size_t n) {
    check_exceptional_params(alphabet_size, non_maximal, n);
    return static_cast<double>(alpha_n(alphabet_size, non_maximal, n));
}

MassDistributionCheck mass_distribution_check(std::size_t alphabet_size, std::size_t non_maximal, std::size_t n,
                                              std::size_t k) {
    check_exceptional_params(alphabet_size, non_maximal, n);
    if (k < 1) {
        throw invalid_input("cylinder length k must be >= 1");
    }
    const std::size_t h = (n + 1) / 2;
    BigInt blocks = ipow(BigInt(alphabet_size), h) - ipow(BigInt(non_maximal), h);
    MassDistributionCheck out;
    out.nu = Rational(BigInt(1), ipow(blocks, k));
    const long double alpha = alpha_n(alphabet_size, non_maximal, n);
    // |U_k| = 2^{-k h}
    const long double log_diameter = -static_cast<long double>(k * h) * std::log(2.0L);
    out.diameter_pow = std::exp(alpha * log_diameter);
    out.discrepancy = std::fabs(log_rational(out.nu) - alpha * log_diameter);
    return out;
}

} // namespace assouadlab
