#include "doctest.h"
#include "fixtures.hpp"

#include "assouadlab/errors.hpp"
#include "assouadlab/prng.hpp"
#include "assouadlab/words.hpp"

#include <cmath>

using namespace assouadlab;
using fixtures::q;

TEST_CASE("rationals parse and print canonically") {
    CHECK(parse_rational("6/8") == q(3, 4));
    CHECK(parse_rational("0.125") == q(1, 8));
    CHECK(parse_rational("-2") == Rational(-2));
    CHECK(to_string(q(10, 4)) == "5/2");
    CHECK(to_string(Rational(3)) == "3");
    CHECK_THROWS(parse_rational("1/0"));
    CHECK_THROWS(parse_rational("abc"));
    CHECK(static_cast<double>(log_big(ipow(BigInt(10), 400))) == doctest::Approx(400 * std::log(10.0)));
}

TEST_CASE("probability thresholds are exact ceilings") {
    const unsigned __int128 two64 = static_cast<unsigned __int128>(1) << 64U;
    CHECK(probability_threshold(q(1, 2)) == two64 / 2);
    CHECK(probability_threshold(Rational(1)) == two64);
    CHECK(probability_threshold(Rational(0)) == 0);
    CHECK(probability_threshold(q(1, 3)) == two64 / 3 + 1);
}

TEST_CASE("splitmix64 counter mode matches the sequential stream") {
    SplitMix64 g(42);
    for (std::uint64_t k = 0; k < 100; ++k) {
        CHECK(g.next() == splitmix64_at(42, k));
    }
    // Published first output for seed 0.
    CHECK(splitmix64_at(0, 0) == 0xE220A8397B1DCDAFULL);
}

TEST_CASE("probability vectors") {
    CHECK_THROWS_AS(ProbabilityVector({q(1, 2), q(1, 3)}), Error);
    CHECK_THROWS_AS(ProbabilityVector({Rational(1), Rational(0)}), Error);
    const ProbabilityVector p({q(1, 4), q(3, 4)});
    CHECK(p(1) == q(1, 4));
    CHECK(p.sample(0) == 1);
    CHECK(p.sample((std::uint64_t{1} << 62U) - 1) == 1);
    CHECK(p.sample(std::uint64_t{1} << 62U) == 2);
    CHECK(p.sample(~std::uint64_t{0}) == 2);
}

TEST_CASE("cylinder measure and word metric") {
    const ProbabilityVector p({q(3, 10), q(7, 10)});
    const Word w{1, 2, 2};
    CHECK(cylinder_measure(w, p) == q(147, 1000));
    CHECK(cylinder_measure(Word{}, p) == 1);
    CHECK(common_prefix_length(Word{1, 2, 3}, Word{1, 2, 1}) == 2);
    CHECK(word_metric(Word{1, 2, 3}, Word{1, 2, 1}) == 0.25);
    CHECK(word_metric(Word{2}, Word{1}) == 1.0);
}

TEST_CASE("word metric is an ultrametric on random words") {
    SplitMix64 g(9);
    auto rand_word = [&] {
        Word w(6);
        for (auto& l : w) {
            l = 1 + static_cast<Letter>(g.next() % 2);
        }
        return w;
    };
    for (int t = 0; t < 500; ++t) {
        const Word a = rand_word(), b = rand_word(), c = rand_word();
        CHECK(word_metric(a, b) == word_metric(b, a));
        CHECK(word_metric(a, c) <= std::max(word_metric(a, b), word_metric(b, c)));
    }
}

TEST_CASE("word formatting round trips and validation") {
    const Word w{1, 3, 2};
    CHECK(format_word(w) == "1,3,2");
    CHECK(parse_word("1,3,2") == w);
    CHECK_THROWS(parse_word("1,,2"));
    CHECK_THROWS(parse_word("0"));
    CHECK_NOTHROW(validate_word(w, 3));
    CHECK_THROWS_AS(validate_word(w, 2), Error);
}

TEST_CASE("sampled realizations are deterministic and roughly fair") {
    const ProbabilityVector p({q(1, 4), q(3, 4)});
    CHECK(sample_realization(3, p, 50) == sample_realization(3, p, 50));
    CHECK(sample_realization(3, p, 50) != sample_realization(4, p, 50));
    const Word w = sample_realization(11, p, 20000);
    const auto ones = std::count(w.begin(), w.end(), Letter{1});
    CHECK(std::fabs(static_cast<double>(ones) / 20000 - 0.25) < 0.02);
    // A stream reproduces the sampled prefix.
    CHECK(RealizationStream::iid(p, 11).prefix(20000) == w);
}

TEST_CASE("realization streams") {
    CHECK(RealizationStream::periodic({1, 2, 3}).prefix(7) == Word{1, 2, 3, 1, 2, 3, 1});
    CHECK(RealizationStream::constant(2).prefix(3) == Word{2, 2, 2});
    const auto sp = RealizationStream::spliced(RealizationStream::constant(1), {{2, 3, 2}, {8, 1, 3}});
    CHECK(sp.prefix(9) == Word{1, 2, 2, 2, 1, 1, 1, 3, 1});
    CHECK(sp.max_letter() == 3);
}

TEST_CASE("self-similar good words place runs over the base") {
    const std::vector<std::size_t> runs{2, 3}, pos{2, 6};
    const Word w = good_word_selfsimilar(RealizationStream::constant(1), 2, runs, pos, 10);
    CHECK(w == Word{1, 2, 2, 1, 1, 2, 2, 2, 1, 1});
    const Word longer = good_word_selfsimilar(RealizationStream::constant(1), 2, runs, pos, 4);
    CHECK(longer.size() == 8);
}

TEST_CASE("carpet good words respect their schedule") {
    const auto rifs = fixtures::segments_2x3();
    const std::vector<CarpetScheduleEntry> schedule{{q(1, 9), 1}, {q(1, 243), 3}};
    const auto good = good_word_carpet(rifs, RealizationStream::iid(rifs.probs(), 5), 1, 2, schedule, 20);
    REQUIRE(good.stages.size() == 2);
    CHECK(good.word.size() == 20);
    for (const auto& st : good.stages) {
        const auto ks = k_scales(good.word, rifs, st.R);
        CHECK(ks.k1 == st.k1);
        CHECK(ks.k2 == st.k2);
        for (std::size_t l = st.k1; l < st.k1 + st.run; ++l) {
            CHECK(good.word[l] == 2);
        }
        for (std::size_t l = st.k2; l < st.k2 + st.run; ++l) {
            CHECK(good.word[l] == 1);
        }
    }
}

TEST_CASE("carpet good words reject infeasible schedules") {
    const auto rifs = fixtures::segments_2x3();
    const auto base = RealizationStream::iid(rifs.probs(), 5);
    auto fails = [&](std::vector<CarpetScheduleEntry> s) {
        try {
            good_word_carpet(rifs, base, 1, 2, s, 20);
        } catch (const Error& e) {
            return e.kind() == ErrorKind::infeasible_schedule && std::string(e.what()).find("stage") != std::string::npos;
        }
        return false;
    };
    CHECK(fails({{q(1, 9), 5}}));                  // run longer than k2 - k1
    CHECK(fails({{q(1, 9), 1}, {q(1, 3), 1}}));    // R must decrease
    CHECK(fails({{q(1, 81), 2}, {q(1, 243), 1}})); // runs must not shrink
    CHECK(fails({{Rational(1), 1}}));
    CHECK_THROWS_AS(good_word_carpet(rifs, base, 1, 3, std::vector<CarpetScheduleEntry>{}, 5), Error);
}

TEST_CASE("exceptional-set bound and mass distribution") {
    CHECK(omega_hausdorff_dim(3) == doctest::Approx(1.5849625007211563).epsilon(1e-14));
    CHECK(exceptional_dim_lower(2, 1, 4) == doctest::Approx(0.7924812503605781).epsilon(1e-14));
    for (std::size_t n = 1; n < 30; ++n) {
        CHECK(exceptional_dim_lower(3, 2, n) <= exceptional_dim_lower(3, 2, n + 1) + 1e-15);
        CHECK(exceptional_dim_lower(3, 2, n) < omega_hausdorff_dim(3));
    }
    const auto m = mass_distribution_check(2, 1, 4, 3);
    CHECK(m.nu == q(1, 27));
    CHECK(m.discrepancy < 1e-15L);
}
