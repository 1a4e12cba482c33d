#include "doctest.h"
#include "fixtures.hpp"

#include "assouadlab/errors.hpp"
#include "assouadlab/parallel.hpp"
#include "assouadlab/percolation.hpp"

#include <cmath>

using namespace assouadlab;
using fixtures::q;

TEST_CASE("configuration checks") {
    CHECK_THROWS_AS(validate({1, 2, q(1, 2), 0}), Error);
    CHECK_THROWS_AS(validate({2, 9, q(1, 2), 0}), Error);
    CHECK_THROWS_AS(validate({2, 2, Rational(0), 0}), Error);
    CHECK_NOTHROW(validate({2, 2, Rational(1), 0}));
    CHECK(supercritical(2, 2, q(26, 100)));
    CHECK_FALSE(supercritical(2, 2, q(1, 4)));
}

TEST_CASE("extinction fixed points") {
    struct Row {
        int n, d;
        Rational p;
        double q, surv14;
    };
    const std::vector<Row> rows{
        {2, 2, q(1, 2), 0.08737802538415272, 0.9126219838659626},
        {2, 2, q(7, 10), 0.008784833982524866, 0.9912151660174752},
        {2, 2, q(9, 10), 0.00010036179226999716, 0.99989963820773},
        {3, 1, q(1, 2), 0.2360679774997896, 0.7639973873465027},
        {2, 2, q(26, 100), 0.8996464456516082, 0.19829116972788197},
    };
    for (const auto& r : rows) {
        const auto e = extinction_probability(r.n, r.d, r.p);
        CHECK(e.q == doctest::Approx(r.q).epsilon(1e-9));
        CHECK(e.residual < 1e-10);
        CHECK(1 - survival_iterate(r.n, r.d, r.p, 14) == doctest::Approx(r.surv14).epsilon(1e-12));
    }
    CHECK(extinction_probability(2, 2, q(1, 5)).q == doctest::Approx(1.0));
    CHECK(extinction_probability(2, 2, Rational(1)).q == 0.0);
}

TEST_CASE("dimension formulas") {
    CHECK(hausdorff_dim_percolation(2, 2, q(7, 10)).value == doctest::Approx(1.4854268271702415).epsilon(1e-13));
    const auto boundary = hausdorff_dim_percolation(2, 2, q(1, 4));
    CHECK(boundary.value == 0.0);
    CHECK_FALSE(boundary.note.empty());
    CHECK_THROWS_AS(hausdorff_dim_percolation(2, 2, q(1, 5)), Error);
    CHECK(assouad_dim_percolation(2, 3, q(7, 10)).value == 3.0);
    CHECK(projection_assouad(2, 3, q(7, 10), 2).value == 2.0);
    CHECK_THROWS_AS(projection_assouad(2, 3, q(7, 10), 4), Error);
}

TEST_CASE("full-subtree probabilities") {
    const auto e = extinction_probability(2, 2, q(7, 10));
    CHECK(subtree_quantities(4, 1, q(7, 10), e.p_noext).L == 3);
    CHECK(subtree_quantities(4, 2, q(7, 10), e.p_noext).L == 18);
    CHECK(subtree_quantities(4, 3, q(7, 10), e.p_noext).L == 81);
    const auto m1 = subtree_quantities(4, 1, q(7, 10), e.p_noext);
    REQUIRE(m1.k_of_m.has_value());
    CHECK(m1.p_hat > 0);
    CHECK(m1.p_hat < 1);
    const auto big = subtree_quantities(4, 6, q(7, 10), e.p_noext);
    CHECK(big.log_k_estimate > m1.log_k_estimate);
}

TEST_CASE("levels keys and coordinates") {
    const PercLevels lv(2, 2, {{0}, {0, 3}, {1, 12, 15}});
    CHECK(lv.depth() == 2);
    CHECK(lv.coords(1, 3) == std::vector<std::int64_t>{1, 1});
    CHECK(lv.key_of(2, lv.coords(2, 12)) == 12);
    CHECK(lv.contains(2, 15));
    CHECK_FALSE(lv.contains(2, 2));
    CHECK(lv.grid(1) == GridSet({2, 2}, {0, 0, 1, 1}));
    // 5 has parent 1, which is absent at level 1.
    CHECK_THROWS_AS(PercLevels(2, 2, {{0}, {0}, {5}}), Error);
    CHECK(max_depth(2, 2) >= 31);
}

TEST_CASE("parallel simulation equals the serial reference") {
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
        const PercConfig cfg{2, 2, q(7, 10), seed};
        const auto serial = simulate_serial(cfg, 9);
        for (int threads : {1, 2, 4}) {
            set_thread_count(threads);
            CHECK(simulate(cfg, 9) == serial);
        }
        set_thread_count(0);
        CHECK(survives_to(cfg, 9) == !serial.level(9).empty());
    }
    const auto full = simulate({3, 2, Rational(1), 5}, 3);
    CHECK(full.level(3).size() == 729);
}

TEST_CASE("conditioned sampling and retry budget") {
    const PercConfig sub{2, 2, q(26, 100), 1};
    const auto run = conditioned_sample(sub, 6, 1000);
    CHECK_FALSE(run.levels.level(6).empty());
    CHECK(run.seed_used == sub.seed + run.retries);
    for (std::uint64_t s = sub.seed; s < run.seed_used; ++s) {
        CHECK_FALSE(survives_to({2, 2, sub.p, s}, 6));
    }
    try {
        conditioned_sample({2, 2, q(26, 100), 4}, 12, 3);
        FAIL("expected exhaustion");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::retries_exhausted);
    }
    CHECK_THROWS_AS(conditioned_sample({2, 2, q(1, 5), 1}, 4, 10), Error);
}

TEST_CASE("full subtree witnesses agree with the reference check") {
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        const auto lv = simulate({2, 2, q(85, 100), seed}, 7);
        const auto heights = full_subtree_heights(lv);
        for (std::size_t k = 0; k < lv.depth(); ++k) {
            const auto& keys = lv.level(k);
            for (std::size_t t = 0; t < keys.size(); t += 7) {
                const std::size_t h = heights[k][t];
                CHECK(has_full_subtree(lv, k, keys[t], h));
                if (k + h < lv.depth()) {
                    CHECK_FALSE(has_full_subtree(lv, k, keys[t], h + 1));
                }
            }
        }
        const auto w = tangent_witness_search(lv, 3);
        if (w) {
            CHECK(has_full_subtree(lv, w->level, lv.key_of(w->level, w->coord), w->m));
            CHECK(witness_blowup(lv, *w) == GridSet::full({std::int64_t{1} << w->m, std::int64_t{1} << w->m}));
            CHECK(w->bound == doctest::Approx(std::sqrt(2.0) * std::pow(2.0, -static_cast<double>(w->m))));
        }
    }
}
