#include "doctest.h"
#include "fixtures.hpp"

#include "assouadlab/carpet.hpp"
#include "assouadlab/errors.hpp"
#include "assouadlab/prng.hpp"

#include <cmath>

using namespace assouadlab;
using fixtures::q;

TEST_CASE("carpet IFS column data") {
    const CarpetIFS c(3, 5, {{0, 0}, {0, 4}, {1, 2}, {2, 1}, {2, 3}, {2, 4}});
    CHECK(c.columns() == 3);
    CHECK(c.max_column_count() == 3);
    CHECK(c.max_column() == 2);
    CHECK(c.rows_in_column(0) == std::vector<int>{0, 4});
    CHECK_THROWS_AS(CarpetIFS(3, 3, {{0, 0}}), Error);
    CHECK_THROWS_AS(CarpetIFS(2, 3, {{2, 0}}), Error);
    CHECK_THROWS_AS(CarpetIFS(2, 3, {{0, 0}, {0, 0}}), Error);
}

TEST_CASE("dimension formulas") {
    const auto seg = fixtures::segments_2x3();
    CHECK(mackay_dim(seg.ifs(1)) == doctest::Approx(1.0));
    CHECK(mackay_dim(seg.ifs(2)) == doctest::Approx(1.0));
    const auto as = as_assouad_carpet(seg);
    CHECK(as.value == doctest::Approx(2.0));
    CHECK(as.i == 1);
    CHECK(as.j == 2);
    CHECK(sure_upper_carpet(seg).value >= as.value);
    const std::vector<double> dims{1.0, 1.0};
    CHECK(gui_li_average(seg, dims) == doctest::Approx(1.0));
    CHECK_THROWS_AS(gui_li_average(fixtures::mixed_grids(), std::vector<double>{1, 1, 1}), Error);

    // The classic 2x3 carpet with digits in both columns, 1 and 2 rows.
    const CarpetIFS bm(2, 3, {{0, 0}, {1, 0}, {1, 2}});
    CHECK(bm_box_dim(bm) == doctest::Approx(1 + std::log(1.5) / std::log(3.0)));
    CHECK(bm_hausdorff_dim(bm) == doctest::Approx(std::log(1 + std::pow(2.0, std::log(2.0) / std::log(3.0))) /
                                                  std::log(2.0)));
}

TEST_CASE("scale indices") {
    const auto seg = fixtures::segments_2x3();
    const Word w(10, 1);
    auto ks = k_scales(w, seg, q(1, 9));
    CHECK(ks.k1 == 2);
    CHECK(ks.k2 == 4);
    ks = k_scales(w, seg, q(1, 3));
    CHECK(ks.k1 == 1);
    CHECK(ks.k2 == 2);
    try {
        k_scales(Word{1, 1}, seg, q(1, 100));
        FAIL("expected insufficient prefix");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::insufficient_prefix);
    }
    CHECK_THROWS_AS(k_scales(w, seg, Rational(1)), Error);
}

TEST_CASE("scale indices satisfy the product sandwich on mixed grids") {
    const auto rifs = fixtures::mixed_grids();
    SplitMix64 g(1);
    for (int t = 0; t < 300; ++t) {
        const Word w = sample_realization(g.next(), rifs.probs(), 40);
        const Rational R(1, static_cast<long>(2 + g.next() % 100000));
        const auto ks = k_scales(w, rifs, R);
        Rational pn = 1, pm = 1;
        for (std::size_t l = 0; l < ks.k1; ++l) {
            pn /= rifs.ifs(w[l]).n();
        }
        for (std::size_t l = 0; l < ks.k2; ++l) {
            pm /= rifs.ifs(w[l]).m();
        }
        CHECK(pn <= R);
        CHECK(pn * rifs.ifs(w[ks.k1 - 1]).n() > R);
        CHECK(pm <= R);
        CHECK(pm * rifs.ifs(w[ks.k2 - 1]).m() > R);
    }
}

TEST_CASE("approximate squares have comparable sides") {
    const auto rifs = fixtures::mixed_grids();
    SplitMix64 g(2);
    for (int t = 0; t < 100; ++t) {
        const Word w = sample_realization(g.next(), rifs.probs(), 40);
        const Rational R(1, static_cast<long>(7 + g.next() % 5000));
        const auto ks = k_scales(w, rifs, R);
        if (ks.k1 == ks.k2) {
            continue;
        }
        std::vector<std::size_t> path(ks.k2);
        for (std::size_t l = 0; l < ks.k2; ++l) {
            path[l] = g.next() % rifs.ifs(w[l]).size();
        }
        const auto sq = approximate_square(w, rifs, R, path);
        CHECK(approx_square_sides_ok(sq, rifs, R));
        CHECK(sq.x_lo >= 0);
        CHECK(sq.y_hi <= 1);
    }
}

TEST_CASE("carpet grids") {
    const auto seg = fixtures::segments_2x3();
    const auto line = carpet_grid(Word(5, 1), seg, 5);
    CHECK(line.cells.size() == 32);
    CHECK(line.cells.resolution() == std::vector<std::int64_t>{32, 243});
    for (std::size_t k = 0; k < line.cells.size(); ++k) {
        CHECK(line.cells.cell(k)[1] == 242);
    }
    const auto mixed = carpet_grid(Word{1, 2, 3}, fixtures::mixed_grids(), 3);
    CHECK(mixed.cells.size() == 3 * 6 * 3);
    CHECK_THROWS_AS(carpet_grid(Word(30, 2), seg, 30, 1000), Error);
}

TEST_CASE("grid cells inside an approximate square match a filtered full grid") {
    const auto rifs = fixtures::mixed_grids();
    SplitMix64 g(4);
    for (int t = 0; t < 20; ++t) {
        const std::size_t depth = 7;
        const Word w = sample_realization(g.next(), rifs.probs(), depth);
        const Rational R(1, 20);
        KScales ks;
        try {
            ks = k_scales(w, rifs, R);
        } catch (const Error&) {
            continue;
        }
        if (ks.k1 == ks.k2 || ks.k2 > depth) {
            continue;
        }
        std::vector<std::size_t> path(ks.k2);
        for (std::size_t l = 0; l < ks.k2; ++l) {
            path[l] = g.next() % rifs.ifs(w[l]).size();
        }
        const auto sq = approximate_square(w, rifs, R, path);
        const auto inside = carpet_grid_in_square(w, rifs, depth, sq, path).cells;
        const auto full = carpet_grid(w, rifs, depth).cells;
        // Every cell of the square version lies in the full grid and in the square.
        const auto& res = full.resolution();
        for (std::size_t k = 0; k < inside.size(); ++k) {
            const auto c = inside.cell(k);
            CHECK(full.contains(c));
            CHECK(Rational(c[0], res[0]) >= sq.x_lo);
            CHECK(Rational(c[0] + 1, res[0]) <= sq.x_hi);
            CHECK(Rational(c[1], res[1]) >= sq.y_lo);
            CHECK(Rational(c[1] + 1, res[1]) <= sq.y_hi);
        }
        CHECK(inside.size() > 0);
    }
}

TEST_CASE("grid shift inclusion for carpets") {
    const auto rifs = fixtures::mixed_grids();
    const Word w{2, 1, 3, 2, 1};
    const auto deep = carpet_grid(w, rifs, 5).cells;
    const auto shifted = carpet_grid(Word(w.begin() + 2, w.end()), rifs, 3).cells;
    const auto top = carpet_grid(w, rifs, 2).cells;
    for (std::size_t k = 0; k < top.size(); ++k) {
        CHECK(blowup(deep, cell_window(top.cell(k), top.resolution())) == shifted);
    }
}

TEST_CASE("covering check holds on sampled realizations") {
    const auto rifs = fixtures::mixed_grids();
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const Word w = sample_realization(seed, rifs.probs(), 8);
        const auto grid = carpet_grid(w, rifs, 8);
        const auto samples = sample_cover_triples(grid, 100, seed);
        CHECK(samples.size() == 100);
        const auto rep = covering_upper_check(w, rifs, grid, samples, true);
        CHECK(rep.violations == 0);
        CHECK(rep.records.size() == 100);
        for (const auto& r : rep.records) {
            CHECK(r.sample.r <= r.sample.R);
            CHECK(r.count >= 1);
            CHECK(r.ball_count.has_value());
        }
    }
}

TEST_CASE("tangent product target and good square path") {
    const auto seg = fixtures::segments_2x3();
    const auto t = tangent_product_target(seg, 1, 2, 2);
    CHECK(t.cells == GridSet::full({4, 9}));
    const CarpetRIFS other({CarpetIFS(2, 3, {{0, 0}, {0, 2}}), CarpetIFS(2, 3, {{1, 0}, {1, 1}})},
                           ProbabilityVector::uniform(2));
    const auto t2 = tangent_product_target(other, 1, 2, 1);
    CHECK(t2.cells == GridSet({2, 3}, {0, 0, 0, 1}));

    const std::vector<CarpetScheduleEntry> sched{{q(1, 243), 3}};
    const auto good = good_word_carpet(seg, RealizationStream::iid(seg.probs(), 1), 1, 2, sched, 14);
    const auto path = good_square_path(good.word, seg, good.stages[0], 2);
    CHECK(path.size() == good.stages[0].k2);
}

TEST_CASE("schedule quantities grow") {
    const auto s = schedule_quantities(fixtures::segments_2x3(), 1, 2, 4);
    CHECK(s.theta == doctest::Approx(std::log(3.0) / std::log(2.0)));
    REQUIRE(s.levels.size() == 4);
    for (std::size_t k = 1; k < s.levels.size(); ++k) {
        CHECK(s.levels[k].l >= s.levels[k - 1].l);
    }
}
