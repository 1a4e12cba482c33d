// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include "fixtures.hpp"

#include "assouadlab/carpet.hpp"
#include "assouadlab/estimate.hpp"
#include "assouadlab/percolation.hpp"
#include "assouadlab/prng.hpp"
#include "assouadlab/selfsim.hpp"
#include "assouadlab/words.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#ifndef ASSOUADLAB_CLI
#error "ASSOUADLAB_CLI must name the command-line binary"
#endif

using namespace assouadlab;
using fixtures::q;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

// Median wall time of `reps` calls, in seconds.
double time_call(const std::function<void()>& fn, int reps = 21) {
    std::vector<double> ts;
    for (int k = 0; k < reps; ++k) {
        auto t0 = Clock::now();
        fn();
        ts.push_back(seconds_since(t0));
    }
    std::sort(ts.begin(), ts.end());
    return ts[ts.size() / 2];
}

Outcome c1() {
    const std::vector<Rational> a{q(1, 2), q(1, 4), q(1, 16)};
    const std::vector<Rational> b{q(1, 3), q(1, 9), q(1, 81)};
    double s1 = 0, s2 = 0;
    const double t1 = time_call([&] { s1 = similarity_dimension(a); });
    const double t2 = time_call([&] { s2 = similarity_dimension(b); });
    const bool ok = std::fabs(s1 - 0.81137) <= 1e-4 && std::fabs(s2 - 0.511918) <= 1e-5 && t1 < 1e-3 && t2 < 1e-3;
    return {ok, "s1=" + fmt("%.6f", s1) + " s2=" + fmt("%.7f", s2) + " times " + fmt("%.1e", t1) + "s, " +
                    fmt("%.1e", t2) + "s"};
}

Outcome c2() {
    const auto rifs = fixtures::segments_2x3();
    double m1 = 0, m2 = 0, as = 0, gl = 0;
    const double t = time_call([&] {
        m1 = mackay_dim(rifs.ifss()[0]);
        m2 = mackay_dim(rifs.ifss()[1]);
        as = as_assouad_carpet(rifs).value;
        const std::vector<double> dims{1.0, 1.0};
        gl = gui_li_average(rifs, dims);
    });
    const bool ok = std::fabs(m1 - 1) < 1e-12 && std::fabs(m2 - 1) < 1e-12 && as == 2.0 && gl == 1.0 && t < 1e-3;
    return {ok, "mackay=(" + fmt("%.12g", m1) + "," + fmt("%.12g", m2) + ") assouad=" + fmt("%.12g", as) +
                    " average=" + fmt("%.12g", gl) + " time " + fmt("%.1e", t) + "s"};
}

Outcome c3() {
    bool indep = true, dep = false;
    const double t = time_call([&] {
        indep = !multiplicative_dependence(q(1, 18), q(1, 12));
        dep = multiplicative_dependence(q(1, 2), q(1, 4));
    });
    return {indep && dep && t < 1e-3, std::string("1/18 vs 1/12 ") + (indep ? "independent" : "dependent") +
                                          ", 1/2 vs 1/4 " + (dep ? "dependent" : "independent") + " time " +
                                          fmt("%.1e", t) + "s"};
}

Outcome c4() {
    const auto t0 = Clock::now();
    const auto rifs = fixtures::segments_2x3();
    std::size_t violations = 0, checked = 0;
    double worst = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const Word w = sample_realization(seed, rifs.probs(), 12);
        const auto grid = carpet_grid(w, rifs, 12);
        const auto samples = sample_cover_triples(grid, 200, seed * 7919 + 1);
        const auto rep = covering_upper_check(w, rifs, grid, samples);
        violations += rep.violations;
        checked += rep.samples;
        worst = std::max(worst, rep.max_ratio);
    }
    const double secs = seconds_since(t0);
    return {violations == 0 && checked == 20000 && secs < 300,
            std::to_string(checked) + " triples, " + std::to_string(violations) + " violations, max count/bound " +
                fmt("%.3f", worst) + ", " + fmt("%.1f", secs) + "s"};
}

Outcome c5() {
    const auto t0 = Clock::now();
    const auto rifs = fixtures::mixed_grids();
    const auto shapes = rifs.shapes();
    SplitMix64 rng(2024);
    std::size_t ok = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        Word w(60);
        for (auto& l : w) {
            l = static_cast<Letter>(1 + rng.next() % shapes.size());
        }
        const long den = 2 + static_cast<long>(rng.next() % 1'000'000'000);
        const long num = 1 + static_cast<long>(rng.next() % static_cast<std::uint64_t>(den - 1));
        const Rational R(num, den);
        const auto ks = k_scales(w, shapes, R);
        // Independent oracle: products of exact rationals, compared on both sides.
        auto prod = [&](std::size_t k, bool use_n) {
            Rational p = 1;
            for (std::size_t l = 0; l < k; ++l) {
                p /= use_n ? shapes[w[l] - 1].n : shapes[w[l] - 1].m;
            }
            return p;
        };
        const bool s1 = ks.k1 >= 1 && prod(ks.k1, true) <= R && R < prod(ks.k1 - 1, true);
        const bool s2 = ks.k2 >= 1 && prod(ks.k2, false) <= R && R < prod(ks.k2 - 1, false);
        ok += (s1 && s2 && ks.k2 >= ks.k1) ? 1 : 0;
    }
    const double secs = seconds_since(t0);
    return {ok == 1000 && secs < 1.0, std::to_string(ok) + "/1000 sandwiches exact, " + fmt("%.3f", secs) + "s"};
}

Outcome c6() {
    const auto t0 = Clock::now();
    long double worst = 0;
    std::size_t cases = 0;
    bool monotone = true, limit = true;
    for (std::size_t N = 2; N <= 4; ++N) {
        for (std::size_t M = 1; M < N; ++M) {
            double prev = -1;
            for (std::size_t n = 1; n <= 8; ++n) {
                const double a = exceptional_dim_lower(N, M, n);
                monotone = monotone && a >= prev - 1e-15;
                prev = a;
                for (std::size_t k = 1; k <= 8; ++k) {
                    worst = std::max(worst, mass_distribution_check(N, M, n, k).discrepancy);
                    ++cases;
                }
            }
            limit = limit && std::fabs(exceptional_dim_lower(N, M, 40) - omega_hausdorff_dim(N)) < 1e-3;
        }
    }
    const double secs = seconds_since(t0);
    return {worst < 1e-12L && monotone && limit && secs < 1.0,
            std::to_string(cases) + " cases, max discrepancy " + fmt("%.2e", static_cast<double>(worst)) +
                (monotone ? ", monotone" : ", NOT monotone") + (limit ? ", limit ok at n=40" : ", limit off") +
                ", " + fmt("%.3f", secs) + "s"};
}

Outcome c7() {
    const auto t0 = Clock::now();
    struct Case {
        int n, d;
        Rational p;
    };
    const std::vector<Case> cases{{2, 2, q(1, 2)}, {2, 2, q(7, 10)}, {2, 2, q(9, 10)}, {3, 1, q(1, 2)}};
    bool ok = true;
    std::string detail;
    for (const auto& cs : cases) {
        const auto ext = extinction_probability(cs.n, cs.d, cs.p);
        const double oracle = 1.0 - survival_iterate(cs.n, cs.d, cs.p, 14);
        const std::size_t trials = 2000;
        std::size_t alive = 0;
        for (std::uint64_t seed = 1; seed <= trials; ++seed) {
            alive += survives_to({cs.n, cs.d, cs.p, seed}, 14) ? 1 : 0;
        }
        const double freq = static_cast<double>(alive) / trials;
        const double sigma = std::sqrt(oracle * (1 - oracle) / trials);
        const bool pass = ext.residual < 1e-10 && std::fabs(freq - oracle) <= 3 * sigma;
        ok = ok && pass;
        detail += "(" + std::to_string(cs.n) + "," + std::to_string(cs.d) + "," + to_string(cs.p) + "): " +
                  fmt("%.4f", freq) + " vs " + fmt("%.4f", oracle) + " [" + fmt("%.1f", std::fabs(freq - oracle) / sigma) +
                  "sd] ";
    }
    const double secs = seconds_since(t0);
    return {ok && secs < 300, detail + fmt("%.1f", secs) + "s"};
}

// Largest distance from a point of [0,1]^d to the cell centers: attained at cell corners,
// so scanning the corners of the grid is exact.
double continuous_gap(const GridSet& cells) {
    const std::int64_t res = cells.resolution().front();
    const std::size_t d = cells.dim();
    std::vector<double> corners, centers;
    std::vector<std::int64_t> c(d, 0);
    for (bool done = false; !done;) {
        for (auto v : c) {
            corners.push_back(static_cast<double>(v) / static_cast<double>(res));
        }
        done = true;
        for (std::size_t a = d; a-- > 0;) {
            if (++c[a] <= res) {
                done = false;
                break;
            }
            c[a] = 0;
        }
    }
    for (std::size_t k = 0; k < cells.size(); ++k) {
        for (std::size_t a = 0; a < d; ++a) {
            centers.push_back(cells.center(k, a));
        }
    }
    return hausdorff_distance_points(corners, centers, d);
}

Outcome c8() {
    const auto t0 = Clock::now();
    const PercConfig base{2, 2, q(9, 10), 0};
    bool exact = true;
    auto run = [&](std::size_t depth, std::size_t m_need, std::uint64_t seed0) {
        std::size_t hits = 0;
        for (std::uint64_t s = 0; s < 100; ++s) {
            PercConfig cfg = base;
            cfg.seed = seed0 + s * 1000;
            const auto cr = conditioned_sample(cfg, depth, 1000);
            const auto w = tangent_witness_search(cr.levels, depth - 1);
            if (!w) {
                continue;
            }
            const auto blown = witness_blowup(cr.levels, *w);
            const auto full = GridSet::full(blown.resolution());
            const bool grid_exact = blown == full && hausdorff_distance(blown, full) == 0.0;
            const bool bound = continuous_gap(blown) <= w->bound;
            exact = exact && grid_exact && bound;
            hits += w->m >= m_need ? 1 : 0;
        }
        return hits;
    };
    const std::size_t h8 = run(8, 2, 1);
    const std::size_t h12 = run(12, 3, 500'000);
    const double secs = seconds_since(t0);
    return {h8 >= 90 && h12 >= 50 && exact && secs < 300,
            "depth 8: m>=2 in " + std::to_string(h8) + "/100, depth 12: m>=3 in " + std::to_string(h12) +
                "/100, blow-ups " + (exact ? "exact" : "NOT exact") + ", " + fmt("%.1f", secs) + "s"};
}

Outcome c9() {
    const auto t0 = Clock::now();
    std::string detail;
    // Full grid.
    const auto full = GridSet::full({256, 256});
    const auto e_full = assouad_estimate(full, doubling_ladder(full), CenterChoice::sampled(256, 1));
    const bool ok_full = std::fabs(e_full.exponent - 2) <= 0.15;
    detail += "full grid " + fmt("%.3f", e_full.exponent);
    // Constant word 1 on the segment carpet: a line segment.
    const auto seg = fixtures::segments_2x3();
    const Word ones(12, 1);
    const auto line = carpet_grid(ones, seg, 12).cells;
    const auto e_line = assouad_estimate(line, doubling_ladder(line), CenterChoice::all());
    const bool ok_line = std::fabs(e_line.exponent - 1) <= 0.2;
    detail += ", segment " + fmt("%.3f", e_line.exponent);
    // Spliced good words, one stage per run length, resolved at depth 14.
    bool ok_tangent = true;
    auto check_stage = [&](const CarpetRIFS& rifs, const Rational& R, std::size_t run, std::uint64_t seed,
                           const char* tag) {
        const auto as = as_assouad_carpet(rifs);
        const CarpetScheduleEntry entry{R, run};
        const auto good = good_word_carpet(rifs, RealizationStream::iid(rifs.probs(), seed), as.i, as.j,
                                           std::span(&entry, 1), 14);
        const auto& st = good.stages.front();
        const auto path = good_square_path(good.word, rifs, st, as.j);
        const auto sq = approximate_square(good.word, rifs, R, path);
        const auto local = carpet_grid_in_square(good.word, rifs, 14, sq, path);
        const auto blown = blowup(local.cells, sq.window());
        const auto target = tangent_product_target(rifs, as.i, as.j, run).cells;
        const double mi = rifs.ifs(as.i).m(), nj = rifs.ifs(as.j).n();
        const double rr = static_cast<double>(run);
        const double bound = std::sqrt(std::pow(mi, -2 * rr) + std::pow(nj, -2 * rr)) + blown.cell_diagonal();
        const double dist = hausdorff_distance(blown, target);
        const bool pass = dist <= bound && good.word.size() == 14 && st.k2 + run <= 14;
        ok_tangent = ok_tangent && pass;
        detail += std::string(", ") + tag + " n=" + std::to_string(run) + " d=" + fmt("%.4f", dist) + "<=" +
                  fmt("%.4f", bound);
        return std::pair<GridSet, GridSet>{blown, target};
    };
    const auto seg4 = fixtures::segments_2x4();
    std::vector<GridSet> blown, targets;
    std::vector<double> bounds;
    for (std::size_t run = 2; run <= 4; ++run) {
        // R = 4^-run gives k1 = run, k2 = 2 run on the 2x4 grid.
        const Rational R(1, static_cast<long>(std::pow(4, run)));
        auto [b, t] = check_stage(seg4, R, run, 100 + run, "2x4");
        bounds.push_back(std::sqrt(std::pow(2.0, -2.0 * run) + std::pow(4.0, -2.0 * run)) + b.cell_diagonal());
        blown.push_back(std::move(b));
        targets.push_back(std::move(t));
    }
    const auto conv = tangent_convergence(std::span<const GridSet>(blown), std::span<const GridSet>(targets),
                                          std::span<const double>(bounds));
    ok_tangent = ok_tangent && conv.dominated;
    // On the 2x3 grid R = 3^-k gives k2 - k1 just large enough for a run of n.
    check_stage(seg, Rational(1, 81), 2, 7, "2x3");
    check_stage(seg, Rational(1, 243), 3, 8, "2x3");
    check_stage(seg, Rational(1, 729), 4, 9, "2x3");
    const double secs = seconds_since(t0);
    return {ok_full && ok_line && ok_tangent && secs < 300, detail + ", " + fmt("%.1f", secs) + "s"};
}

SimilarityRIFS random_selfsim(SplitMix64& rng) {
    const std::size_t d = 1 + rng.next() % 2;
    const std::size_t N = 1 + rng.next() % 3;
    const std::vector<Rational> ratios{q(1, 2), q(1, 3), q(1, 4), q(2, 5), q(1, 5), q(3, 7)};
    std::vector<SimilarityIFS> ifss;
    for (std::size_t i = 0; i < N; ++i) {
        std::vector<SimilarityMap> maps;
        const std::size_t count = 1 + rng.next() % 3;
        for (std::size_t j = 0; j < count; ++j) {
            const Rational c = ratios[rng.next() % ratios.size()];
            std::vector<Rational> t;
            for (std::size_t a = 0; a < d; ++a) {
                // t in [0, 1 - c] on a grid of eighths of the free room.
                t.push_back((1 - c) * Rational(static_cast<long>(rng.next() % 9), 8));
            }
            maps.emplace_back(c, std::move(t));
        }
        ifss.emplace_back(std::move(maps));
    }
    return SimilarityRIFS(std::move(ifss), ProbabilityVector::uniform(N));
}

Outcome c10() {
    const auto t0 = Clock::now();
    SplitMix64 rng(77);
    std::size_t specs_ok = 0, cylinders = 0;
    for (int s = 0; s < 50; ++s) {
        const auto rifs = random_selfsim(rng);
        const std::size_t k = 1 + rng.next() % 2;
        const std::size_t N = 1 + rng.next() % 3;
        const Word w = sample_realization(rng.next(), rifs.probs(), k + N);
        const auto deep = attractor_boxes(rifs, w, k + N);
        const auto top = attractor_boxes(rifs, w, k);
        const Word shifted(w.begin() + static_cast<std::ptrdiff_t>(k), w.end());
        const auto ref = box_geometry(attractor_boxes(rifs, shifted, N).boxes);
        bool all = true;
        for (const auto& b : top.boxes) {
            all = all && box_geometry(blowup_descendants(deep, b)) == ref;
            ++cylinders;
        }
        specs_ok += all ? 1 : 0;
    }
    const double secs = seconds_since(t0);
    return {specs_ok == 50 && secs < 60, std::to_string(specs_ok) + "/50 specs, " + std::to_string(cylinders) +
                                             " cylinders exact, " + fmt("%.2f", secs) + "s"};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome c11() {
    const auto t0 = Clock::now();
    const fs::path dir = fs::temp_directory_path() / ("assouadlab_accept_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    const auto write = [&](const char* name, const char* text) {
        std::ofstream(dir / name) << text;
    };
    write("selfsim.json", R"({"kind":"selfsim","ambient_dim":1,
      "ifss":[[{"c":"1/2","t":["0"]},{"c":"1/4","t":["0"]},{"c":"1/16","t":["0"]}],
              [{"c":"1/3","t":["0"]},{"c":"1/9","t":["0"]},{"c":"1/81","t":["0"]}]],
      "probs":["1/2","1/2"]})");
    write("carpet.json", R"({"kind":"carpet","ifss":[{"m":2,"n":4,"digits":[[0,3],[1,3]]},
      {"m":2,"n":4,"digits":[[1,0],[1,1],[1,2],[1,3]]}],"probs":["1/2","1/2"]})");
    write("perc.json", R"({"kind":"percolation","n":2,"d":2,"p":"7/10"})");
    // Each command writes into {out}; stdout is captured too.
    const std::vector<std::pair<std::string, std::string>> commands{
        {"dims", "dims {d}/selfsim.json -o {out}"},
        {"sample", "sample {d}/carpet.json --seed 5 --depth 40 -o {out}"},
        {"render", "render {d}/carpet.json --seed 5 --depth 8 --size 256 -o {out}"},
        {"estimate", "estimate {d}/carpet.json --seed 5 --depth 10 --centers 200 -o {out}"},
        {"percolate", "percolate --n 2 --d 2 --p 0.7 --depth 8 --seed 1 --witness-m 3 -o {out}"},
        {"tangent", "tangent {d}/carpet.json --seed 5 --depth 14 --schedule 1/4:1,1/64:3 -o {out}"},
        {"report", "report {d}/perc.json --seed 3 --depth 8 --centers 100 -o {out}"},
    };
    bool ok = true;
    std::string detail;
    for (const auto& [name, tmpl] : commands) {
        std::vector<std::string> outputs;
        for (const char* threads : {"1", "1", "4", "4"}) {
            std::string cmd = tmpl;
            const fs::path out = dir / (name + "_" + std::to_string(outputs.size()));
            for (auto [key, val] : {std::pair<std::string, std::string>{"{d}", dir.string()},
                                    std::pair<std::string, std::string>{"{out}", out.string()}}) {
                for (auto pos = cmd.find(key); pos != std::string::npos; pos = cmd.find(key)) {
                    cmd.replace(pos, key.size(), val);
                }
            }
            const fs::path captured = dir / (name + "_stdout_" + std::to_string(outputs.size()));
            const std::string full = std::string("ASSOUADLAB_THREADS=") + threads + " " + ASSOUADLAB_CLI + " " + cmd +
                                     " > " + captured.string() + " 2>&1";
            const int rc = std::system(full.c_str());
            outputs.push_back(rc == 0 ? slurp(out) + "\n--stdout--\n" + slurp(captured) : std::string());
            if (rc != 0) {
                detail += name + " exited " + std::to_string(rc) + "; ";
            }
        }
        const bool same = !outputs[0].empty() && outputs[0] == outputs[1] && outputs[1] == outputs[2] &&
                          outputs[2] == outputs[3];
        ok = ok && same;
        detail += name + (same ? " ok " : " DIFF ");
    }
    fs::remove_all(dir);
    return {ok, detail + fmt("%.1f", seconds_since(t0)) + "s"};
}

} // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"similarity dimensions of the two overlapping IFSs", c1},
        {"segment carpet: Mackay values, a.s. Assouad value, weighted average", c2},
        {"multiplicative dependence decisions", c3},
        {"sure covering bound on 100 carpet realizations", c4},
        {"scale index sandwiches on mixed grids", c5},
        {"mass distribution identity and exceptional-set bound", c6},
        {"percolation fixed point and depth-14 survival frequencies", c7},
        {"percolation full-subtree witnesses", c8},
        {"empirical exponents and carpet tangent distances", c9},
        {"discrete shift inclusion on random self-similar specs", c10},
        {"byte-identical CLI outputs across runs and thread counts", c11},
    };
    int failed = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        Outcome o;
        try {
            o = criteria[k].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += o.pass ? 0 : 1;
        std::cout << "criterion " << (k + 1) << " " << (o.pass ? "PASS" : "FAIL") << ": " << criteria[k].first << " ("
                  << o.detail << ")" << std::endl;
    }
    std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size() << " criteria passed"
              << std::endl;
    return failed == 0 ? 0 : 1;
}
