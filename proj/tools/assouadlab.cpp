// assouadlab: command-line front end for the random-fractal library.
//
// Every subcommand buffers its outputs and only writes them once the run succeeded, so a
// failure never leaves partial files. Exit codes: 0 ok, 2 spec/input error, 3 scale error,
// 4 retries exhausted.

#include "assouadlab/carpet.hpp"
#include "assouadlab/errors.hpp"
#include "assouadlab/estimate.hpp"
#include "assouadlab/io.hpp"
#include "assouadlab/percolation.hpp"
#include "assouadlab/selfsim.hpp"
#include "assouadlab/words.hpp"

#include "CLI11.hpp"

#include <cmath>
#include <iostream>
#include <map>
#include <sstream>

using namespace assouadlab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitSpec = 2;
constexpr int kExitScale = 3;
constexpr int kExitRetries = 4;

int exit_code(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::scale:
    case ErrorKind::insufficient_prefix:
        return kExitScale;
    case ErrorKind::retries_exhausted:
        return kExitRetries;
    default:
        return kExitSpec;
    }
}

// Outputs collected during a run: file path -> contents, plus stdout text.
struct Outputs {
    std::map<std::string, std::string> files;
    std::string stdout_text;

    void emit(const std::string& path, const std::string& contents) {
        if (path.empty() || path == "-") {
            stdout_text += contents;
        } else {
            files[path] = contents;
        }
    }

    void commit() const {
        for (const auto& [path, contents] : files) {
            write_file_atomic(path, contents);
        }
        std::cout << stdout_text << std::flush;
    }
};

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

struct Common {
    std::string spec_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> depth;
    std::string word;
    std::string out;
};

ExperimentSpec load(const Common& c) {
    ExperimentSpec spec = load_spec(c.spec_path);
    if (c.seed) {
        spec.seed = c.seed;
        if (spec.percolation) {
            spec.percolation->seed = *c.seed;
        }
    }
    if (c.depth) {
        spec.depth = c.depth;
    }
    return spec;
}

std::size_t need_depth(const ExperimentSpec& spec) {
    if (!spec.depth) {
        throw spec_error("depth: give --depth or a 'depth' field in the spec");
    }
    return *spec.depth;
}

std::uint64_t need_seed(const ExperimentSpec& spec, const char* why) {
    if (!spec.seed) {
        throw spec_error(std::string("--seed is required: ") + why);
    }
    return *spec.seed;
}

std::size_t alphabet_of(const ExperimentSpec& spec) {
    return spec.selfsim ? spec.selfsim->alphabet_size() : spec.carpet->alphabet_size();
}

const ProbabilityVector& probs_of(const ExperimentSpec& spec) {
    return spec.selfsim ? spec.selfsim->probs() : spec.carpet->probs();
}

// --word splices an explicit prefix over the spec's realization, an iid stream from --seed, or
// (with neither) its own periodic extension.
RealizationStream stream_for(const ExperimentSpec& spec, const std::string& word_text) {
    if (spec.kind == ModelKind::percolation) {
        throw spec_error("percolation specs have no word");
    }
    std::optional<RealizationStream> base = spec.realization;
    if (!base && spec.seed) {
        base = RealizationStream::iid(probs_of(spec), *spec.seed);
    }
    RealizationStream out = base ? *base : RealizationStream::constant(1);
    if (!word_text.empty()) {
        Word w;
        try {
            w = parse_word(word_text);
        } catch (const Error& e) {
            throw spec_error(std::string("--word: ") + e.what());
        }
        if (w.empty()) {
            throw spec_error("--word: empty word");
        }
        RealizationStream b = base ? *base : RealizationStream::periodic(w);
        std::vector<Splice> sp;
        for (std::size_t k = 0; k < w.size(); ++k) {
            sp.push_back({k + 1, 1, w[k]});
        }
        out = RealizationStream::spliced(b, std::move(sp));
    } else if (!base) {
        throw spec_error("no realization: give --word, --seed, or a 'realization' field");
    }
    if (out.max_letter() > alphabet_of(spec)) {
        throw spec_error("word uses letter " + std::to_string(out.max_letter()) + " outside the alphabet 1.." +
                         std::to_string(alphabet_of(spec)));
    }
    return out;
}

Json theory_entry(const std::string& name, double value, const std::string& formula) {
    return Json{{"name", name}, {"value", value}, {"formula", formula}};
}

Json selfsim_dims(const SimilarityRIFS& rifs, std::size_t max_period) {
    Json out;
    Json sims = Json::array();
    for (const auto& ifs : rifs.ifss()) {
        sims.push_back(similarity_dimension(ifs));
    }
    out["sim_dims"] = sims;
    const auto uosc = check_uosc(rifs);
    out["uosc"] = to_string(uosc);
    Json th = Json::array();
    th.push_back(theory_entry("almost_sure_hausdorff", almost_sure_hausdorff(rifs),
                              "root of sum_i p_i log sum_j c_ij^s = 0"));
    const auto sure = sure_assouad_upper(rifs);
    Json s = theory_entry("sure_assouad_upper", sure.value, "max_i similarity dimension of IFS i");
    s["valid"] = sure.valid;
    s["label"] = sure.label;
    th.push_back(s);
    const auto as = as_assouad_selfsimilar(rifs);
    Json a = theory_entry("almost_sure_assouad", as.value, "max_i similarity dimension of IFS i");
    a["valid"] = as.valid;
    a["label"] = as.label;
    th.push_back(a);
    out["theoretical"] = th;
    const auto probe = periodic_sup_probe(rifs, max_period);
    Json pr;
    pr["max_period"] = max_period;
    pr["value"] = probe.value;
    pr["best_pattern"] = format_word(probe.best_pattern);
    pr["patterns_examined"] = probe.patterns_examined;
    pr["within_ifs_all_dependent"] = probe.within_ifs_all_dependent;
    Json wit = Json::array();
    for (const auto& w : probe.witnesses) {
        wit.push_back(Json{{"pattern", format_word(w.pattern)}, {"c1", rational_json(w.c1)}, {"c2", rational_json(w.c2)}});
        if (wit.size() >= 8) {
            break;
        }
    }
    pr["independence_witnesses"] = wit;
    pr["witness_count"] = probe.witnesses.size();
    out["periodic_probe"] = pr;
    if (!probe.witnesses.empty()) {
        out["independence_witness"] = Json::array({rational_json(probe.witnesses.front().c1),
                                                   rational_json(probe.witnesses.front().c2)});
    }
    return out;
}

Json carpet_dims(const CarpetRIFS& rifs) {
    Json out;
    Json mk = Json::array();
    std::vector<double> hd, bd;
    for (const auto& ifs : rifs.ifss()) {
        mk.push_back(mackay_dim(ifs));
        hd.push_back(bm_hausdorff_dim(ifs));
        bd.push_back(bm_box_dim(ifs));
    }
    out["mackay"] = mk;
    const auto as = as_assouad_carpet(rifs);
    const auto sure = sure_upper_carpet(rifs);
    Json th = Json::array();
    Json a = theory_entry("almost_sure_assouad", as.value, "max_i log A_i/log m_i + max_i log B_i/log n_i");
    a["i"] = as.i;
    a["j"] = as.j;
    a["label"] = as.label;
    th.push_back(a);
    Json s = theory_entry("sure_assouad_upper", sure.value, "max_i log A_i/log m_i + max_i log B_i/log n_i");
    s["label"] = sure.label;
    th.push_back(s);
    out["theoretical"] = th;
    out["as_assouad"] = as.value;
    out["maximizers"] = Json{{"i", as.i}, {"j", as.j}};
    Json gl;
    if (rifs.uniform_grid()) {
        gl["hausdorff_dims"] = hd;
        gl["hausdorff_average"] = gui_li_average(rifs, hd);
        gl["box_dims"] = bd;
        gl["box_average"] = gui_li_average(rifs, bd);
        gl["note"] = "weighted averages of the deterministic per-IFS values";
    } else {
        gl["applicable"] = false;
        gl["note"] = "weighted-average formula needs the same (m, n) for every IFS";
    }
    out["gui_li"] = gl;
    return out;
}

Json percolation_dims(const PercConfig& cfg) {
    Json out;
    out["n"] = cfg.n;
    out["d"] = cfg.d;
    out["p"] = rational_json(cfg.p);
    const bool super = supercritical(cfg.n, cfg.d, cfg.p);
    out["supercritical"] = super;
    const auto ext = extinction_probability(cfg.n, cfg.d, cfg.p);
    out["extinction"] = Json{{"q", ext.q}, {"p_noext", ext.p_noext}, {"residual", ext.residual}};
    Json th = Json::array();
    if (super) {
        const auto h = hausdorff_dim_percolation(cfg.n, cfg.d, cfg.p);
        Json he = theory_entry("almost_sure_hausdorff", h.value, "log(n^d p)/log n");
        he["note"] = h.note;
        th.push_back(he);
        const auto a = assouad_dim_percolation(cfg.n, cfg.d, cfg.p);
        Json ae = theory_entry("almost_sure_assouad", a.value, "d");
        ae["note"] = a.note;
        th.push_back(ae);
        for (int k = 1; k <= cfg.d; ++k) {
            const auto pa = projection_assouad(cfg.n, cfg.d, cfg.p, k);
            Json pe = theory_entry("projection_assouad_rank_" + std::to_string(k), pa.value, "k");
            pe["note"] = pa.note;
            th.push_back(pe);
        }
        Json lq = Json::array();
        const std::uint64_t N = static_cast<std::uint64_t>(std::llround(std::pow(cfg.n, cfg.d)));
        for (std::uint64_t m = 1; m <= 3; ++m) {
            const auto q = subtree_quantities(N, m, cfg.p, ext.p_noext);
            Json e{{"m", m}, {"L", q.L.str()}, {"log_p_hat", static_cast<double>(q.log_p_hat)}, {"p_hat", q.p_hat}};
            if (q.k_of_m) {
                e["k_of_m"] = *q.k_of_m;
            } else {
                e["k_of_m"] = "saturated";
                e["log_k_of_m"] = static_cast<double>(q.log_k_estimate);
            }
            lq.push_back(e);
        }
        out["subtree_quantities"] = lq;
    } else {
        out["note"] = "subcritical or critical: the limit set is almost surely empty";
    }
    out["theoretical"] = th;
    return out;
}

Json dims_report(const ExperimentSpec& spec, std::size_t max_period) {
    Json out;
    out["kind"] = to_string(spec.kind);
    switch (spec.kind) {
    case ModelKind::selfsim:
        out.update(selfsim_dims(*spec.selfsim, max_period));
        break;
    case ModelKind::carpet:
        out.update(carpet_dims(*spec.carpet));
        break;
    case ModelKind::percolation:
        out.update(percolation_dims(*spec.percolation));
        break;
    }
    return out;
}

// Occupancy of the spec's realization at `depth`; `resolution` only matters for self-similar sets.
GridSet occupancy(const ExperimentSpec& spec, const std::string& word_text, std::size_t depth,
                  std::int64_t resolution) {
    switch (spec.kind) {
    case ModelKind::selfsim: {
        const Word w = stream_for(spec, word_text).prefix(depth);
        return rasterize(attractor_boxes(*spec.selfsim, w, depth), resolution);
    }
    case ModelKind::carpet: {
        const Word w = stream_for(spec, word_text).prefix(depth);
        return carpet_grid(w, *spec.carpet, depth).cells;
    }
    case ModelKind::percolation: {
        PercConfig cfg = *spec.percolation;
        cfg.seed = need_seed(spec, "percolation is random");
        return simulate(cfg, depth).grid(depth);
    }
    }
    return {};
}

std::optional<Window> parse_window(const std::string& text, std::size_t dim) {
    if (text.empty()) {
        return std::nullopt;
    }
    std::vector<Rational> vals;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            vals.push_back(parse_rational(item));
        } catch (const Error& e) {
            throw spec_error(std::string("--window: ") + e.what());
        }
    }
    if (vals.size() != 2 * dim) {
        throw spec_error("--window: expected lo_0,...,lo_{d-1},hi_0,...,hi_{d-1} (" + std::to_string(2 * dim) +
                         " values)");
    }
    Window w;
    w.lo.assign(vals.begin(), vals.begin() + static_cast<std::ptrdiff_t>(dim));
    w.hi.assign(vals.begin() + static_cast<std::ptrdiff_t>(dim), vals.end());
    return w;
}

Json estimate_json(const AssouadEstimate& est, const CenterChoice& choice) {
    Json out;
    Json ladder = Json::array();
    for (std::size_t k = 0; k < est.counts.size(); ++k) {
        ladder.push_back(Json{{"R", est.ladder.pairs[k].R}, {"r", est.ladder.pairs[k].r}, {"sup_count", est.counts[k]}});
    }
    out["ladder"] = ladder;
    out["rho"] = est.ladder.rho;
    out["exponent"] = est.exponent;
    out["intercept"] = est.intercept;
    out["residual"] = est.residual;
    out["centers"] = est.centers;
    if (choice.sample) {
        out["center_sample"] = Json{{"k", *choice.sample}, {"seed", choice.seed}};
    } else {
        out["center_sample"] = "all";
    }
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"assouadlab: random fractals, exact dimension formulas and covering estimates"};
    app.require_subcommand(1);

    Common c;
    auto add_common = [&](CLI::App* sub, bool spec_required) {
        auto* o = sub->add_option("spec", c.spec_path, "experiment spec (JSON)");
        if (spec_required) {
            o->required();
        }
        sub->add_option("--seed", c.seed, "PRNG seed");
        sub->add_option("--depth", c.depth, "construction depth");
        sub->add_option("--word", c.word, "explicit word prefix, e.g. 1,2,2");
        sub->add_option("-o,--out", c.out, "output path ('-' = stdout)");
    };

    std::size_t max_period = 2;
    auto* dims = app.add_subcommand("dims", "closed-form dimension values for a spec");
    add_common(dims, true);
    dims->add_option("--max-period", max_period, "periodic probe period bound (self-similar)");

    std::size_t length = 0;
    auto* sample = app.add_subcommand("sample", "realization words or percolation levels");
    add_common(sample, true);
    sample->add_option("--length", length, "word length (default: depth)");

    std::int64_t size = 512;
    std::int64_t height = 0;
    auto* render = app.add_subcommand("render", "binary PGM image of the depth-k approximation");
    add_common(render, true);
    render->add_option("--size", size, "image width in pixels (self-similar raster resolution too)");
    render->add_option("--height", height, "image height (default: matches the aspect of the grid)");

    std::int64_t resolution = 256;
    std::optional<std::size_t> centers;
    double rho = 0.25;
    std::string window_text;
    std::string json_out;
    auto* estimate = app.add_subcommand("estimate", "two-scale covering exponent estimate");
    add_common(estimate, true);
    estimate->add_option("--resolution", resolution, "raster resolution for self-similar sets");
    estimate->add_option("--centers", centers, "sample this many centers (needs --seed); default all");
    estimate->add_option("--rho", rho, "outer scale cap");
    estimate->add_option("--window", window_text, "blow-up window lo_0,..,hi_0,.. before estimating");
    estimate->add_option("--json", json_out, "also write the fit as JSON here");

    int pn = 0, pd = 0;
    std::string pp;
    bool condition = false;
    std::size_t max_retries = 1000;
    std::optional<std::size_t> witness_m;
    std::string csv_out, pgm_out;
    auto* percolate = app.add_subcommand("percolate", "Mandelbrot percolation run with analytics");
    add_common(percolate, false);
    percolate->add_option("--n", pn, "subdivision per axis");
    percolate->add_option("--d", pd, "ambient dimension");
    percolate->add_option("--p", pp, "retention probability (p/q or decimal)");
    percolate->add_flag("--condition", condition, "resample seeds until level depth is non-empty");
    percolate->add_option("--max-retries", max_retries, "seed budget for --condition");
    percolate->add_option("--witness-m", witness_m, "search for a full subtree of this height");
    percolate->add_option("--csv", csv_out, "write surviving cubes per level as CSV");
    percolate->add_option("--pgm", pgm_out, "render the deepest level (d <= 2)");

    std::string schedule_text;
    std::size_t shift_k = 2, shift_n = 3;
    std::string target = "auto";
    auto* tangent = app.add_subcommand("tangent", "blow-ups compared with a tangent target");
    add_common(tangent, true);
    tangent->add_option("--target", target, "auto | product (carpet) | full (percolation) | shift (self-similar)");
    tangent->add_option("--schedule", schedule_text, "carpet stages R:n,R:n,... with R rational");
    tangent->add_option("--witness-m", witness_m, "percolation witness height");
    tangent->add_option("--max-retries", max_retries, "seed budget for the conditioned run");
    tangent->add_option("--k", shift_k, "self-similar cylinder depth");
    tangent->add_option("--n", shift_n, "self-similar levels below the cylinder");

    auto* report = app.add_subcommand("report", "closed forms plus an empirical covering estimate");
    add_common(report, true);
    report->add_option("--resolution", resolution, "raster resolution for self-similar sets");
    report->add_option("--centers", centers, "sample this many centers (needs --seed)");
    report->add_option("--max-period", max_period, "periodic probe period bound (self-similar)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitSpec;
    }

    Outputs out;
    try {
        if (dims->parsed()) {
            const auto spec = load(c);
            out.emit(c.out, dump(dims_report(spec, max_period)));
        } else if (sample->parsed()) {
            const auto spec = load(c);
            if (spec.kind == ModelKind::percolation) {
                PercConfig cfg = *spec.percolation;
                cfg.seed = need_seed(spec, "percolation is random");
                std::ostringstream csv;
                write_levels_csv(csv, simulate(cfg, need_depth(spec)));
                out.emit(c.out, csv.str());
            } else {
                const std::size_t len = length ? length : need_depth(spec);
                const auto stream = stream_for(spec, c.word);
                Json j;
                j["realization"] = to_json(stream);
                j["length"] = len;
                j["word"] = format_word(stream.prefix(len));
                out.emit(c.out, dump(j));
            }
        } else if (render->parsed()) {
            const auto spec = load(c);
            const std::size_t depth = need_depth(spec);
            const GridSet g = occupancy(spec, c.word, depth, size);
            std::int64_t h = height;
            if (h <= 0) {
                if (g.dim() == 1) {
                    h = std::max<std::int64_t>(1, size / 16);
                } else {
                    const double aspect = 1.0; // frame is the unit square
                    h = static_cast<std::int64_t>(std::llround(static_cast<double>(size) * aspect));
                }
            }
            std::ostringstream pgm;
            write_pgm(pgm, g, size, h);
            if (c.out.empty()) {
                throw spec_error("render needs --out FILE.pgm");
            }
            out.emit(c.out, pgm.str());
        } else if (estimate->parsed()) {
            const auto spec = load(c);
            const std::size_t depth = need_depth(spec);
            GridSet g = occupancy(spec, c.word, depth, resolution);
            if (auto w = parse_window(window_text, g.dim())) {
                g = blowup(g, *w);
            }
            CenterChoice choice = CenterChoice::all();
            if (centers) {
                choice = CenterChoice::sampled(*centers, need_seed(spec, "--centers samples randomly"));
            }
            const auto ladder = doubling_ladder(g, spec.rho.value_or(rho));
            const auto est = assouad_estimate(g, ladder, choice);
            std::ostringstream csv;
            write_estimate_csv(csv, est);
            out.emit(c.out, csv.str());
            if (!json_out.empty()) {
                out.emit(json_out, dump(estimate_json(est, choice)));
            }
        } else if (percolate->parsed()) {
            PercConfig cfg;
            std::optional<std::size_t> depth = c.depth;
            std::optional<std::uint64_t> seed = c.seed;
            if (!c.spec_path.empty()) {
                const auto spec = load(c);
                if (spec.kind != ModelKind::percolation) {
                    throw spec_error("percolate needs a percolation spec");
                }
                cfg = *spec.percolation;
                depth = spec.depth;
                seed = spec.seed;
            }
            if (pn) {
                cfg.n = pn;
            }
            if (pd) {
                cfg.d = pd;
            }
            if (!pp.empty()) {
                try {
                    cfg.p = parse_rational(pp);
                } catch (const Error& e) {
                    throw spec_error(std::string("--p: ") + e.what());
                }
            }
            if (!seed) {
                throw spec_error("--seed is required: percolation is random");
            }
            if (!depth) {
                throw spec_error("--depth is required");
            }
            cfg.seed = *seed;
            try {
                validate(cfg);
            } catch (const Error& e) {
                throw spec_error(e.what());
            }
            Json j = percolation_dims(cfg);
            j["seed"] = cfg.seed;
            j["depth"] = *depth;
            std::optional<PercLevels> levels;
            if (condition) {
                auto run = conditioned_sample(cfg, *depth, max_retries);
                j["conditioned"] = Json{{"seed_used", run.seed_used}, {"retries", run.retries}};
                levels = std::move(run.levels);
            } else {
                levels = simulate(cfg, *depth);
            }
            Json counts = Json::array();
            for (std::size_t k = 0; k <= levels->depth(); ++k) {
                counts.push_back(levels->level(k).size());
            }
            j["level_counts"] = counts;
            j["survived_to_depth"] = !levels->level(*depth).empty();
            if (witness_m) {
                if (auto w = tangent_witness_search(*levels, *witness_m)) {
                    const auto blown = witness_blowup(*levels, *w);
                    const auto full = GridSet::full(blown.resolution());
                    j["witness"] = Json{{"level", w->level},     {"coord", w->coord},
                                        {"m", w->m},             {"bound", w->bound},
                                        {"grid_distance", hausdorff_distance(blown, full)}};
                } else {
                    j["witness"] = nullptr;
                }
            }
            if (!csv_out.empty()) {
                std::ostringstream csv;
                write_levels_csv(csv, *levels);
                out.emit(csv_out, csv.str());
            }
            if (!pgm_out.empty()) {
                std::ostringstream pgm;
                const GridSet g = levels->grid(*depth);
                const auto res = g.resolution().front();
                const std::int64_t w = std::min<std::int64_t>(std::max<std::int64_t>(res, 64), 1024);
                write_pgm(pgm, g, w, g.dim() == 1 ? std::max<std::int64_t>(1, w / 16) : w);
                out.emit(pgm_out, pgm.str());
            }
            out.emit(c.out, dump(j));
        } else if (tangent->parsed()) {
            const auto spec = load(c);
            Json j;
            j["kind"] = to_string(spec.kind);
            if (spec.kind == ModelKind::carpet) {
                if (target != "auto" && target != "product") {
                    throw spec_error("--target: carpets support 'product'");
                }
                const auto& rifs = *spec.carpet;
                const std::size_t depth = need_depth(spec);
                const auto as = as_assouad_carpet(rifs);
                std::vector<CarpetScheduleEntry> schedule;
                std::stringstream ss(schedule_text);
                std::string item;
                while (std::getline(ss, item, ',')) {
                    const auto colon = item.find(':');
                    if (colon == std::string::npos) {
                        throw spec_error("--schedule: expected R:n items");
                    }
                    try {
                        schedule.push_back({parse_rational(item.substr(0, colon)),
                                            static_cast<std::size_t>(std::stoull(item.substr(colon + 1)))});
                    } catch (const std::exception& e) {
                        throw spec_error(std::string("--schedule: ") + e.what());
                    }
                }
                if (schedule.empty()) {
                    throw spec_error("--schedule is required for carpet tangents");
                }
                const auto base = stream_for(spec, c.word);
                const auto good = good_word_carpet(rifs, base, as.i, as.j, schedule, depth);
                if (good.word.size() > depth) {
                    throw scale_error("schedule needs depth >= " + std::to_string(good.word.size()));
                }
                j["i"] = as.i;
                j["j"] = as.j;
                j["word"] = format_word(good.word);
                Json stages = Json::array();
                std::vector<GridSet> blown, targets;
                std::vector<double> bounds;
                for (const auto& st : good.stages) {
                    const auto path = good_square_path(good.word, rifs, st, as.j);
                    const auto q = approximate_square(good.word, rifs, st.R, path);
                    const auto local = carpet_grid_in_square(good.word, rifs, depth, q, path);
                    blown.push_back(blowup(local.cells, q.window()));
                    targets.push_back(tangent_product_target(rifs, as.i, as.j, st.run).cells);
                    const double mi = rifs.ifs(as.i).m(), nj = rifs.ifs(as.j).n();
                    const double run = static_cast<double>(st.run);
                    bounds.push_back(std::sqrt(std::pow(mi, -2 * run) + std::pow(nj, -2 * run)) +
                                     blown.back().cell_diagonal());
                    stages.push_back(Json{{"R", rational_json(st.R)}, {"run", st.run}, {"k1", st.k1}, {"k2", st.k2}});
                }
                if (blown.size() >= 2) {
                    const auto rep = tangent_convergence(blown, targets, bounds);
                    for (std::size_t l = 0; l < stages.size(); ++l) {
                        stages[l]["distance"] = rep.distances[l];
                        stages[l]["bound"] = rep.bounds[l];
                    }
                    j["dominated"] = rep.dominated;
                } else {
                    const double dist = hausdorff_distance(blown.front(), targets.front());
                    stages[0]["distance"] = dist;
                    stages[0]["bound"] = bounds.front();
                    j["dominated"] = dist <= bounds.front();
                }
                j["stages"] = stages;
            } else if (spec.kind == ModelKind::percolation) {
                if (target != "auto" && target != "full") {
                    throw spec_error("--target: percolation supports 'full'");
                }
                PercConfig cfg = *spec.percolation;
                cfg.seed = need_seed(spec, "percolation is random");
                const std::size_t depth = need_depth(spec);
                const auto run = conditioned_sample(cfg, depth, max_retries);
                j["seed_used"] = run.seed_used;
                j["retries"] = run.retries;
                const std::size_t mt = witness_m.value_or(depth);
                Json ws = Json::array();
                for (std::size_t m = 1; m <= mt; ++m) {
                    auto w = tangent_witness_search(run.levels, m);
                    if (!w || w->m < m) {
                        break;
                    }
                    const auto blown = witness_blowup(run.levels, *w);
                    const double dist = hausdorff_distance(blown, GridSet::full(blown.resolution()));
                    ws.push_back(Json{{"m", w->m}, {"level", w->level}, {"coord", w->coord},
                                      {"grid_distance", dist}, {"bound", w->bound}});
                }
                j["witnesses"] = ws;
            } else {
                if (target != "auto" && target != "shift") {
                    throw spec_error("--target: self-similar sets support 'shift'");
                }
                const auto& rifs = *spec.selfsim;
                const auto stream = stream_for(spec, c.word);
                const Word w = stream.prefix(shift_k + shift_n);
                const auto deep = attractor_boxes(rifs, w, shift_k + shift_n);
                const auto top = attractor_boxes(rifs, w, shift_k);
                const Word shifted(w.begin() + static_cast<std::ptrdiff_t>(shift_k), w.end());
                const auto ref = attractor_boxes(rifs, shifted, shift_n);
                const auto ref_geom = box_geometry(ref.boxes);
                std::size_t equal = 0;
                for (const auto& b : top.boxes) {
                    const auto blown = blowup_descendants(deep, b);
                    equal += box_geometry(blown) == ref_geom ? 1 : 0;
                }
                j["word"] = format_word(w);
                j["k"] = shift_k;
                j["n"] = shift_n;
                j["cylinders"] = top.boxes.size();
                j["cylinders_matching_shift"] = equal;
            }
            out.emit(c.out, dump(j));
        } else if (report->parsed()) {
            const auto spec = load(c);
            Json j;
            j["kind"] = to_string(spec.kind);
            j["theory"] = dims_report(spec, max_period);
            const std::size_t depth = need_depth(spec);
            GridSet g = occupancy(spec, c.word, depth, resolution);
            CenterChoice choice = CenterChoice::all();
            if (centers) {
                choice = CenterChoice::sampled(*centers, need_seed(spec, "--centers samples randomly"));
            }
            const auto est = assouad_estimate(g, doubling_ladder(g, spec.rho.value_or(rho)), choice);
            Json emp = estimate_json(est, choice);
            emp["depth"] = depth;
            emp["occupied_cells"] = g.size();
            if (spec.seed) {
                emp["seed"] = *spec.seed;
            }
            if (spec.kind != ModelKind::percolation) {
                emp["word"] = format_word(stream_for(spec, c.word).prefix(depth));
            }
            j["empirical"] = emp;
            Json contrast;
            const auto& th = j["theory"]["theoretical"];
            for (const auto& e : th) {
                contrast[e["name"].get<std::string>()] = e["value"];
            }
            contrast["empirical_exponent"] = est.exponent;
            j["contrasts"] = contrast;
            out.emit(c.out, dump(j));
        }
        out.commit();
    } catch (const Error& e) {
        std::cerr << "assouadlab: " << e.what() << '\n';
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "assouadlab: " << e.what() << '\n';
        return kExitSpec;
    }
    return kExitOk;
}
