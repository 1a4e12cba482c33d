#include "assouadlab/io.hpp"

#include "assouadlab/errors.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

namespace assouadlab {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

const Json& field_of(const Json& obj, const char* key, const std::string& where) {
    if (!obj.is_object()) {
        throw spec_error(where + ": expected an object");
    }
    auto it = obj.find(key);
    if (it == obj.end()) {
        throw spec_error(where + ": missing field '" + key + "'");
    }
    return *it;
}

std::string join(const std::string& where, const std::string& key) {
    return where.empty() ? key : where + "." + key;
}

std::int64_t int_from(const Json& v, const std::string& field) {
    if (!v.is_number_integer()) {
        throw spec_error(field + ": expected an integer");
    }
    return v.get<std::int64_t>();
}

std::uint64_t uint_from(const Json& v, const std::string& field) {
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
        throw spec_error(field + ": expected a non-negative integer");
    }
    return v.get<std::uint64_t>();
}

const Json& array_from(const Json& v, const std::string& field) {
    if (!v.is_array()) {
        throw spec_error(field + ": expected an array");
    }
    return v;
}

// Library validation failures inside a spec become spec errors naming the field.
template <class F>
auto guarded(const std::string& field, F&& make) {
    try {
        return make();
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::spec) {
            throw;
        }
        throw spec_error(field + ": " + e.what());
    }
}

} // namespace

Json rational_json(const Rational& value) { return to_string(value); }

Rational rational_from(const Json& value, const std::string& field) {
    if (value.is_number_integer()) {
        return Rational(value.get<std::int64_t>());
    }
    if (!value.is_string()) {
        throw spec_error(field + ": expected a rational string like \"p/q\"");
    }
    return guarded(field, [&] { return parse_rational(value.get<std::string>()); });
}

Json to_json(const ProbabilityVector& probs) {
    Json out = Json::array();
    for (const auto& p : probs.values()) {
        out.push_back(rational_json(p));
    }
    return out;
}

ProbabilityVector probs_from(const Json& value, const std::string& field) {
    array_from(value, field);
    std::vector<Rational> ps;
    for (std::size_t k = 0; k < value.size(); ++k) {
        ps.push_back(rational_from(value[k], field + "[" + std::to_string(k) + "]"));
    }
    return guarded(field, [&] { return ProbabilityVector(std::move(ps)); });
}

Json to_json(const SimilarityRIFS& rifs) {
    Json out;
    out["kind"] = "selfsim";
    out["ambient_dim"] = rifs.dim();
    Json ifss = Json::array();
    for (const auto& ifs : rifs.ifss()) {
        Json maps = Json::array();
        for (const auto& m : ifs.maps()) {
            Json t = Json::array();
            for (const auto& v : m.translation) {
                t.push_back(rational_json(v));
            }
            maps.push_back(Json{{"c", rational_json(m.ratio)}, {"t", t}});
        }
        ifss.push_back(maps);
    }
    out["ifss"] = ifss;
    out["probs"] = to_json(rifs.probs());
    return out;
}

SimilarityRIFS selfsim_from(const Json& spec) {
    const auto& ifss = array_from(field_of(spec, "ifss", "spec"), "ifss");
    std::optional<std::size_t> dim;
    if (spec.contains("ambient_dim")) {
        dim = static_cast<std::size_t>(uint_from(spec["ambient_dim"], "ambient_dim"));
    }
    std::vector<SimilarityIFS> out;
    for (std::size_t i = 0; i < ifss.size(); ++i) {
        const std::string where = "ifss[" + std::to_string(i) + "]";
        const auto& maps = array_from(ifss[i], where);
        std::vector<SimilarityMap> ms;
        for (std::size_t j = 0; j < maps.size(); ++j) {
            const std::string mw = where + "[" + std::to_string(j) + "]";
            Rational c = rational_from(field_of(maps[j], "c", mw), mw + ".c");
            const auto& t = array_from(field_of(maps[j], "t", mw), mw + ".t");
            std::vector<Rational> tv;
            for (std::size_t a = 0; a < t.size(); ++a) {
                tv.push_back(rational_from(t[a], mw + ".t[" + std::to_string(a) + "]"));
            }
            if (dim && tv.size() != *dim) {
                throw spec_error(mw + ".t: expected " + std::to_string(*dim) + " coordinates");
            }
            ms.push_back(guarded(mw, [&] { return SimilarityMap(c, std::move(tv)); }));
        }
        out.push_back(guarded(where, [&] { return SimilarityIFS(std::move(ms)); }));
    }
    auto probs = probs_from(field_of(spec, "probs", "spec"), "probs");
    return guarded("spec", [&] { return SimilarityRIFS(std::move(out), std::move(probs)); });
}

Json to_json(const CarpetRIFS& rifs) {
    Json out;
    out["kind"] = "carpet";
    Json ifss = Json::array();
    for (const auto& ifs : rifs.ifss()) {
        Json digits = Json::array();
        for (const auto& dg : ifs.digits()) {
            digits.push_back(Json::array({dg.a, dg.b}));
        }
        ifss.push_back(Json{{"m", ifs.m()}, {"n", ifs.n()}, {"digits", digits}});
    }
    out["ifss"] = ifss;
    out["probs"] = to_json(rifs.probs());
    return out;
}

CarpetRIFS carpet_from(const Json& spec) {
    const auto& ifss = array_from(field_of(spec, "ifss", "spec"), "ifss");
    std::vector<CarpetIFS> out;
    for (std::size_t i = 0; i < ifss.size(); ++i) {
        const std::string where = "ifss[" + std::to_string(i) + "]";
        const auto m = int_from(field_of(ifss[i], "m", where), where + ".m");
        const auto n = int_from(field_of(ifss[i], "n", where), where + ".n");
        const auto& ds = array_from(field_of(ifss[i], "digits", where), where + ".digits");
        std::vector<Digit> digits;
        for (std::size_t k = 0; k < ds.size(); ++k) {
            const std::string dw = where + ".digits[" + std::to_string(k) + "]";
            if (!ds[k].is_array() || ds[k].size() != 2) {
                throw spec_error(dw + ": expected [a, b]");
            }
            digits.push_back({static_cast<int>(int_from(ds[k][0], dw + "[0]")),
                              static_cast<int>(int_from(ds[k][1], dw + "[1]"))});
        }
        out.push_back(guarded(where, [&] {
            return CarpetIFS(static_cast<int>(m), static_cast<int>(n), std::move(digits));
        }));
    }
    auto probs = probs_from(field_of(spec, "probs", "spec"), "probs");
    return guarded("spec", [&] { return CarpetRIFS(std::move(out), std::move(probs)); });
}

Json to_json(const PercConfig& config) {
    Json out;
    out["kind"] = "percolation";
    out["n"] = config.n;
    out["d"] = config.d;
    out["p"] = rational_json(config.p);
    return out;
}

PercConfig percolation_from(const Json& spec) {
    PercConfig cfg;
    cfg.n = static_cast<int>(int_from(field_of(spec, "n", "spec"), "n"));
    cfg.d = static_cast<int>(int_from(field_of(spec, "d", "spec"), "d"));
    cfg.p = rational_from(field_of(spec, "p", "spec"), "p");
    guarded("spec", [&] {
        validate(cfg);
        return 0;
    });
    return cfg;
}

Json to_json(const RealizationStream& stream) {
    Json out;
    switch (stream.mode()) {
    case RealizationStream::Mode::iid:
        out["mode"] = "iid";
        out["seed"] = stream.seed();
        out["probs"] = to_json(*stream.probs());
        break;
    case RealizationStream::Mode::periodic:
        out["mode"] = "periodic";
        out["pattern"] = stream.pattern();
        break;
    case RealizationStream::Mode::constant:
        out["mode"] = "constant";
        out["pattern"] = stream.pattern();
        break;
    case RealizationStream::Mode::spliced: {
        out["mode"] = "spliced";
        out["base"] = to_json(*stream.base());
        Json sp = Json::array();
        for (const auto& s : stream.splices()) {
            sp.push_back(Json{{"start", s.start}, {"length", s.length}, {"letter", s.letter}});
        }
        out["splices"] = sp;
        break;
    }
    }
    return out;
}

namespace {

Word letters_from(const Json& v, const std::string& field) {
    if (v.is_string()) {
        return guarded(field, [&] { return parse_word(v.get<std::string>()); });
    }
    array_from(v, field);
    Word w;
    for (std::size_t k = 0; k < v.size(); ++k) {
        const auto x = uint_from(v[k], field + "[" + std::to_string(k) + "]");
        if (x < 1 || x > 0xFFFFFFFFULL) {
            throw spec_error(field + "[" + std::to_string(k) + "]: letters are 1-based");
        }
        w.push_back(static_cast<Letter>(x));
    }
    return w;
}

} // namespace

RealizationStream realization_from(const Json& value, const std::string& field, const ProbabilityVector* default_probs) {
    const std::string mode = [&] {
        const auto& m = field_of(value, "mode", field);
        if (!m.is_string()) {
            throw spec_error(join(field, "mode") + ": expected a string");
        }
        return m.get<std::string>();
    }();
    if (mode == "iid") {
        const auto seed = uint_from(field_of(value, "seed", field), join(field, "seed"));
        if (value.contains("probs")) {
            return RealizationStream::iid(probs_from(value["probs"], join(field, "probs")), seed);
        }
        if (!default_probs) {
            throw spec_error(field + ": iid realization needs 'probs'");
        }
        return RealizationStream::iid(*default_probs, seed);
    }
    if (mode == "periodic") {
        Word w = letters_from(field_of(value, "pattern", field), join(field, "pattern"));
        return guarded(field, [&] { return RealizationStream::periodic(std::move(w)); });
    }
    if (mode == "constant") {
        Word w;
        if (value.contains("letter")) {
            w = {static_cast<Letter>(uint_from(value["letter"], join(field, "letter")))};
        } else {
            w = letters_from(field_of(value, "pattern", field), join(field, "pattern"));
        }
        if (w.size() != 1) {
            throw spec_error(join(field, "pattern") + ": constant mode takes exactly one letter");
        }
        return guarded(field, [&] { return RealizationStream::constant(w.front()); });
    }
    if (mode == "spliced") {
        RealizationStream base = realization_from(field_of(value, "base", field), join(field, "base"), default_probs);
        std::vector<Splice> splices;
        if (value.contains("splices")) {
            const auto& sp = array_from(value["splices"], join(field, "splices"));
            for (std::size_t k = 0; k < sp.size(); ++k) {
                const std::string w = join(field, "splices[" + std::to_string(k) + "]");
                splices.push_back({static_cast<std::size_t>(uint_from(field_of(sp[k], "start", w), w + ".start")),
                                   static_cast<std::size_t>(uint_from(field_of(sp[k], "length", w), w + ".length")),
                                   static_cast<Letter>(uint_from(field_of(sp[k], "letter", w), w + ".letter"))});
            }
        }
        return guarded(field, [&] { return RealizationStream::spliced(std::move(base), std::move(splices)); });
    }
    throw spec_error(join(field, "mode") + ": unknown mode '" + mode + "' (iid, periodic, constant, spliced)");
}

std::string to_string(ModelKind kind) {
    switch (kind) {
    case ModelKind::selfsim:
        return "selfsim";
    case ModelKind::carpet:
        return "carpet";
    case ModelKind::percolation:
        return "percolation";
    }
    return "selfsim";
}

ExperimentSpec parse_spec(const std::string& text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw spec_error(std::string("malformed JSON: ") + e.what());
    }
    if (!j.is_object()) {
        throw spec_error("spec: expected a JSON object");
    }
    ExperimentSpec out;
    const auto& kind = field_of(j, "kind", "spec");
    const std::string k = kind.is_string() ? kind.get<std::string>() : "";
    std::size_t alphabet = 0;
    const ProbabilityVector* probs = nullptr;
    if (k == "selfsim") {
        out.kind = ModelKind::selfsim;
        out.selfsim = selfsim_from(j);
        alphabet = out.selfsim->alphabet_size();
        probs = &out.selfsim->probs();
    } else if (k == "carpet") {
        out.kind = ModelKind::carpet;
        out.carpet = carpet_from(j);
        alphabet = out.carpet->alphabet_size();
        probs = &out.carpet->probs();
    } else if (k == "percolation") {
        out.kind = ModelKind::percolation;
        out.percolation = percolation_from(j);
    } else {
        throw spec_error("kind: expected one of selfsim, carpet, percolation");
    }
    if (j.contains("realization")) {
        if (out.kind == ModelKind::percolation) {
            throw spec_error("realization: percolation specs take a seed, not a word");
        }
        out.realization = realization_from(j["realization"], "realization", probs);
        if (out.realization->max_letter() > alphabet) {
            throw spec_error("realization: letter " + std::to_string(out.realization->max_letter()) +
                             " outside the alphabet 1.." + std::to_string(alphabet));
        }
    }
    if (j.contains("depth")) {
        out.depth = static_cast<std::size_t>(uint_from(j["depth"], "depth"));
    }
    if (j.contains("seed")) {
        out.seed = uint_from(j["seed"], "seed");
        if (out.percolation) {
            out.percolation->seed = *out.seed;
        }
    }
    if (j.contains("rho")) {
        if (!j["rho"].is_number() || !(j["rho"].get<double>() > 0) || j["rho"].get<double>() > 1) {
            throw spec_error("rho: expected a number in (0, 1]");
        }
        out.rho = j["rho"].get<double>();
    }
    return out;
}

ExperimentSpec load_spec(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw spec_error("cannot read spec file '" + path + "'");
    }
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return parse_spec(ss.str());
    } catch (const Error& e) {
        throw Error(e.kind(), path + ": " + e.what());
    }
}

Json to_json(const ExperimentSpec& spec) {
    Json out;
    switch (spec.kind) {
    case ModelKind::selfsim:
        out = to_json(*spec.selfsim);
        break;
    case ModelKind::carpet:
        out = to_json(*spec.carpet);
        break;
    case ModelKind::percolation:
        out = to_json(*spec.percolation);
        break;
    }
    if (spec.realization) {
        out["realization"] = to_json(*spec.realization);
    }
    if (spec.depth) {
        out["depth"] = *spec.depth;
    }
    if (spec.seed) {
        out["seed"] = *spec.seed;
    }
    if (spec.rho) {
        out["rho"] = *spec.rho;
    }
    return out;
}

void write_boxes_csv(std::ostream& out, const BoxSet& boxes) {
    out << "depth,address";
    for (std::size_t a = 0; a < boxes.dim; ++a) {
        out << ",lo_" << a;
    }
    out << ",side\n";
    for (const auto& b : boxes.boxes) {
        out << boxes.depth << ',';
        for (std::size_t k = 0; k < b.address.size(); ++k) {
            out << (k ? ":" : "") << b.address[k] + 1;
        }
        for (const auto& v : b.lo) {
            out << ',' << to_string(v);
        }
        out << ',' << to_string(b.side) << '\n';
    }
}

void write_grid_csv(std::ostream& out, const GridSet& grid) {
    for (std::size_t a = 0; a < grid.dim(); ++a) {
        out << (a ? "," : "") << "cell_" << a;
    }
    out << '\n';
    for (std::size_t k = 0; k < grid.size(); ++k) {
        auto c = grid.cell(k);
        for (std::size_t a = 0; a < c.size(); ++a) {
            out << (a ? "," : "") << c[a];
        }
        out << '\n';
    }
}

void write_levels_csv(std::ostream& out, const PercLevels& levels) {
    out << "level";
    for (int a = 0; a < levels.d(); ++a) {
        out << ",x" << a;
    }
    out << '\n';
    for (std::size_t k = 0; k <= levels.depth(); ++k) {
        const GridSet g = levels.grid(k);
        for (std::size_t i = 0; i < g.size(); ++i) {
            out << k;
            for (auto v : g.cell(i)) {
                out << ',' << v;
            }
            out << '\n';
        }
    }
}

void write_estimate_csv(std::ostream& out, const AssouadEstimate& est) {
    out << "R,r,sup_count\n";
    for (std::size_t k = 0; k < est.counts.size(); ++k) {
        out << fmt(est.ladder.pairs[k].R) << ',' << fmt(est.ladder.pairs[k].r) << ',' << est.counts[k] << '\n';
    }
    out << "# exponent=" << fmt(est.exponent) << " intercept=" << fmt(est.intercept)
        << " residual=" << fmt(est.residual) << '\n';
}

void write_pgm(std::ostream& out, const GridSet& grid, std::int64_t width, std::int64_t height) {
    if (grid.dim() < 1 || grid.dim() > 2) {
        throw invalid_input("PGM rendering supports 1- and 2-dimensional sets");
    }
    if (width < 1 || height < 1 || width * height > (std::int64_t{1} << 28)) {
        throw invalid_input("image size out of range");
    }
    std::vector<unsigned char> px(static_cast<std::size_t>(width * height), 255);
    using i128 = __int128;
    auto range = [](std::int64_t c, std::int64_t res, std::int64_t pixels) {
        const i128 lo = static_cast<i128>(c) * pixels / res;
        const i128 hi_num = static_cast<i128>(c + 1) * pixels;
        const i128 hi = (hi_num + res - 1) / res - 1;
        return std::pair<std::int64_t, std::int64_t>(static_cast<std::int64_t>(lo),
                                                     std::max(static_cast<std::int64_t>(lo), static_cast<std::int64_t>(hi)));
    };
    for (std::size_t k = 0; k < grid.size(); ++k) {
        auto c = grid.cell(k);
        auto [x0, x1] = range(c[0], grid.resolution()[0], width);
        std::int64_t y0 = 0, y1 = height - 1;
        if (grid.dim() == 2) {
            std::tie(y0, y1) = range(c[1], grid.resolution()[1], height);
        }
        for (std::int64_t y = y0; y <= y1; ++y) {
            const std::int64_t row = height - 1 - y;
            for (std::int64_t x = x0; x <= x1; ++x) {
                px[static_cast<std::size_t>(row * width + x)] = 0;
            }
        }
    }
    out << "P5\n" << width << ' ' << height << "\n255\n";
    out.write(reinterpret_cast<const char*>(px.data()), static_cast<std::streamsize>(px.size()));
}

void write_file_atomic(const std::string& path, const std::string& contents) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".partial";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw invalid_input("cannot write '" + path + "'");
        }
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        out.flush();
        if (!out) {
            out.close();
            std::error_code ec;
            fs::remove(tmp, ec);
            throw invalid_input("failed writing '" + path + "'");
        }
    }
    fs::rename(tmp, target);
}

} // namespace assouadlab
