#include "assouadlab/selfsim.hpp"

#include "assouadlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace assouadlab {

SimilarityMap::SimilarityMap(Rational c, std::vector<Rational> t) : ratio(std::move(c)), translation(std::move(t)) {
    if (ratio <= 0 || ratio >= 1) {
        throw invalid_input("similarity ratio " + to_string(ratio) + " outside (0,1)");
    }
    if (translation.empty()) {
        throw invalid_input("similarity map needs an ambient dimension >= 1");
    }
    for (const auto& ta : translation) {
        if (ta < 0 || ta + ratio > 1) {
            throw invalid_input("map x -> " + to_string(ratio) + "x + " + to_string(ta) +
                                " does not send [0,1] into itself");
        }
    }
}

SimilarityIFS::SimilarityIFS(std::vector<SimilarityMap> maps) : maps_(std::move(maps)) {
    if (maps_.empty()) {
        throw invalid_input("an IFS needs at least one map");
    }
    for (const auto& m : maps_) {
        if (m.dim() != maps_.front().dim()) {
            throw invalid_input("maps of one IFS disagree on ambient dimension");
        }
    }
}

std::vector<Rational> SimilarityIFS::ratios() const {
    std::vector<Rational> out;
    out.reserve(maps_.size());
    for (const auto& m : maps_) {
        out.push_back(m.ratio);
    }
    return out;
}

SimilarityRIFS::SimilarityRIFS(std::vector<SimilarityIFS> ifss, ProbabilityVector probs)
    : ifss_(std::move(ifss)), probs_(std::move(probs)) {
    if (ifss_.empty()) {
        throw invalid_input("a RIFS needs at least one IFS");
    }
    if (ifss_.size() != probs_.size()) {
        throw invalid_input("probability vector length " + std::to_string(probs_.size()) + " != number of IFSs " +
                            std::to_string(ifss_.size()));
    }
    for (const auto& ifs : ifss_) {
        if (ifs.dim() != ifss_.front().dim()) {
            throw invalid_input("IFSs disagree on ambient dimension");
        }
    }
}

namespace {

std::vector<long double> log_ratios(std::span<const Rational> ratios) {
    std::vector<long double> out;
    out.reserve(ratios.size());
    for (const auto& c : ratios) {
        if (c <= 0 || c >= 1) {
            throw invalid_input("ratio " + to_string(c) + " outside (0,1)");
        }
        out.push_back(log_rational(c));
    }
    return out;
}

long double moran_sum(const std::vector<long double>& logs, long double s) {
    long double sum = 0;
    for (auto l : logs) {
        sum += std::exp(s * l);
    }
    return sum;
}

// Root of a strictly decreasing f on [lo, hi] with f(lo) >= 0 >= f(hi).
double bisect(const std::function<long double(long double)>& f, long double lo, long double hi) {
    for (int it = 0; it < 200 && hi - lo > 1e-15L; ++it) {
        long double mid = 0.5L * (lo + hi);
        if (f(mid) > 0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return static_cast<double>(0.5L * (lo + hi));
}

// s where count * c_max^s = 1; sum c_i^s <= 1 there.
long double moran_upper(const std::vector<long double>& logs) {
    long double max_log = *std::max_element(logs.begin(), logs.end());
    return std::log(static_cast<long double>(logs.size())) / -max_log;
}

} // namespace

double similarity_dimension(std::span<const Rational> ratios) {
    if (ratios.empty()) {
        throw invalid_input("similarity dimension needs at least one ratio");
    }
    auto logs = log_ratios(ratios);
    if (logs.size() == 1) {
        return 0.0;
    }
    return bisect([&](long double s) { return moran_sum(logs, s) - 1.0L; }, 0.0L, moran_upper(logs));
}

double similarity_dimension(const SimilarityIFS& ifs) {
    auto r = ifs.ratios();
    return similarity_dimension(r);
}

double almost_sure_hausdorff(const SimilarityRIFS& rifs) {
    std::vector<std::vector<long double>> logs;
    std::vector<long double> weights;
    long double hi = 0;
    for (std::size_t i = 0; i < rifs.alphabet_size(); ++i) {
        auto r = rifs.ifss()[i].ratios();
        logs.push_back(log_ratios(r));
        weights.push_back(rifs.probs().values()[i].convert_to<long double>());
        hi = std::max(hi, moran_upper(logs.back()));
    }
    auto f = [&](long double s) {
        long double acc = 0;
        for (std::size_t i = 0; i < logs.size(); ++i) {
            acc += weights[i] * std::log(moran_sum(logs[i], s));
        }
        return acc;
    };
    if (f(0) <= 0) {
        return 0.0; // every IFS is a single map: no sign change
    }
    return bisect(f, 0.0L, hi);
}

std::string to_string(UoscVerdict v) {
    switch (v) {
    case UoscVerdict::verified:
        return "verified";
    case UoscVerdict::refuted_for_unit_cube:
        return "refuted-for-unit-cube";
    case UoscVerdict::inconclusive:
        return "inconclusive";
    }
    return "inconclusive";
}

UoscVerdict check_uosc(const SimilarityRIFS& rifs) {
    const std::size_t d = rifs.dim();
    for (const auto& ifs : rifs.ifss()) {
        const auto& maps = ifs.maps();
        for (const auto& m : maps) {
            for (const auto& t : m.translation) {
                if (t < 0 || t + m.ratio > 1) {
                    return UoscVerdict::inconclusive;
                }
            }
        }
        for (std::size_t a = 0; a < maps.size(); ++a) {
            for (std::size_t b = a + 1; b < maps.size(); ++b) {
                bool disjoint = false;
                for (std::size_t ax = 0; ax < d && !disjoint; ++ax) {
                    const Rational& lo_a = maps[a].translation[ax];
                    const Rational& lo_b = maps[b].translation[ax];
                    Rational hi_a = lo_a + maps[a].ratio;
                    Rational hi_b = lo_b + maps[b].ratio;
                    disjoint = std::max(lo_a, lo_b) >= std::min(hi_a, hi_b);
                }
                if (!disjoint) {
                    return UoscVerdict::refuted_for_unit_cube;
                }
            }
        }
    }
    return UoscVerdict::verified;
}

namespace {

AssouadBound max_deterministic(const SimilarityRIFS& rifs) {
    AssouadBound out;
    for (const auto& ifs : rifs.ifss()) {
        out.value = std::max(out.value, similarity_dimension(ifs));
    }
    out.uosc = check_uosc(rifs);
    out.valid = out.uosc == UoscVerdict::verified;
    return out;
}

} // namespace

AssouadBound sure_assouad_upper(const SimilarityRIFS& rifs) {
    AssouadBound out = max_deterministic(rifs);
    out.label = out.valid ? "upper bound for every realization (UOSC verified)"
                          : "not a valid sure bound: UOSC unverified";
    return out;
}

AssouadBound as_assouad_selfsimilar(const SimilarityRIFS& rifs) {
    AssouadBound out = max_deterministic(rifs);
    out.label = out.valid ? "almost-sure Assouad dimension (UOSC verified)"
                          : "formula only: UOSC unverified, almost-sure value not established";
    return out;
}

// ---------------------------------------------------------------------------------------------
// Factorization for the multiplicative dependence test.

namespace {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

u64 mulmod(u64 a, u64 b, u64 m) { return static_cast<u64>(static_cast<u128>(a) * b % m); }

u64 powmod(u64 a, u64 e, u64 m) {
    u64 r = 1 % m;
    a %= m;
    while (e > 0) {
        if (e & 1U) {
            r = mulmod(r, a, m);
        }
        a = mulmod(a, a, m);
        e >>= 1U;
    }
    return r;
}

// Deterministic Miller-Rabin for 64-bit integers.
bool is_prime(u64 n) {
    if (n < 2) {
        return false;
    }
    for (u64 p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        if (n % p == 0) {
            return n == p;
        }
    }
    u64 d = n - 1;
    int s = 0;
    while ((d & 1U) == 0) {
        d >>= 1U;
        ++s;
    }
    for (u64 a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        u64 x = powmod(a, d, n);
        if (x == 1 || x == n - 1) {
            continue;
        }
        bool composite = true;
        for (int r = 1; r < s; ++r) {
            x = mulmod(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) {
            return false;
        }
    }
    return true;
}

u64 pollard_rho(u64 n) {
    if (n % 2 == 0) {
        return 2;
    }
    for (u64 c = 1;; ++c) {
        u64 x = 2, y = 2, g = 1;
        auto f = [&](u64 v) { return (mulmod(v, v, n) + c) % n; };
        while (g == 1) {
            x = f(x);
            y = f(f(y));
            g = std::gcd(x > y ? x - y : y - x, n);
        }
        if (g != n) {
            return g;
        }
    }
}

void factor_u64(u64 n, std::map<BigInt, long>& out, long sign) {
    if (n == 1) {
        return;
    }
    if (is_prime(n)) {
        out[BigInt(n)] += sign;
        return;
    }
    u64 f = pollard_rho(n);
    factor_u64(f, out, sign);
    factor_u64(n / f, out, sign);
}

void factor_big(BigInt n, std::map<BigInt, long>& out, long sign) {
    for (u64 p = 2; p < 1000 && n > 1; ++p) {
        while (n % p == 0) {
            out[BigInt(p)] += sign;
            n /= p;
        }
    }
    if (n == 1) {
        return;
    }
    if (boost::multiprecision::msb(n) >= 64) {
        throw invalid_input("cannot factor " + n.str() + ": exceeds 64 bits after trial division");
    }
    factor_u64(n.convert_to<u64>(), out, sign);
}

} // namespace

std::map<BigInt, long> prime_exponents(const Rational& value) {
    if (value <= 0) {
        throw invalid_input("prime exponents need a positive rational");
    }
    std::map<BigInt, long> out;
    factor_big(boost::multiprecision::numerator(value), out, +1);
    factor_big(boost::multiprecision::denominator(value), out, -1);
    std::erase_if(out, [](const auto& kv) { return kv.second == 0; });
    return out;
}

bool multiplicative_dependence(const Rational& c1, const Rational& c2) {
    for (const Rational* c : {&c1, &c2}) {
        if (*c <= 0 || *c >= 1) {
            throw invalid_input("multiplicative dependence needs ratios in (0,1), got " + to_string(*c));
        }
    }
    auto e1 = prime_exponents(c1);
    auto e2 = prime_exponents(c2);
    if (e1.size() != e2.size()) {
        return false;
    }
    // Parallel iff same support and e1[p] * e2[q] == e2[p] * e1[q] against a fixed q.
    const long ref1 = e1.begin()->second;
    const long ref2 = e2.begin()->second;
    for (auto it1 = e1.begin(), it2 = e2.begin(); it1 != e1.end(); ++it1, ++it2) {
        if (it1->first != it2->first) {
            return false;
        }
        if (static_cast<__int128>(it1->second) * ref2 != static_cast<__int128>(it2->second) * ref1) {
            return false;
        }
    }
    return true;
}

SimilarityIFS compose_period(const SimilarityRIFS& rifs, std::span<const Letter> pattern) {
    if (pattern.empty()) {
        throw invalid_input("period pattern must be non-empty");
    }
    validate_word(pattern, rifs.alphabet_size());
    const std::size_t d = rifs.dim();
    std::vector<SimilarityMap> current = rifs.ifs(pattern[0]).maps();
    for (std::size_t k = 1; k < pattern.size(); ++k) {
        const auto& inner = rifs.ifs(pattern[k]).maps();
        std::vector<SimilarityMap> next;
        next.reserve(current.size() * inner.size());
        for (const auto& outer : current) {
            for (const auto& in : inner) {
                // outer(in(x)) = c_o c_i x + c_o t_i + t_o
                std::vector<Rational> t(d);
                for (std::size_t a = 0; a < d; ++a) {
                    t[a] = outer.ratio * in.translation[a] + outer.translation[a];
                }
                next.emplace_back(outer.ratio * in.ratio, std::move(t));
            }
        }
        current = std::move(next);
    }
    return SimilarityIFS(std::move(current));
}

PeriodicProbe periodic_sup_probe(const SimilarityRIFS& rifs, std::size_t max_period, std::size_t pattern_cap,
                                 std::size_t witness_cap) {
    if (max_period < 1) {
        throw invalid_input("max_period must be >= 1");
    }
    const std::size_t n = rifs.alphabet_size();
    std::size_t total = 0;
    {
        std::size_t count = 1;
        for (std::size_t p = 1; p <= max_period; ++p) {
            if (count > pattern_cap / n + 1) {
                throw invalid_input("periodic probe would examine more than " + std::to_string(pattern_cap) +
                                    " patterns");
            }
            count *= n;
            total += count;
        }
        if (total > pattern_cap) {
            throw invalid_input("periodic probe would examine " + std::to_string(total) + " patterns (cap " +
                                std::to_string(pattern_cap) + ")");
        }
    }

    PeriodicProbe out;
    out.value = -1;
    for (const auto& ifs : rifs.ifss()) {
        auto r = ifs.ratios();
        for (std::size_t a = 0; a < r.size(); ++a) {
            for (std::size_t b = a + 1; b < r.size(); ++b) {
                if (r[a] != r[b] && !multiplicative_dependence(r[a], r[b])) {
                    out.within_ifs_all_dependent = false;
                }
            }
        }
    }

    for (std::size_t p = 1; p <= max_period; ++p) {
        Word pattern(p, 1);
        while (true) {
            SimilarityIFS composed = compose_period(rifs, pattern);
            std::vector<Rational> ratios = composed.ratios();
            double s = similarity_dimension(ratios);
            ++out.patterns_examined;
            if (s > out.value) {
                out.value = s;
                out.best_pattern = pattern;
            }
            std::sort(ratios.begin(), ratios.end(), std::greater<>());
            ratios.erase(std::unique(ratios.begin(), ratios.end()), ratios.end());
            for (std::size_t a = 0; a < ratios.size() && out.witnesses.size() < witness_cap; ++a) {
                for (std::size_t b = a + 1; b < ratios.size() && out.witnesses.size() < witness_cap; ++b) {
                    if (!multiplicative_dependence(ratios[a], ratios[b])) {
                        out.witnesses.push_back({pattern, ratios[a], ratios[b]});
                    }
                }
            }
            std::size_t pos = p;
            while (pos > 0 && pattern[pos - 1] == n) {
                pattern[pos - 1] = 1;
                --pos;
            }
            if (pos == 0) {
                break;
            }
            ++pattern[pos - 1];
        }
    }
    return out;
}

BoxSet attractor_boxes(const SimilarityRIFS& rifs, std::span<const Letter> word, std::size_t depth,
                       std::size_t max_boxes) {
    if (depth > word.size()) {
        throw invalid_input("depth " + std::to_string(depth) + " exceeds word length " + std::to_string(word.size()));
    }
    validate_word(word.subspan(0, depth), rifs.alphabet_size());
    {
        long double count = 1;
        for (std::size_t k = 0; k < depth; ++k) {
            count *= static_cast<long double>(rifs.ifs(word[k]).size());
        }
        if (count > static_cast<long double>(max_boxes)) {
            throw invalid_input("depth " + std::to_string(depth) + " would produce " +
                                std::to_string(static_cast<double>(count)) + " boxes");
        }
    }
    const std::size_t d = rifs.dim();
    BoxSet out;
    out.depth = depth;
    out.dim = d;
    out.boxes.push_back(Box{std::vector<Rational>(d, Rational(0)), Rational(1), {}});
    for (std::size_t k = 0; k < depth; ++k) {
        const auto& maps = rifs.ifs(word[k]).maps();
        std::vector<Box> next;
        next.reserve(out.boxes.size() * maps.size());
        for (const auto& box : out.boxes) {
            for (std::uint32_t j = 0; j < maps.size(); ++j) {
                Box child;
                child.lo.resize(d);
                for (std::size_t a = 0; a < d; ++a) {
                    child.lo[a] = box.lo[a] + box.side * maps[j].translation[a];
                }
                child.side = box.side * maps[j].ratio;
                child.address = box.address;
                child.address.push_back(j);
                next.push_back(std::move(child));
            }
        }
        out.boxes = std::move(next);
    }
    return out;
}

namespace {

Box renormalize(const Box& box, const Box& frame) {
    Box out;
    out.lo.resize(box.lo.size());
    for (std::size_t a = 0; a < box.lo.size(); ++a) {
        out.lo[a] = (box.lo[a] - frame.lo[a]) / frame.side;
    }
    out.side = box.side / frame.side;
    if (box.address.size() >= frame.address.size()) {
        out.address.assign(box.address.begin() + static_cast<std::ptrdiff_t>(frame.address.size()), box.address.end());
    }
    return out;
}

} // namespace

std::vector<Box> blowup_descendants(const BoxSet& set, const Box& ancestor) {
    std::vector<Box> out;
    for (const auto& box : set.boxes) {
        if (box.address.size() >= ancestor.address.size() &&
            std::equal(ancestor.address.begin(), ancestor.address.end(), box.address.begin())) {
            out.push_back(renormalize(box, ancestor));
        }
    }
    return out;
}

std::vector<Box> blowup_window(const BoxSet& set, const Box& window) {
    std::vector<Box> out;
    for (const auto& box : set.boxes) {
        bool inside = true;
        for (std::size_t a = 0; a < box.lo.size() && inside; ++a) {
            inside = box.lo[a] >= window.lo[a] && box.lo[a] + box.side <= window.lo[a] + window.side;
        }
        if (inside) {
            Box frame = window;
            frame.address.clear();
            Box r = renormalize(box, frame);
            r.address.clear();
            out.push_back(std::move(r));
        }
    }
    return out;
}

std::vector<std::pair<std::vector<Rational>, Rational>> box_geometry(std::span<const Box> boxes) {
    std::vector<std::pair<std::vector<Rational>, Rational>> out;
    out.reserve(boxes.size());
    for (const auto& b : boxes) {
        out.emplace_back(b.lo, b.side);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

GridSet rasterize(const BoxSet& set, std::int64_t resolution) {
    if (resolution < 1) {
        throw invalid_input("raster resolution must be positive");
    }
    const std::size_t d = set.dim;
    std::vector<std::int64_t> flat;
    std::vector<std::int64_t> lo(d), hi(d), c(d);
    for (const auto& box : set.boxes) {
        for (std::size_t a = 0; a < d; ++a) {
            Rational l = box.lo[a] * resolution;
            Rational h = (box.lo[a] + box.side) * resolution;
            // cells whose open interior meets the open box: floor(l) .. ceil(h)-1
            BigInt fl = boost::multiprecision::numerator(l) / boost::multiprecision::denominator(l);
            BigInt ch = boost::multiprecision::numerator(h) / boost::multiprecision::denominator(h);
            if (Rational(ch) < h) {
                ch += 1;
            }
            lo[a] = fl.convert_to<std::int64_t>();
            hi[a] = std::max(lo[a] + 1, ch.convert_to<std::int64_t>());
        }
        c = lo;
        for (bool done = false; !done;) {
            flat.insert(flat.end(), c.begin(), c.end());
            done = true;
            for (std::size_t a = d; a-- > 0;) {
                if (++c[a] < hi[a]) {
                    done = false;
                    break;
                }
                c[a] = lo[a];
            }
        }
    }
    return GridSet(std::vector<std::int64_t>(d, resolution), std::move(flat));
}

} // namespace assouadlab
