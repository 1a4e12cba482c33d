#pragma once

// Model systems shared by the unit and acceptance tests.

#include "assouadlab/carpet.hpp"
#include "assouadlab/selfsim.hpp"

namespace fixtures {

using namespace assouadlab;

inline Rational q(long p, long r) { return Rational(p, r); }

inline SimilarityMap map1(Rational c, Rational t) { return SimilarityMap(std::move(c), {std::move(t)}); }

// Two overlapping IFSs on [0,1]: ratios {1/2,1/4,1/16} and {1/3,1/9,1/81}, all fixing 0.
inline SimilarityRIFS overlap_pair() {
    SimilarityIFS a({map1(q(1, 2), 0), map1(q(1, 4), 0), map1(q(1, 16), 0)});
    SimilarityIFS b({map1(q(1, 3), 0), map1(q(1, 9), 0), map1(q(1, 81), 0)});
    return SimilarityRIFS({a, b}, ProbabilityVector({q(1, 2), q(1, 2)}));
}

inline SimilarityRIFS halves() {
    SimilarityIFS a({map1(q(1, 2), 0), map1(q(1, 2), q(1, 2))});
    return SimilarityRIFS({a}, ProbabilityVector::uniform(1));
}

// Top row of a 2x3 grid (a horizontal segment) and the right column (a vertical segment).
inline CarpetRIFS segments_2x3() {
    CarpetIFS top(2, 3, {{0, 2}, {1, 2}});
    CarpetIFS right(2, 3, {{1, 0}, {1, 1}, {1, 2}});
    return CarpetRIFS({top, right}, ProbabilityVector({q(1, 2), q(1, 2)}));
}

// Same idea on a 2x4 grid, where k2 = 2 k1 leaves room for long runs at moderate depth.
inline CarpetRIFS segments_2x4() {
    CarpetIFS top(2, 4, {{0, 3}, {1, 3}});
    CarpetIFS right(2, 4, {{1, 0}, {1, 1}, {1, 2}, {1, 3}});
    return CarpetRIFS({top, right}, ProbabilityVector({q(1, 2), q(1, 2)}));
}

// Three grid shapes with different digit sets.
inline CarpetRIFS mixed_grids() {
    CarpetIFS a(2, 3, {{0, 0}, {1, 1}, {1, 2}});
    CarpetIFS b(3, 5, {{0, 0}, {0, 4}, {1, 2}, {2, 1}, {2, 3}, {2, 4}});
    CarpetIFS c(2, 4, {{0, 1}, {1, 0}, {1, 3}});
    return CarpetRIFS({a, b, c}, ProbabilityVector({q(1, 3), q(1, 3), q(1, 3)}));
}

} // namespace fixtures
