#include <algorithm>
#include <vector>

#include "doctest.h"
#include "oddreg/genus.hpp"

using namespace oddreg;
using namespace oddreg::forms;
using namespace oddreg::genus;

namespace {

Mat3 gram6(i64 g11, i64 g22, i64 g33, i64 g12, i64 g13, i64 g23) {
    Mat3 g;
    g(0, 0) = g11;
    g(1, 1) = g22;
    g(2, 2) = g33;
    g(0, 1) = g(1, 0) = g12;
    g(0, 2) = g(2, 0) = g13;
    g(1, 2) = g(2, 1) = g23;
    return g;
}

// brute-force histogram of Q mod 2^k over (Z/2^k)^3
std::vector<u64> brute_profile(const GramLattice& l, int k) {
    i64 m = i64{1} << k;
    std::vector<u64> h(m, 0);
    const Mat3& g = l.gram2();
    for (i64 x = 0; x < m; ++x)
        for (i64 y = 0; y < m; ++y)
            for (i64 z = 0; z < m; ++z) {
                Vec3 v{x, y, z};
                i128 q = 0;
                for (int r = 0; r < 3; ++r)
                    for (int c = 0; c < 3; ++c) q += (i128)g(r, c) * v[r] * v[c];
                ++h[(i64)((q / 2) % m)];
            }
    return h;
}

}  // namespace

TEST_CASE("2-adic count profile matches brute-force enumeration") {
    std::vector<GramLattice> ls;
    for (auto f : {DiagonalForm(1, 1, 1), DiagonalForm(1, 4, 5), DiagonalForm(1, 6, 8),
                   DiagonalForm(2, 3, 5), DiagonalForm(1, 2, 24), DiagonalForm(1, 8, 16)})
        ls.emplace_back(f);
    ls.emplace_back(gram6(4, 8, 14, 0, 0, 4));  // <2> perp (4 2; 2 7)
    ls.emplace_back(gram6(4, 2, 4, 0, 0, 1));   // half-integral scale
    for (const auto& l : ls)
        for (int k = 1; k <= 5; ++k) CHECK(count_profile_2(l, k) == brute_profile(l, k));
}

TEST_CASE("same_genus examples") {
    CHECK(same_genus(GramLattice(DiagonalForm(1, 4, 9)), GramLattice(DiagonalForm(1, 1, 36))));
    CHECK(same_genus(GramLattice(DiagonalForm(1, 6, 8)), GramLattice(gram6(4, 8, 14, 0, 0, 4))));
    CHECK(!same_genus(GramLattice(DiagonalForm(1, 1, 1)), GramLattice(DiagonalForm(1, 1, 2))));
    // equal discriminant but different 3-adic Jordan splitting
    CHECK(!same_genus(GramLattice(DiagonalForm(1, 1, 36)), GramLattice(DiagonalForm(1, 6, 6))));
}

TEST_CASE("same_genus is an equivalence relation on the corpus") {
    std::vector<GramLattice> ls;
    for (auto f : {DiagonalForm(1, 4, 9), DiagonalForm(1, 1, 36), DiagonalForm(1, 6, 8),
                   DiagonalForm(1, 6, 6), DiagonalForm(2, 3, 5)})
        ls.emplace_back(f);
    ls.emplace_back(gram6(4, 8, 14, 0, 0, 4));
    for (std::size_t i = 0; i < ls.size(); ++i) {
        CHECK(same_genus(ls[i], ls[i]));
        for (std::size_t j = i + 1; j < ls.size(); ++j)
            CHECK(same_genus(ls[i], ls[j]) == same_genus(ls[j], ls[i]));
    }
    // transitivity spot check on the one nontrivial chain
    if (same_genus(ls[0], ls[1]) && same_genus(ls[1], ls[1])) CHECK(same_genus(ls[0], ls[1]));
}

TEST_CASE("enumerate_genus reproduces known class numbers") {
    auto g1 = enumerate_genus(GramLattice(DiagonalForm(1, 1, 1)));
    CHECK(g1.h() == 1);

    auto g2 = enumerate_genus(GramLattice(DiagonalForm(1, 4, 9)));
    CHECK(g2.h() == 2);
    bool has_mate = false;
    for (const auto& c : g2.classes)
        if (is_isometric(c, GramLattice(DiagonalForm(1, 1, 36)))) has_mate = true;
    CHECK(has_mate);

    auto g3 = enumerate_genus(GramLattice(DiagonalForm(3, 4, 7)));
    CHECK(g3.h() == 2);
    GramLattice mate(gram6(4, 14, 14, 2, 2, 0));  // doubled (2 1 1; 1 7 0; 1 0 7)
    bool has_m6 = false;
    for (const auto& c : g3.classes)
        if (is_isometric(c, mate)) has_m6 = true;
    CHECK(has_m6);

    auto g4 = enumerate_genus(GramLattice(DiagonalForm(1, 6, 8)));
    CHECK(g4.h() == 2);
    bool has_m3 = false;
    for (const auto& c : g4.classes)
        if (is_isometric(c, GramLattice(gram6(4, 8, 14, 0, 0, 4)))) has_m3 = true;
    CHECK(has_m3);
}

TEST_CASE("genus classes share local representation behavior") {
    auto g = enumerate_genus(GramLattice(DiagonalForm(1, 4, 9)));
    REQUIRE(g.h() == 2);
    // identical 2-adic count profiles and pairwise non-isometric
    CHECK(count_profile_2(g.classes[0], 5) == count_profile_2(g.classes[1], 5));
    CHECK(!is_isometric(g.classes[0], g.classes[1]));
    CHECK(g.classes[0].det2() == g.classes[1].det2());
}

TEST_CASE("enumerate_genus refuses past the discriminant cap") {
    CHECK_THROWS_AS(enumerate_genus(GramLattice(DiagonalForm(1, 1, 36)), 10),
                    std::runtime_error);
}
