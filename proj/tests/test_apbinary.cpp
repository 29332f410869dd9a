#include <algorithm>
#include <map>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "oddreg/apbinary.hpp"
#include "oddreg/arith.hpp"

using namespace oddreg;
using namespace oddreg::forms;
using namespace oddreg::apbinary;

namespace {

// independent oracle: n = x^2 + y^2 iff every prime = 3 (mod 4) divides n
// to an even power
bool sum_of_two_squares(i64 n) {
    if (n == 0) return true;
    for (i64 p = 2; p * p <= n; ++p) {
        int e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        if (p % 4 == 3 && e % 2 == 1) return false;
    }
    return !(n > 1 && n % 4 == 3);
}

std::vector<i64> members_sorted(const UniversalitySet& s) {
    std::vector<i64> out;
    for (const BinaryForm& f : s.members) {
        REQUIRE(f.b == 0);
        REQUIRE(f.a == 1);
        out.push_back(f.c);
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

TEST_CASE("binary_represents spot values and oracle") {
    CHECK(binary_represents(BinaryForm(1, 1), 17));
    CHECK(binary_represents(BinaryForm(1, 2), 3));
    CHECK(!binary_represents(BinaryForm(1, 1), 3));
    CHECK_THROWS_AS(binary_represents(BinaryForm(1, 1), -1), std::invalid_argument);

    for (i64 n = 0; n <= 500; ++n)
        CHECK(binary_represents(BinaryForm(1, 1), n) == sum_of_two_squares(n));

    // non-diagonal: brute-force cross-check
    BinaryForm f(2, 1, 3);
    for (i64 n = 0; n <= 200; ++n) {
        bool brute = false;
        for (i64 x = -20; x <= 20 && !brute; ++x)
            for (i64 y = -20; y <= 20 && !brute; ++y) brute = f.eval(x, y) == n;
        CHECK(binary_represents(f, n) == brute);
    }
}

TEST_CASE("reduced_forms class numbers") {
    CHECK(reduced_forms(-4).size() == 1);
    CHECK(reduced_forms(-23).size() == 3);   // x^2+xy+6y^2, 2x^2+-xy+3y^2
    CHECK(reduced_forms(-163).size() == 1);  // Heegner discriminant
    auto d64 = reduced_forms(-64);
    REQUIRE(d64.size() == 2);
    CHECK(d64[0] == BinaryForm(1, 0, 16));
    CHECK(d64[1] == BinaryForm(4, 4, 5));
    CHECK_THROWS_AS(reduced_forms(-6), std::invalid_argument);
    CHECK_THROWS_AS(reduced_forms(4), std::invalid_argument);
}

TEST_CASE("genus characters agree with residue fingerprints") {
    for (i64 d = -3; d >= -100; --d) {
        i64 r = ((d % 4) + 4) % 4;
        if (r != 0 && r != 1) continue;
        auto forms = reduced_forms(d);
        std::map<std::vector<int>, std::vector<i64>> by_chars;
        std::map<std::vector<i64>, std::vector<i64>> by_residues;
        for (std::size_t i = 0; i < forms.size(); ++i) {
            by_chars[genus_characters(forms[i])].push_back((i64)i);
            by_residues[represented_units(forms[i], 8 * -d)].push_back((i64)i);
        }
        // the two groupings induce the same partition
        std::vector<std::vector<i64>> a, b;
        for (auto& [k, v] : by_chars) a.push_back(v);
        for (auto& [k, v] : by_residues) b.push_back(v);
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        CHECK(a == b);
    }
}

TEST_CASE("classes_in_genus examples") {
    CHECK(classes_in_genus(BinaryForm(1, 1)) == 1);
    CHECK(classes_in_genus(BinaryForm(1, 16)) == 1);
    CHECK(classes_in_genus(BinaryForm(1, 32)) > 1);
    CHECK(classes_in_genus(BinaryForm(1, 1, 6)) == 3);  // disc -23, one genus
    CHECK(classes_in_genus(BinaryForm(1, 2)) == 1);
    CHECK_THROWS_AS(classes_in_genus(BinaryForm(2, 0, 2)), std::invalid_argument);
}

TEST_CASE("is_P8_universal matches Table 3") {
    CHECK(is_P8_universal(BinaryForm(1, 2), 3).universal);
    CHECK(is_P8_universal(BinaryForm(1, 4), 5).universal);
    for (i64 j : {1, 2, 3, 5, 8, 16, 32})
        CHECK(!is_P8_universal(BinaryForm(1, j), 7).universal);

    CHECK(members_sorted(universal_set(1)) == std::vector<i64>{1, 2, 4, 8, 16});
    CHECK(members_sorted(universal_set(3)) == std::vector<i64>{2});
    CHECK(members_sorted(universal_set(5)) == std::vector<i64>{1, 4});
    CHECK(members_sorted(universal_set(7)).empty());
}

TEST_CASE("universality certificates are sound") {
    for (int eta : {1, 3, 5, 7}) {
        for (i64 i = 1; i * i <= 64; ++i)
            for (i64 j = i; i * j <= 64; ++j) {
                if (std::gcd(i, j) != 1) continue;
                auto cert = is_P8_universal(BinaryForm(i, j), eta);
                if (cert.universal) {
                    CHECK(!cert.witness);
                    for (std::size_t k = 1; k <= 200; ++k)
                        CHECK(binary_represents(cert.form,
                                                (i64)arith::ap_prime({eta, k})));
                } else {
                    REQUIRE(cert.witness.has_value());
                    CHECK(*cert.witness % 8 == eta);
                    CHECK(arith::is_prime((u64)*cert.witness));
                    CHECK(!binary_represents(cert.form, *cert.witness));
                }
            }
    }
}

TEST_CASE("psi reproduces Table 2") {
    struct Row {
        int eta;
        i64 u, v;
        int w, psi;
    };
    const Row rows[] = {{1, 1, 193, 16, 8},   {1, 1, 73, 5, 2},     {3, 139, 163, 22, 12},
                        {3, 107, 131, 20, 12}, {3, 67, 83, 15, 9},   {3, 59, 67, 12, 7},
                        {5, 157, 173, 26, 16}, {5, 53, 61, 13, 8},   {7, 167, 191, 21, 11},
                        {7, 127, 151, 17, 9},  {7, 71, 79, 12, 7}};
    for (const Row& r : rows) {
        auto t = psi(r.eta, r.u, r.v, r.w);
        CHECK(t.psi == r.psi);
    }
}

TEST_CASE("psi table internals") {
    auto t = psi(1, 1, 193, 16);
    // members of U(8,1) are excluded from the table
    CHECK(!t.xi(1, 1));
    CHECK(!t.xi(1, 16));
    // non-members appear with xi consistent with the standalone counter
    auto x = t.xi(1, 3);
    REQUIRE(x.has_value());
    CHECK(*x == xi_count(1, 1, 3, 16));
    CHECK(*x <= t.psi);
    // Lemma on psi at the table-2 parameters: psi_1(1,193;16) = 8 < 16 - 7
    CHECK(t.psi < 16 - 7);

    auto j = t.json();
    CHECK(j.find("\"psi\":8") != std::string::npos);
    CHECK(t.text().find("= 8") != std::string::npos);
}

TEST_CASE("xi and psi monotonicity") {
    for (int w = 1; w <= 12; ++w) CHECK(xi_count(3, 2, 5, w) <= xi_count(3, 2, 5, w + 1));
    CHECK(psi(3, 59, 67, 12).psi <= psi(3, 67, 83, 12).psi);
    CHECK(psi(5, 53, 61, 13).psi <= psi(5, 157, 173, 13).psi);
}
