#include <algorithm>
#include <tuple>
#include <vector>

#include "doctest.h"
#include "oddreg/arith.hpp"
#include "oddreg/localrep.hpp"

using namespace oddreg;
using namespace oddreg::forms;
using namespace oddreg::localrep;

namespace {

// residues mod p^k represented by Q(x) over Z/p^k, by full enumeration
std::vector<char> residue_set(const GramLattice& l, i64 p, int k) {
    i64 mod = 1;
    for (int i = 0; i < k; ++i) mod *= p;
    std::vector<char> hit(mod, 0);
    const Mat3& g = l.gram2();
    for (i64 x = 0; x < mod; ++x)
        for (i64 y = 0; y < mod; ++y)
            for (i64 z = 0; z < mod; ++z) {
                i128 q = 0;
                Vec3 v{x, y, z};
                for (int r = 0; r < 3; ++r)
                    for (int c = 0; c < 3; ++c) q += (i128)g(r, c) * v[r] * v[c];
                hit[(i64)((q / 2) % mod)] = 1;
            }
    return hit;
}

int ordp(i64 n, i64 p) {
    int e = 0;
    while (n % p == 0) {
        n /= p;
        ++e;
    }
    return e;
}

const std::vector<DiagonalForm>& sample_forms() {
    static std::vector<DiagonalForm> fs = {
        {1, 1, 1}, {1, 1, 2}, {1, 1, 3},  {1, 2, 3},  {1, 4, 5},   {2, 3, 5},
        {1, 6, 8}, {3, 4, 7}, {1, 4, 21}, {1, 9, 18}, {1, 5, 25},  {2, 5, 7},
        {1, 3, 9}, {1, 1, 49}, {1, 8, 16}, {1, 11, 11}, {1, 13, 13}};
    return fs;
}

}  // namespace

TEST_CASE("represents_locally spot values") {
    CHECK(!represents_locally(GramLattice(DiagonalForm(3, 4, 7)), 2, 1).represented);
    CHECK(!represents_locally(GramLattice(DiagonalForm(1, 1, 36)), 2, 3).represented);
    CHECK(represents_locally(GramLattice(DiagonalForm(1, 4, 5)), 5, 5).represented);
    auto rep = represents_locally(GramLattice(DiagonalForm(1, 4, 5)), 5, 5);
    // witness satisfies the congruence at the reported modulus
    GramLattice l(DiagonalForm(1, 4, 5));
    CHECK((l.q(rep.witness) - 5) % rep.modulus == 0);
    CHECK(represents_locally(l, 2, 0).represented);
}

TEST_CASE("local verdicts agree with exhaustive residue enumeration") {
    struct Cap {
        i64 p;
        int k;
    };
    for (Cap cap : {Cap{2, 8}, Cap{3, 4}, Cap{5, 3}, Cap{7, 2}, Cap{11, 2}, Cap{13, 2}}) {
        for (const auto& f : sample_forms()) {
            GramLattice l(f);
            auto hit = residue_set(l, cap.p, cap.k);
            i64 mod = hit.size();
            LocalCache cache(l);
            int kobs_base = ordp(16 * l.disc(), cap.p) + 3;
            for (i64 n = 0; n <= 500; ++n) {
                bool verdict = cache.represents(cap.p, n);
                if (verdict) {
                    CHECK(hit[n % mod]);  // Z_p solution reduces mod p^k
                } else if (n > 0 && ordp(n, cap.p) + kobs_base <= cap.k) {
                    CHECK(!hit[n % mod]);  // obstruction visible at this depth
                }
            }
        }
    }
}

TEST_CASE("closed-form odd-p decision agrees with Hensel lifting") {
    std::vector<GramLattice> ls;
    for (const auto& f : sample_forms()) ls.emplace_back(f);
    {
        Mat3 g;  // <2> perp (4 2; 2 7)
        g(0, 0) = 4;
        g(1, 1) = 8;
        g(2, 2) = 14;
        g(1, 2) = g(2, 1) = 4;
        ls.emplace_back(g);
    }
    for (auto& l : ls) {
        LocalCache cache(l);
        for (i64 p : {3, 5, 7, 11, 13}) {
            for (i64 n = 0; n <= 500; ++n) {
                bool fast = cache.represents(p, n);
                bool lifted = represents_locally(l, p, n).represented;
                CHECK(fast == lifted);
            }
        }
    }
}

TEST_CASE("diagonal 2-adic closed form agrees with residue lifting") {
    // Rebasing the lattice by a unimodular U leaves the value set unchanged
    // but makes the Gram non-diagonal, so the cache falls back to the
    // residue-lifting path: an independent oracle for the class arithmetic.
    Mat3 u = Mat3::identity();
    u(0, 1) = 1;
    u(1, 2) = 1;
    for (auto f : {DiagonalForm(1, 1, 8), DiagonalForm(1, 2, 24), DiagonalForm(1, 4, 16),
                   DiagonalForm(2, 3, 18), DiagonalForm(1, 8, 16)}) {
        GramLattice l(f);
        GramLattice twin(u.transposed() * l.gram2() * u);
        LocalCache fast(l), slow(twin);
        for (i64 n = 0; n <= 600; ++n) CHECK(fast.represents(2, n) == slow.represents(2, n));
    }
}

TEST_CASE("diagonal 2-adic closed form on large 2-power coefficients") {
    // these forms used to exhaust the lifting frontier; the closed form must
    // be consistent with actual global representations
    for (auto f : {DiagonalForm(1, 1, 128), DiagonalForm(1, 1, 256), DiagonalForm(1, 2, 64),
                   DiagonalForm(1, 4, 32)}) {
        GramLattice l(f);
        LocalCache cache(l);
        std::vector<char> global(601, 0);
        auto q = [&](i64 x, i64 y, i64 z) { return f.a * x * x + f.b * y * y + f.c * z * z; };
        for (i64 x = 0; x * x * f.a <= 600; ++x)
            for (i64 y = 0; f.a * x * x + f.b * y * y <= 600; ++y)
                for (i64 z = 0; q(x, y, z) <= 600; ++z) global[q(x, y, z)] = 1;
        for (i64 n = 0; n <= 600; ++n)
            if (global[n]) CHECK(cache.represents(2, n));
    }
    // x^2 + y^2 is 0, 1 or 2 mod 4, so n = 3 (mod 4) is locally impossible
    LocalCache c128((GramLattice(DiagonalForm(1, 1, 128))));
    for (i64 n = 3; n <= 600; n += 4) CHECK(!c128.represents(2, n));
    // witness path through represents_locally
    auto rep = represents_locally(GramLattice(DiagonalForm(1, 1, 128)), 2, 132);
    CHECK(rep.represented);
    GramLattice l128((DiagonalForm(1, 1, 128)));
    CHECK((l128.q(rep.witness) - 132) % rep.modulus == 0);
}

TEST_CASE("represents_genus examples") {
    CHECK(represents_genus(GramLattice(DiagonalForm(1, 4, 9)), 1));
    CHECK(!represents_genus(GramLattice(DiagonalForm(1, 1, 36)), 3));
    CHECK(!represents_genus(GramLattice(DiagonalForm(3, 4, 7)), 1));
    CHECK(represents_genus(GramLattice(DiagonalForm(1, 1, 1)), 0));
}

TEST_CASE("anisotropic_primes") {
    CHECK(anisotropic_primes(GramLattice(DiagonalForm(1, 1, 1))).primes.empty());
    CHECK(anisotropic_primes(GramLattice(DiagonalForm(3, 4, 7))).primes == std::vector<i64>{3});
    auto t = anisotropic_primes(GramLattice(DiagonalForm(1, 4, 21)));
    CHECK(t.primes == std::vector<i64>{3, 7});
    CHECK(t.t() == 2);
    CHECK(t.t_eta(3) == 1);
    CHECK(t.t_eta(7) == 1);
    CHECK(t.t_eta(1) == 0);
}

namespace {

// Hilbert symbol (x,y)_p for odd p and nonzero integers x, y
int hilbert_odd(i64 x, i64 y, i64 p) {
    int alpha = 0, beta = 0;
    while (x % p == 0) {
        x /= p;
        ++alpha;
    }
    while (y % p == 0) {
        y /= p;
        ++beta;
    }
    int r = 1;
    if (alpha % 2 && beta % 2) r *= arith::jacobi(-1, p);
    if (beta % 2) r *= arith::jacobi(x, p);
    if (alpha % 2) r *= arith::jacobi(y, p);
    return r;
}

}  // namespace

TEST_CASE("anisotropy matches the Hilbert-symbol criterion") {
    // diag(a,b,c) isotropic over Q_p iff (a,b)(a,c)(b,c) = (-1,-abc)
    for (const auto& f : sample_forms()) {
        GramLattice l(f);
        auto aniso = anisotropic_primes(l);
        for (i64 p : {3, 5, 7, 11, 13}) {
            if (l.det2() % p != 0) continue;
            int eps = hilbert_odd(f.a, f.b, p) * hilbert_odd(f.a, f.c, p) * hilbert_odd(f.b, f.c, p);
            bool isotropic = eps == hilbert_odd(-1, -f.disc(), p);
            bool is_aniso =
                std::find(aniso.primes.begin(), aniso.primes.end(), p) != aniso.primes.end();
            CHECK(is_aniso == !isotropic);
        }
    }
}

TEST_CASE("is_stable") {
    CHECK(is_stable(DiagonalForm(1, 4, 5)));
    CHECK(!is_stable(DiagonalForm(1, 5, 20), 5));
    CHECK(!is_stable(DiagonalForm(1, 5, 20)));
    CHECK(is_stable(DiagonalForm(1, 1, 2)));
    CHECK(is_stable(DiagonalForm(1, 1, 3), 3));
    CHECK(is_stable(DiagonalForm(1, 3, 4), 3));
    CHECK(!is_stable(DiagonalForm(1, 9, 9), 3));
    // the 8 stable non-regular forms are all stable
    for (auto f : {DiagonalForm(1, 4, 5), DiagonalForm(1, 2, 24), DiagonalForm(1, 6, 8),
                   DiagonalForm(1, 5, 12), DiagonalForm(1, 4, 21), DiagonalForm(3, 4, 7),
                   DiagonalForm(2, 5, 24), DiagonalForm(5, 6, 8)})
        CHECK(is_stable(f));
}

TEST_CASE("odd_profile") {
    CHECK(odd_profile(DiagonalForm(1, 1, 2)) == std::vector<int>{1, 3, 5, 7});
    auto p347 = odd_profile(DiagonalForm(3, 4, 7));
    CHECK(std::find(p347.begin(), p347.end(), 3) != p347.end());
    CHECK(std::find(p347.begin(), p347.end(), 1) == p347.end());
    auto p145 = odd_profile(DiagonalForm(1, 4, 5));
    CHECK(std::find(p145.begin(), p145.end(), 1) != p145.end());
}

TEST_CASE("odd_profile decides whole progressions") {
    // alpha in profile iff every member of 8Z+alpha up to 2^12 is 2-adically
    // represented; spot-check against the cache
    for (auto f : {DiagonalForm(1, 1, 2), DiagonalForm(3, 4, 7), DiagonalForm(1, 6, 8)}) {
        GramLattice l(f);
        LocalCache cache(l);
        auto prof = odd_profile(f);
        for (int alpha : {1, 3, 5, 7}) {
            bool in = std::find(prof.begin(), prof.end(), alpha) != prof.end();
            bool all = true;
            for (i64 n = alpha; n <= 4096; n += 8)
                if (!cache.represents(2, n)) {
                    all = false;
                    break;
                }
            CHECK(in == all);
        }
    }
}

TEST_CASE("lembound1_g examples and bullet conditions") {
    CHECK(lembound1_g(DiagonalForm(1, 1, 3), 1, 3) == 7);
    CHECK(lembound1_g(DiagonalForm(1, 3, 4), 1, 3) == 2);
    CHECK(lembound1_g(DiagonalForm(1, 1, 3), 3, 3) == 0);
    for (auto [f, w, p] : std::vector<std::tuple<DiagonalForm, i64, i64>>{
             {DiagonalForm(1, 1, 3), 1, 3},
             {DiagonalForm(1, 3, 4), 1, 3},
             {DiagonalForm(1, 1, 3), 3, 3},
             {DiagonalForm(1, 1, 7), 3, 7},
             {DiagonalForm(3, 4, 7), 1, 3},
         }) {
        i64 g = lembound1_g(f, w, p);
        i64 m = 8 * g + w;
        CHECK(g >= 0);
        CHECK(g < p * p);
        CHECK(ordp(m, p) <= 1);
        CHECK(represents_locally(GramLattice(f), p, m).represented);
        // not represented by the binary part <a,b> over Z_p: exhaustive scan
        // of the binary congruence mod p^3 (m has ord <= 1, so p^3 decides)
        i64 mod = p * p * p;
        bool binary_hits = false;
        for (i64 x = 0; x < mod && !binary_hits; ++x)
            for (i64 y = 0; y < mod; ++y)
                if ((f.a * x % mod * x + f.b * y % mod * y - m) % mod == 0) {
                    binary_hits = true;
                    break;
                }
        CHECK(!binary_hits);
    }
    CHECK_THROWS_AS(lembound1_g(DiagonalForm(1, 1, 1), 1, 3), std::invalid_argument);
}
