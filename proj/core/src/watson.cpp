#include "oddreg/watson.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

#include "oddreg/arith.hpp"
#include "oddreg/localrep.hpp"
#include "oddreg/sieve.hpp"

namespace oddreg::watson {
namespace {

using forms::DiagonalForm;
using forms::GramLattice;

i64 mod_pos(i64 a, i64 m) {
    i64 r = a % m;
    return r < 0 ? r + m : r;
}

/// Basis of the kernel of the symmetric matrix g modulo an odd prime p.
std::vector<Vec3> kernel_mod_p(const Mat3& g, i64 p) {
    i64 a[3][3];
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) a[r][c] = mod_pos(g(r, c), p);
    int pivot_col[3] = {-1, -1, -1};
    int rank = 0;
    for (int c = 0; c < 3 && rank < 3; ++c) {
        int pr = -1;
        for (int r = rank; r < 3; ++r)
            if (a[r][c]) {
                pr = r;
                break;
            }
        if (pr < 0) continue;
        std::swap(a[rank], a[pr]);
        i64 inv = (i64)arith::inv_mod((u64)a[rank][c], (u64)p);
        for (int cc = 0; cc < 3; ++cc) a[rank][cc] = a[rank][cc] * inv % p;
        for (int r = 0; r < 3; ++r) {
            if (r == rank || !a[r][c]) continue;
            i64 f = a[r][c];
            for (int cc = 0; cc < 3; ++cc) a[r][cc] = mod_pos(a[r][cc] - f * a[rank][cc], p);
        }
        pivot_col[rank++] = c;
    }
    std::vector<Vec3> basis;
    for (int c = 0; c < 3; ++c) {
        bool is_pivot = false;
        for (int r = 0; r < rank; ++r)
            if (pivot_col[r] == c) is_pivot = true;
        if (is_pivot) continue;
        Vec3 v{0, 0, 0};
        v[c] = 1;
        for (int r = 0; r < rank; ++r) v[pivot_col[r]] = mod_pos(-a[r][c], p);
        basis.push_back(v);
    }
    return basis;
}

/// Triangular basis of the lattice spanned by the given columns (full rank).
Mat3 column_basis(std::vector<Vec3> cols) {
    int pos = 0;
    for (int r = 0; r < 3; ++r) {
        for (;;) {
            int best = -1;
            for (std::size_t c = pos; c < cols.size(); ++c)
                if (cols[c][r] != 0 &&
                    (best < 0 || std::abs(cols[c][r]) < std::abs(cols[best][r])))
                    best = (int)c;
            if (best < 0) throw std::logic_error("column_basis: rank deficiency");
            std::swap(cols[pos], cols[best]);
            bool done = true;
            for (std::size_t c = pos + 1; c < cols.size(); ++c) {
                if (cols[c][r] == 0) continue;
                i64 q = cols[c][r] / cols[pos][r];
                for (int i = 0; i < 3; ++i) cols[c][i] -= q * cols[pos][i];
                if (cols[c][r] != 0) done = false;
            }
            if (done) break;
        }
        ++pos;
    }
    Mat3 h;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) h(r, c) = cols[c][r];
    return h;
}

std::vector<i64> odd_prime_divisors(i64 n) {
    std::vector<i64> out;
    while (n % 2 == 0) n /= 2;
    for (i64 p = 3; p * p <= n; p += 2)
        if (n % p == 0) {
            out.push_back(p);
            while (n % p == 0) n /= p;
        }
    if (n > 2) out.push_back(n);
    return out;
}

i64 isqrt(i64 n) {
    i64 r = (i64)std::sqrt((double)n);
    while (r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r;
}

i64 ceil_div(i64 a, i64 b) { return a >= 0 ? (a + b - 1) / b : -((-a) / b); }

}  // namespace

GramLattice big_lambda(const GramLattice& l, i64 m) {
    if (m != 2 && (m < 3 || m % 2 == 0 || !arith::is_prime((u64)m)))
        throw std::invalid_argument("big_lambda: m must be 2 or an odd prime");
    const Mat3& g = l.gram2();
    std::vector<Vec3> cols;
    for (int i = 0; i < 3; ++i) {
        Vec3 e{0, 0, 0};
        e[i] = m;
        cols.push_back(e);
    }
    if (m == 2) {
        for (i64 x = 0; x < 2; ++x)
            for (i64 y = 0; y < 2; ++y)
                for (i64 z = 0; z < 2; ++z) {
                    if (!x && !y && !z) continue;
                    Vec3 v{x, y, z};
                    Vec3 gv = g.apply(v);
                    if (gv[0] % 2 || gv[1] % 2 || gv[2] % 2) continue;
                    if (l.q(v) % 2) continue;
                    cols.push_back(v);
                }
    } else {
        for (const Vec3& v : kernel_mod_p(g, m)) cols.push_back(v);
    }
    Mat3 h = column_basis(std::move(cols));
    return GramLattice(h.transposed() * g * h);
}

i64 norm_ideal(const GramLattice& l) {
    const Mat3& g = l.gram2();
    i64 d = arith::gcd(arith::gcd(g(0, 0) / 2, g(1, 1) / 2), g(2, 2) / 2);
    d = arith::gcd(d, std::abs(g(0, 1)));
    d = arith::gcd(d, std::abs(g(0, 2)));
    return arith::gcd(d, std::abs(g(1, 2)));
}

GramLattice lambda(const GramLattice& l, i64 m) {
    GramLattice big = big_lambda(l, m);
    i64 d = norm_ideal(big);
    Mat3 g;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) g(r, c) = big.gram2()(r, c) / d;
    return GramLattice(g).canonical();
}

ReductionChain reduce_to_stable(const DiagonalForm& f) {
    ReductionChain ch{f, {}, f, std::nullopt};
    DiagonalForm cur = f;
    for (int iter = 0; iter < 64; ++iter) {
        i64 bad = 0;
        for (i64 p : odd_prime_divisors(cur.disc()))
            if (!localrep::is_stable(cur, p)) {
                bad = p;
                break;
            }
        if (!bad) {
            ch.terminal = cur;
            return ch;
        }
        // Lemma hypothesis: the unimodular Z_p-component must be anisotropic
        std::vector<i64> units;
        for (i64 coef : {cur.a, cur.b, cur.c})
            if (coef % bad != 0) units.push_back(coef);
        if (units.size() == 2 && arith::jacobi(-units[0] * units[1], bad) == 1) {
            ch.blocked_at = bad;
            ch.terminal = cur;
            return ch;
        }
        auto next = lambda(GramLattice(cur), bad).as_diagonal();
        if (!next) throw std::logic_error("reduce_to_stable: lambda left the diagonal class");
        ch.steps.emplace_back(bad, *next);
        cur = *next;
    }
    throw std::logic_error("reduce_to_stable: no convergence");
}

std::vector<MissingPrimeVerdict> missing_prime_scan(const std::vector<DiagonalForm>& bases,
                                                    i64 lmin, i64 lmax, i64 bound,
                                                    std::optional<VariantType> only) {
    struct Task {
        i64 l;
        DiagonalForm base;
        VariantType type;
        DiagonalForm variant;
    };
    std::vector<Task> tasks;
    for (i64 l = lmin; l <= lmax; ++l) {
        if (l < 3 || l % 2 == 0 || !arith::is_prime((u64)l)) continue;
        for (const DiagonalForm& base : bases) {
            if ((base.a * base.b * base.c) % l == 0)
                throw std::invalid_argument("missing_prime_scan: l divides a coefficient");
            const i64 cs[3] = {base.a, base.b, base.c};
            std::set<std::string> seen;
            for (int keep = 0; keep < 3; ++keep) {
                // type (i): l^2 on the two other coefficients
                if (!only || *only == VariantType::i) {
                    DiagonalForm v(cs[keep], l * l * cs[(keep + 1) % 3],
                                   l * l * cs[(keep + 2) % 3]);
                    if (seen.insert("i:" + v.str()).second)
                        tasks.push_back({l, base, VariantType::i, v});
                }
                // type (ii): l^2 on one coefficient, the unscaled binary pair
                // must be anisotropic at l
                if (!only || *only == VariantType::ii) {
                    i64 u1 = cs[(keep + 1) % 3], u2 = cs[(keep + 2) % 3];
                    if (arith::jacobi(-u1 * u2, l) == -1) {
                        DiagonalForm v(u1, u2, l * l * cs[keep]);
                        if (seen.insert("ii:" + v.str()).second)
                            tasks.push_back({l, base, VariantType::ii, v});
                    }
                }
            }
        }
    }
    std::vector<MissingPrimeVerdict> out;
    out.reserve(tasks.size());
    for (const Task& t : tasks)
        out.push_back({t.l, t.base, t.type, t.variant, std::nullopt, bound});
    parallel_for(tasks.size(), worker_threads(), [&](std::size_t i) {
        auto rep = sieve::verify_regularity(GramLattice(tasks[i].variant), sieve::Mode::odd, bound);
        if (!rep.exceptions.empty()) out[i].exception = rep.exceptions.front();
    });
    return out;
}

CountingGate counting_gate(i64 l) {
    // l - (2l/9 + 2 + 3l/25 + 3 + (l+1)/2) = (142 l - 4950) / 900
    i64 lower = ceil_div(142 * l - 4950, 900);
    i64 upper = (isqrt(8 * l) + 1) / 2;  // k <= sqrt(2l)+1/2 iff (2k-1)^2 <= 8l
    return {l, lower, upper, lower > upper};
}

i64 local_bad_bound(i64 p, i64 l) {
    if (p == l) return (l + 1) / 2;
    return (p + 1) / 2 * ceil_div(l, p * p);
}

}  // namespace oddreg::watson
