#include "oddreg/localrep.hpp"

#include <algorithm>
#include <mutex>

#include "oddreg/arith.hpp"

namespace oddreg::localrep {

using forms::DiagonalForm;
using forms::GramLattice;

namespace {

int ordp_cap(i64 v, i64 p, int cap) {
    if (v < 0) v = -v;
    if (v == 0) return cap;
    int e = 0;
    while (e < cap && v % p == 0) {
        v /= p;
        ++e;
    }
    return e;
}

i128 q128(const Mat3& g, const Vec3& x) {
    i128 s = 0;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) s += static_cast<i128>(g(r, c)) * x[r] * x[c];
    return s / 2;
}

i64 mod_pos(i128 v, i64 m) {
    i64 r = static_cast<i64>(v % m);
    return r < 0 ? r + m : r;
}

/// Primitive solution of Q(x) ≡ n over Z_p by residue lifting: a solution
/// mod p^j is accepted once some gradient entry has 2·ord+1 ≤ j (Hensel).
/// Every primitive solution is accepted by level 2·ord_p(det G)+1, so the
/// verdict depends on n mod p^jmax only.
std::optional<std::pair<Vec3, int>> primitive_rep(const GramLattice& l, i64 p, i64 n, int jmax) {
    const Mat3& g = l.gram2();
    std::optional<std::pair<Vec3, int>> hit;
    // returns true when v is a Hensel-accepted solution at level j
    auto accepted = [&](const Vec3& v, int j) {
        Vec3 gr = g.apply(v);
        int e = std::min({ordp_cap(gr[0], p, j), ordp_cap(gr[1], p, j), ordp_cap(gr[2], p, j)});
        if (2 * e + 1 > j) return false;
        hit = std::make_pair(v, j);
        return true;
    };
    std::vector<Vec3> cur;
    for (i64 x = 0; x < p; ++x)
        for (i64 y = 0; y < p; ++y)
            for (i64 z = 0; z < p; ++z) {
                if (x == 0 && y == 0 && z == 0) continue;
                Vec3 v{x, y, z};
                if (mod_pos(q128(g, v) - n, p) != 0) continue;
                if (accepted(v, 1)) return hit;
                cur.push_back(v);
            }
    i64 pj = p;
    for (int j = 1; !cur.empty(); ++j) {
        if (j == jmax) throw std::logic_error("primitive_rep: acceptance bound exceeded");
        std::vector<Vec3> next;
        for (const Vec3& v : cur) {
            i64 c0 = mod_pos((q128(g, v) - n) / pj, p);
            Vec3 gr = g.apply(v);
            i64 g0 = mod_pos(gr[0], p), g1 = mod_pos(gr[1], p), g2 = mod_pos(gr[2], p);
            auto emit = [&](const Vec3& w) {
                if (accepted(w, j + 1)) return true;
                next.push_back(w);
                if (next.size() > (std::size_t)1 << 22)
                    throw std::runtime_error("primitive_rep: residue set blowup");
                return false;
            };
            if (g0 == 0 && g1 == 0 && g2 == 0) {
                if (c0 != 0) continue;  // dead branch
                for (i64 t0 = 0; t0 < p; ++t0)
                    for (i64 t1 = 0; t1 < p; ++t1)
                        for (i64 t2 = 0; t2 < p; ++t2)
                            if (emit({v[0] + pj * t0, v[1] + pj * t1, v[2] + pj * t2})) return hit;
            } else {
                // solve c0 + t·gr ≡ 0 (mod p) for one coordinate
                int i = g0 ? 0 : (g1 ? 1 : 2);
                i64 gi = i == 0 ? g0 : (i == 1 ? g1 : g2);
                i64 inv = static_cast<i64>(arith::inv_mod(static_cast<u64>(gi), static_cast<u64>(p)));
                int a = (i + 1) % 3, b = (i + 2) % 3;
                i64 ga = a == 0 ? g0 : (a == 1 ? g1 : g2);
                i64 gb = b == 0 ? g0 : (b == 1 ? g1 : g2);
                for (i64 ta = 0; ta < p; ++ta)
                    for (i64 tb = 0; tb < p; ++tb) {
                        i64 ti = mod_pos(-static_cast<i128>(c0 + ta * ga + tb * gb) * inv, p);
                        Vec3 w = v;
                        w[i] += pj * ti;
                        w[a] += pj * ta;
                        w[b] += pj * tb;
                        if (emit(w)) return hit;
                    }
            }
        }
        cur = std::move(next);
        pj *= p;
    }
    return std::nullopt;
}

/// --- exact 2-adic decision for diagonal lattices ------------------------
///
/// Odd squares in Z_2 are exactly 1 + 8Z_2, so for d = u·2^e (u odd) the
/// values d·x^2 over odd x fill the full residue class d + 2^(e+3)Z_2.
/// Hence the value set of a diagonal binary form <f,g> is
///   {0}  u  U_a (4^a f + 2^(2a+ord f+3)Z_2)
///        u  U_b (4^b g + 2^(2b+ord g+3)Z_2)
///        u  U_{a,b} (4^a f + 4^b g + 2^min(...)Z_2),
/// a union of full classes (a sum of full classes is a full class), and
/// meeting a target class r + 2^m Z_2 is a congruence check. Terms with
/// 2a + ord f >= m + 4 duplicate shallower classes, so the loops are O(m^2).
/// This replaces the residue BFS, whose frontier grows like 4^j on forms
/// with large 2-power coefficients.

int ord2(i64 v) { return ordp_cap(v, 2, 62); }

/// Does {f x^2 + g y^2 : x,y in Z_2} meet r + 2^m Z_2?  On success returns
/// (a, b, mm): exponents of a witness x = 2^a, y = 2^b (-1 encodes 0) with
/// f·4^a + g·4^b = r (mod 2^mm), mm >= min over the classes involved.
std::optional<std::array<int, 3>> bin2_hit(i64 f, i64 g, i64 r, int m) {
    auto cong = [&](u64 v, int mm) {
        u64 mask = (u64{1} << mm) - 1;
        return ((v - static_cast<u64>(r)) & mask) == 0;
    };
    auto term = [](i64 x, int a) -> u64 {
        int s = 2 * a;
        return s >= 64 ? 0 : static_cast<u64>(x) << s;
    };
    if (cong(0, m)) return std::array<int, 3>{-1, -1, m};
    int of = ord2(f), og = ord2(g);
    int amax = std::max(0, (m + 4 - of) / 2 + 1);
    int bmax = std::max(0, (m + 4 - og) / 2 + 1);
    for (int a = 0; a <= amax; ++a) {
        int mm = std::min(2 * a + of + 3, m);
        if (cong(term(f, a), mm)) return std::array<int, 3>{a, -1, mm};
    }
    for (int b = 0; b <= bmax; ++b) {
        int mm = std::min(2 * b + og + 3, m);
        if (cong(term(g, b), mm)) return std::array<int, 3>{-1, b, mm};
    }
    for (int a = 0; a <= amax; ++a)
        for (int b = 0; b <= bmax; ++b) {
            int mm = std::min({2 * a + of + 3, 2 * b + og + 3, m});
            if (cong(term(f, a) + term(g, b), mm)) return std::array<int, 3>{a, b, mm};
        }
    return std::nullopt;
}

struct Diag2Hit {
    Vec3 witness;  // Q(witness) = n (mod 2^mexp)
    int mexp;
};

/// n -> <d1,d2,d3> over Z_2, exactly.  A solution of n != 0 either has some
/// odd coordinate i -- equivalent to the binary form on the other two
/// coordinates meeting (n - d_i) + 2^(ord d_i + 3)Z_2 -- or is entirely
/// even, which forces 4 | n and recurses on n/4.
std::optional<Diag2Hit> rep2_diagonal(const std::array<i64, 3>& d, i64 n) {
    if (n == 0) return Diag2Hit{{0, 0, 0}, 2};
    int t = 0;
    i64 m = n;
    for (;;) {
        for (int i = 0; i < 3; ++i) {
            int cls = ord2(d[i]) + 3;
            int j = (i + 1) % 3, k = (i + 2) % 3;
            auto hit = bin2_hit(d[j], d[k], m - d[i], cls);
            if (hit) {
                auto [a, b, mm] = *hit;
                Vec3 w{};
                w[i] = i64{1} << t;
                w[j] = a < 0 ? 0 : i64{1} << (a + t);
                w[k] = b < 0 ? 0 : i64{1} << (b + t);
                return Diag2Hit{w, std::min(mm + 2 * t, 60)};
            }
        }
        if (m % 4 != 0) return std::nullopt;
        m /= 4;
        ++t;
    }
}

/// The diagonal Q-coefficients when the doubled Gram is diagonal and small
/// enough for the class arithmetic (it always is for i64 forms in range).
std::optional<std::array<i64, 3>> diag2_coeffs(const GramLattice& l) {
    const Mat3& g = l.gram2();
    if (g(0, 1) != 0 || g(0, 2) != 0 || g(1, 2) != 0) return std::nullopt;
    std::array<i64, 3> d{g(0, 0) / 2, g(1, 1) / 2, g(2, 2) / 2};
    for (i64 v : d)
        if (ord2(v) + 3 > 56) return std::nullopt;
    return d;
}

/// Exact representability of p^alpha·w (w unit, chiw = jacobi(w,p)) by the
/// diagonal p-adic form with sorted scales e[] and unit characters chi[].
bool rep_odd(std::array<int, 3> e, std::array<int, 3> chi, i64 p, int alpha, int chiw) {
    int chi_m1 = arith::jacobi(-1, p);
    for (;;) {
        // sort by scale, keeping characters attached
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2 - i; ++j)
                if (e[j] > e[j + 1]) {
                    std::swap(e[j], e[j + 1]);
                    std::swap(chi[j], chi[j + 1]);
                }
        if (alpha < e[0]) return false;
        alpha -= e[0];
        e[2] -= e[0];
        e[1] -= e[0];
        e[0] = 0;
        int r = (e[0] == 0) + (e[1] == 0) + (e[2] == 0);
        if (alpha == 0) return r >= 2 || chi[0] * chiw == 1;
        if (r == 3) return true;
        if (r == 2) {
            if (chi_m1 * chi[0] * chi[1] == 1) return true;  // hyperbolic plane
            if (alpha % 2 == 0) return true;  // anisotropic binary covers all units at even orders
            if (e[2] % 2 == 0) return e[2] < alpha;
            return e[2] <= alpha && chi[2] * chiw == 1;
        }
        // r == 1: a leading unit coordinate is impossible, so x1 = p·x1'
        e[0] = 2;
    }
}

constexpr int kMaxJ = 45;

int jmax_for(const GramLattice& l, i64 p) {
    int v = ordp_cap(l.det2(), p, 64);
    int j = 2 * v + 3;
    if (j > kMaxJ) throw std::invalid_argument("local solver: p-part of det too large");
    return j;
}

i64 pow_i64(i64 p, int e) {
    i64 r = 1;
    while (e-- > 0) r *= p;
    return r;
}

std::vector<i64> odd_prime_divisors(i64 n) {
    if (n < 0) n = -n;
    std::vector<i64> out;
    while (n % 2 == 0) n /= 2;
    for (i64 p = 3; p * p <= n; p += 2)
        if (n % p == 0) {
            out.push_back(p);
            while (n % p == 0) n /= p;
        }
    if (n > 1) out.push_back(n);
    return out;
}

}  // namespace

std::vector<OddJordanEntry> odd_jordan(const GramLattice& l, i64 p) {
    if (p < 3 || p % 2 == 0 || !arith::is_prime(static_cast<u64>(p)))
        throw std::invalid_argument("odd_jordan: p must be an odd prime");
    int vdet = ordp_cap(l.det2(), p, 64);
    int cap = vdet + 2;
    i64 mod = pow_i64(p, cap);
    // work on a symmetric matrix mod p^cap
    std::array<std::array<i64, 3>, 3> a{};
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) a[r][c] = mod_pos(l.gram2()(r, c), mod);
    auto mulm = [&](i64 x, i64 y) { return mod_pos(static_cast<i128>(x) * y, mod); };
    auto ordm = [&](i64 x) { return ordp_cap(x, p, cap); };
    std::vector<OddJordanEntry> out;
    for (int k = 0; k < 3; ++k) {
        // locate minimal-order entry in the trailing block
        int bi = k, bj = k, be = cap + 1;
        for (int i = k; i < 3; ++i)
            for (int j = i; j < 3; ++j)
                if (ordm(a[i][j]) < be) {
                    be = ordm(a[i][j]);
                    bi = i;
                    bj = j;
                }
        if (bi != bj) {
            // fold row/col bj into bi so the diagonal attains the minimal order.
            // Q(x+y) = a_ii + 2 a_ij + a_jj can cancel mod p; then Q(x-y) cannot,
            // since their difference 4 a_ij has the minimal order (p odd).
            i64 s = 1;
            if (ordm(mod_pos(a[bi][bi] + 2 * a[bi][bj] + a[bj][bj], mod)) > be) s = -1;
            for (int c = 0; c < 3; ++c) a[bi][c] = mod_pos(a[bi][c] + s * a[bj][c], mod);
            for (int r = 0; r < 3; ++r) a[r][bi] = mod_pos(a[r][bi] + s * a[r][bj], mod);
        }
        if (bi != k) {
            std::swap(a[bi], a[k]);
            for (int r = 0; r < 3; ++r) std::swap(a[r][bi], a[r][k]);
        }
        int e = ordm(a[k][k]);
        i64 pe = pow_i64(p, e);
        // invert the full pivot unit mod p^(cap-e), not just its leading digit,
        // so the row elimination clears a[r][k] exactly mod p^cap
        i64 unit = mod_pos(a[k][k] / pe, mod / pe);
        i64 uinv = static_cast<i64>(arith::inv_mod(static_cast<u64>(unit), static_cast<u64>(mod / pe)));
        for (int r = k + 1; r < 3; ++r) {
            if (a[r][k] == 0) continue;
            i64 f = mod_pos(static_cast<i128>(a[r][k] / pe) * uinv, mod / pe);
            for (int c = 0; c < 3; ++c)
                a[r][c] = mod_pos(a[r][c] - static_cast<i128>(f) * a[k][c], mod);
            for (int c = 0; c < 3; ++c)
                a[c][r] = mod_pos(a[c][r] - static_cast<i128>(f) * a[c][k], mod);
        }
        // diagonal value of Q is a[k][k]/2
        i64 qk = mulm(a[k][k], static_cast<i64>(arith::inv_mod(2, static_cast<u64>(mod))));
        int eq = ordm(qk);
        i64 u = (qk / pow_i64(p, eq)) % p;
        out.push_back({eq, arith::jacobi(u, p)});
    }
    std::sort(out.begin(), out.end(), [](const OddJordanEntry& x, const OddJordanEntry& y) {
        return x.scale < y.scale;
    });
    return out;
}

LocalReport represents_locally(const GramLattice& l, i64 p, i64 n) {
    if (n < 0) throw std::invalid_argument("represents_locally: n must be nonnegative");
    if (p < 2 || !arith::is_prime(static_cast<u64>(p)))
        throw std::invalid_argument("represents_locally: p must be prime");
    LocalReport rep;
    rep.p = p;
    rep.n = n;
    if (n == 0) {
        rep.represented = true;
        rep.modulus = p;
        return rep;
    }
    if (p == 2) {
        if (auto d = diag2_coeffs(l)) {
            if (auto hit = rep2_diagonal(*d, n)) {
                rep.represented = true;
                rep.witness = hit->witness;
                rep.modulus = i64{1} << hit->mexp;
            } else {
                rep.represented = false;
                rep.modulus = i64{1} << std::min(2 * ord2(l.det2()) + 3, 60);
                rep.obstruction = "no 2-adic solution (diagonal value classes)";
            }
            return rep;
        }
    }
    int jmax = jmax_for(l, p);
    i64 mod = pow_i64(p, jmax);
    i64 m = n;
    i64 scale = 1;
    int t = 0;
    for (;;) {
        auto hit = primitive_rep(l, p, m % mod, jmax);
        if (hit) {
            rep.represented = true;
            for (int i = 0; i < 3; ++i) rep.witness[i] = scale * hit->first[i];
            int me = hit->second + 2 * t;
            i64 pm = 1;
            while (me-- > 0 && pm <= (i64(1) << 60) / p) pm *= p;
            rep.modulus = pm;
            return rep;
        }
        if (m % (p * p) == 0) {
            m /= p * p;
            scale *= p;
            ++t;
        } else {
            rep.represented = false;
            rep.modulus = mod;
            rep.obstruction = "no primitive solution at any depth";
            return rep;
        }
    }
}

std::vector<i64> relevant_primes(const GramLattice& l) {
    std::vector<i64> out{2};
    for (i64 p : odd_prime_divisors(l.det2())) out.push_back(p);
    return out;
}

LocalCache::LocalCache(const GramLattice& l) : l_(l) {
    for (i64 p : relevant_primes(l_)) {
        PrimeCtx ctx;
        ctx.p = p;
        if (p == 2) ctx.diag = diag2_coeffs(l_);
        if (!ctx.diag) {
            ctx.jmax = jmax_for(l_, p);
            ctx.mod = pow_i64(p, ctx.jmax);
        }
        if (p != 2) {
            auto jd = odd_jordan(l_, p);
            for (int i = 0; i < 3; ++i) {
                ctx.scales[i] = jd[i].scale;
                ctx.chis[i] = jd[i].chi;
            }
        }
        ctxs_.push_back(std::move(ctx));
    }
}

bool LocalCache::prim(PrimeCtx& ctx, i64 nred) {
    auto it = ctx.prim.find(nred);
    if (it != ctx.prim.end()) return it->second;
    bool v = primitive_rep(l_, ctx.p, nred, ctx.jmax).has_value();
    ctx.prim.emplace(nred, v);
    return v;
}

bool LocalCache::represents(i64 p, i64 n) {
    if (n < 0) return false;
    if (n == 0) return true;
    for (auto& ctx : ctxs_) {
        if (ctx.p != p) continue;
        if (p != 2) {
            int alpha = ordp_cap(n, p, 63);
            i64 w = n / pow_i64(p, alpha);
            return rep_odd(ctx.scales, ctx.chis, p, alpha, arith::jacobi(w, p));
        }
        if (ctx.diag) return rep2_diagonal(*ctx.diag, n).has_value();
        i64 m = n;
        for (;;) {
            if (prim(ctx, m % ctx.mod)) return true;
            if (m % 4 == 0)
                m /= 4;
            else
                return false;
        }
    }
    // p does not divide 2·det: a unimodular rank-3 Z_p lattice is universal
    return true;
}

bool LocalCache::represents_genus(i64 n) {
    if (n < 0) return false;
    for (auto& ctx : ctxs_)
        if (!represents(ctx.p, n)) return false;
    return true;
}

std::shared_ptr<LocalCache> shared_cache(const GramLattice& l) {
    static std::mutex mu;
    static std::map<std::array<i64, 9>, std::shared_ptr<LocalCache>> pool;
    std::lock_guard<std::mutex> lk(mu);
    auto& slot = pool[l.gram2().m];
    if (!slot) slot = std::make_shared<LocalCache>(l);
    return slot;
}

bool represents_genus(const GramLattice& l, i64 n) {
    return shared_cache(l)->represents_genus(n);
}

AnisotropySet anisotropic_primes(const GramLattice& l) {
    AnisotropySet out;
    for (i64 p : odd_prime_divisors(l.det2())) {
        auto jd = odd_jordan(l, p);
        int parities[3] = {jd[0].scale & 1, jd[1].scale & 1, jd[2].scale & 1};
        int even = (parities[0] == 0) + (parities[1] == 0) + (parities[2] == 0);
        if (even == 0 || even == 3) continue;  // rank-3 unimodular piece: isotropic
        // the two entries of equal scale parity form the binary part
        int i = -1, j = -1;
        for (int x = 0; x < 3; ++x)
            for (int y = x + 1; y < 3; ++y)
                if (parities[x] == parities[y]) i = x, j = y;
        if (arith::jacobi(-1, p) * jd[i].chi * jd[j].chi == -1) out.primes.push_back(p);
    }
    for (i64 p : out.primes) out.by_eta[((p % 8) - 1) / 2].push_back(p);
    return out;
}

bool is_stable(const DiagonalForm& f, std::optional<i64> p) {
    auto at = [&](i64 q) {
        std::array<i64, 3> co{f.a, f.b, f.c};
        std::vector<i64> units;
        int s_single = -1;
        for (i64 x : co) {
            int e = ordp_cap(x, q, 63);
            if (e == 0)
                units.push_back(x);
            else
                s_single = e;
        }
        if (units.size() == 3) return true;
        if (units.size() == 2)
            return arith::jacobi(-units[0] * units[1], q) == 1 || s_single == 1;
        return false;
    };
    if (p) {
        if (*p < 3 || *p % 2 == 0) throw std::invalid_argument("is_stable: p must be an odd prime");
        return at(*p);
    }
    for (i64 q : odd_prime_divisors(f.disc()))
        if (!at(q)) return false;
    return true;
}

std::vector<int> odd_profile(const DiagonalForm& f) {
    GramLattice l(f);
    LocalCache cache(l);
    std::vector<int> out;
    for (int alpha : {1, 3, 5, 7})
        if (cache.represents(2, alpha)) out.push_back(alpha);
    if (out.empty()) throw std::logic_error("odd_profile: empty profile for a primitive diagonal form");
    return out;
}

i64 lembound1_g(const DiagonalForm& f, i64 w, i64 p) {
    if (p < 3 || p % 2 == 0 || !arith::is_prime(static_cast<u64>(p)))
        throw std::invalid_argument("lembound1_g: p must be an odd prime");
    if (w % 2 == 0) throw std::invalid_argument("lembound1_g: w must be odd");
    if (!is_stable(f, p)) throw std::invalid_argument("lembound1_g: form is not p-stable");
    auto aniso = anisotropic_primes(GramLattice(f));
    if (std::find(aniso.primes.begin(), aniso.primes.end(), p) == aniso.primes.end())
        throw std::invalid_argument("lembound1_g: form is not anisotropic at p");
    if (f.c % p == 0) {
        i64 p2 = p * p;
        i64 inv8 = static_cast<i64>(arith::inv_mod(8, static_cast<u64>(p2)));
        return mod_pos(static_cast<i128>(mod_pos(f.c - w, p2)) * inv8, p2);
    }
    i64 t = (f.a % p == 0) ? f.b : f.a;  // the unit member of the binary part
    int want = -arith::jacobi(t, p);
    for (i64 g = 0; g < p; ++g)
        if (arith::jacobi(8 * g + w, p) == want) return g;
    throw std::logic_error("lembound1_g: no residue found");
}

}  // namespace oddreg::localrep
