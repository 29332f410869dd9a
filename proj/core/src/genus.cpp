#include "oddreg/genus.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <mutex>
#include <set>
#include <stdexcept>
#include <string>

#include "oddreg/localrep.hpp"

namespace oddreg::genus {
namespace {

using forms::GramLattice;

int val2(u64 x) { return x == 0 ? 64 : std::countr_zero(x); }

// multiplicative inverse of an odd u64, mod 2^64 (Newton iteration)
u64 inv_odd(u64 a) {
    u64 x = a;
    for (int i = 0; i < 5; ++i) x *= 2 - a * x;
    return x;
}

// One Jordan constituent of the 2-adic splitting: a unary form g/2*x^2 or a
// binary form with doubled Gram (a b; b c), entries mod 2^64.
struct Block2 {
    int dim;
    u64 a = 0, b = 0, c = 0;
};

// Block-diagonalizes the doubled Gram over Z_2 (entries mod 2^64). A 2x2
// block appears only when the minimal 2-adic valuation is attained solely
// off the diagonal.
std::vector<Block2> decompose2(const Mat3& gin) {
    u64 g[3][3];
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) g[i][j] = static_cast<u64>(gin(i, j));
    std::vector<int> act{0, 1, 2};
    std::vector<Block2> out;
    while (!act.empty()) {
        if (act.size() == 1) {
            out.push_back({1, g[act[0]][act[0]]});
            break;
        }
        int vmin = 64, pi = -1, pj = -1;
        for (std::size_t s = 0; s < act.size(); ++s)
            for (std::size_t t = s; t < act.size(); ++t) {
                int v = val2(g[act[s]][act[t]]);
                if (v < vmin) {
                    vmin = v;
                    pi = act[s];
                    pj = act[t];
                }
            }
        bool diag_min = false;
        int di = -1;
        for (int i : act)
            if (val2(g[i][i]) == vmin) {
                diag_min = true;
                di = i;
                break;
            }
        if (diag_min) {
            u64 inv = inv_odd(g[di][di] >> vmin);
            std::vector<int> rest;
            for (int i : act)
                if (i != di) rest.push_back(i);
            u64 f[3] = {0, 0, 0};
            for (int j : rest) f[j] = (g[di][j] >> vmin) * inv;
            for (int j : rest)
                for (int k : rest)
                    g[j][k] -= f[j] * g[di][k] + f[k] * g[j][di] - f[j] * f[k] * g[di][di];
            out.push_back({1, g[di][di]});
            act = rest;
        } else {
            // 2x2 pivot on (pi, pj); at most one index remains
            int k = -1;
            for (int i : act)
                if (i != pi && i != pj) k = i;
            u64 gii = g[pi][pi], gij = g[pi][pj], gjj = g[pj][pj];
            if (k >= 0) {
                u64 d = gii * gjj - gij * gij;  // valuation exactly 2*vmin
                u64 dinv = inv_odd(d >> (2 * vmin));
                u64 na = g[k][pi] * gjj - g[k][pj] * gij;
                u64 nb = g[k][pj] * gii - g[k][pi] * gij;
                u64 a = (na >> (2 * vmin)) * dinv;
                u64 b = (nb >> (2 * vmin)) * dinv;
                g[k][k] += a * a * gii + 2 * a * b * gij + b * b * gjj -
                           2 * (a * g[k][pi] + b * g[k][pj]);
                out.push_back({2, gii, gij, gjj});
                act = {k};
            } else {
                out.push_back({2, gii, gij, gjj});
                act.clear();
            }
        }
    }
    return out;
}

std::vector<u64> block_histogram(const Block2& blk, int k) {
    const u64 mask = (k == 64) ? ~0ULL : ((u64{1} << k) - 1);
    const u64 m = u64{1} << k;
    std::vector<u64> h(m, 0);
    if (blk.dim == 1) {
        u64 half = blk.a >> 1;  // diagonal of an even lattice
        for (u64 x = 0; x < m; ++x) ++h[(half * x * x) & mask];
    } else {
        u64 ha = blk.a >> 1, hc = blk.c >> 1, b = blk.b;
        for (u64 x = 0; x < m; ++x)
            for (u64 y = 0; y < m; ++y) ++h[(ha * x * x + b * x * y + hc * y * y) & mask];
    }
    return h;
}

// odd-p Jordan invariant: scale -> (rank, character of the unit determinant)
std::map<int, std::pair<int, int>> jordan_invariant(const GramLattice& l, i64 p) {
    std::map<int, std::pair<int, int>> inv;
    for (const auto& e : localrep::odd_jordan(l, p)) {
        auto& slot = inv[e.scale];
        if (slot.first == 0) slot = {1, e.chi};
        else {
            ++slot.first;
            slot.second *= e.chi;
        }
    }
    return inv;
}

struct GramKey {
    std::array<i64, 9> v;
    bool operator<(const GramKey& o) const { return v < o.v; }
};

GramKey key_of(const GramLattice& l) {
    GramKey k{};
    int t = 0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) k.v[t++] = l.gram2()(i, j);
    return k;
}

}  // namespace

std::vector<u64> count_profile_2(const GramLattice& l, int k) {
    if (k < 1 || k > 20) throw std::invalid_argument("count_profile_2: k out of range");
    auto blocks = decompose2(l.gram2());
    const u64 m = u64{1} << k;
    const u64 mask = m - 1;
    std::vector<u64> acc;
    for (const auto& blk : blocks) {
        auto h = block_histogram(blk, k);
        if (acc.empty()) {
            acc = std::move(h);
            continue;
        }
        std::vector<u64> next(m, 0);
        for (u64 u = 0; u < m; ++u) {
            if (!acc[u]) continue;
            for (u64 v = 0; v < m; ++v) next[(u + v) & mask] += acc[u] * h[v];
        }
        acc = std::move(next);
    }
    return acc;
}

bool same_genus(const GramLattice& l, const GramLattice& m) {
    if (l.det2() != m.det2()) return false;
    i64 d = l.det2();
    for (i64 p : localrep::relevant_primes(l)) {
        if (p == 2) continue;
        if (jordan_invariant(l, p) != jordan_invariant(m, p)) return false;
    }
    int k = 2 + val2(static_cast<u64>(d));
    return count_profile_2(l, k) == count_profile_2(m, k);
}

GenusDescriptor enumerate_genus(const GramLattice& l, i64 disc_cap) {
    const i64 det2 = l.det2();
    if (det2 > 8 * disc_cap)
        throw std::runtime_error(
            "enumerate_genus: discriminant " + std::to_string(det2) + "/8 exceeds cap " +
            std::to_string(disc_cap) + "; reduced enumeration would scan on the order of " +
            std::to_string(2 * det2) + " diagonal slices");

    // reference invariants, computed once
    const int k2 = 2 + val2(static_cast<u64>(det2));
    const auto ref_profile = count_profile_2(l, k2);
    std::vector<std::pair<i64, std::map<int, std::pair<int, int>>>> ref_jordan;
    for (i64 p : localrep::relevant_primes(l))
        if (p != 2) ref_jordan.emplace_back(p, jordan_invariant(l, p));

    std::vector<i64> g11s;
    for (i64 g11 = 2; g11 * g11 * g11 <= 2 * det2; g11 += 2) g11s.push_back(g11);
    std::vector<std::vector<GramLattice>> found(g11s.size());

    parallel_for(g11s.size(), worker_threads(), [&](std::size_t slice) {
        i64 g11 = g11s[slice];
        for (i64 g22 = g11; g11 * g22 * g22 <= 2 * det2; g22 += 2)
            for (i64 g12 = 0; 2 * g12 <= g11; ++g12) {
                i64 den = g11 * g22 - g12 * g12;
                if (den <= 0) continue;
                for (i64 g13 = 0; 2 * g13 <= g11; ++g13)
                    for (i64 g23 = -g22 / 2; 2 * g23 <= g22; ++g23) {
                        i64 num = det2 - 2 * g12 * g13 * g23 + g11 * g23 * g23 + g22 * g13 * g13;
                        if (num <= 0 || num % den) continue;
                        i64 g33 = num / den;
                        if (g33 < g22 || g33 % 2 || g11 * g22 * g33 > 2 * det2) continue;
                        Mat3 g;
                        g(0, 0) = g11;
                        g(1, 1) = g22;
                        g(2, 2) = g33;
                        g(0, 1) = g(1, 0) = g12;
                        g(0, 2) = g(2, 0) = g13;
                        g(1, 2) = g(2, 1) = g23;
                        GramLattice cand(g);
                        bool ok = true;
                        for (const auto& [p, inv] : ref_jordan)
                            if (jordan_invariant(cand, p) != inv) {
                                ok = false;
                                break;
                            }
                        if (ok && count_profile_2(cand, k2) == ref_profile)
                            found[slice].push_back(cand.canonical());
                    }
            }
    });

    std::map<GramKey, GramLattice> classes;
    for (const auto& slice : found)
        for (const auto& c : slice) classes.emplace(key_of(c), c);

    GenusDescriptor out{l, {}};
    for (auto& [k, c] : classes) out.classes.push_back(c);
    GramKey self = key_of(l.canonical());
    if (!classes.count(self))
        throw std::logic_error("enumerate_genus: representative not found by reduced enumeration");
    return out;
}

}  // namespace oddreg::genus
