#include "oddreg/apbinary.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "oddreg/arith.hpp"

namespace oddreg::apbinary {
namespace {

using forms::BinaryForm;

i64 isqrt(i64 n) {
    if (n < 0) return -1;
    i64 r = (i64)std::sqrt((double)n);
    while (r > 0 && r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r;
}

bool is_square(i64 n, i64& root) {
    if (n < 0) return false;
    root = isqrt(n);
    return root * root == n;
}

void check_eta(int eta) {
    if (eta != 1 && eta != 3 && eta != 5 && eta != 7)
        throw std::invalid_argument("eta must be in {1,3,5,7}");
}

bool primitive(const BinaryForm& b) {
    return std::gcd(std::gcd(b.a, std::abs(b.b)), b.c) == 1;
}

/// A value of b coprime to 2 disc (exists for primitive forms).
i64 coprime_value(const BinaryForm& b) {
    i64 m = 2 * -b.disc();
    for (i64 s = 1; s <= m + 2; ++s)
        for (i64 x = 0; x <= s; ++x) {
            i64 y = s - x;
            for (i64 v : {b.eval(x, y), b.eval(x, -y)})
                if (std::gcd(v, m) == 1) return v;
        }
    throw std::logic_error("coprime_value: none found (form not primitive?)");
}

int chi_delta(i64 m) { return (m % 4 + 4) % 4 == 1 ? 1 : -1; }
int chi_eps(i64 m) {
    i64 r = (m % 8 + 8) % 8;
    return (r == 1 || r == 7) ? 1 : -1;
}

/// Odd classes mod 8 represented by x^2 + 2^k y^2 over Z_2, by exhaustive
/// search mod 2^(k+3) (one Hensel-stable digit past the square classes).
std::set<i64> local2_classes(int k) {
    int bits = std::min(k, 7) + 3;
    i64 m = i64{1} << bits;
    i64 t = k >= bits ? 0 : (i64{1} << k);
    std::vector<char> seen(m, 0);
    for (i64 x = 1; x < m; x += 2)
        for (i64 y = 0; y < m; ++y) seen[(x * x + t * y * y) % m] = 1;
    // a class eta mod 8 is represented iff every unit lift of it is
    std::set<i64> out;
    for (i64 eta : {1, 3, 5, 7}) {
        bool all = true;
        for (i64 u = eta; u < m; u += 8) all = all && seen[u];
        if (all) out.insert(eta);
    }
    return out;
}

}  // namespace

bool binary_represents(const BinaryForm& b, i64 n) {
    if (n < 0) throw std::invalid_argument("binary_represents: n must be nonnegative");
    if (n == 0) return true;
    const i64 d = -b.disc();  // 4ac - b^2 > 0
    // 4c * B(x,y) = (2cy + bx)^2 + d x^2, so x^2 <= 4cn/d
    const i64 xmax = isqrt(4 * b.c * n / d);
    for (i64 x = 0; x <= xmax; ++x) {
        i64 disc_y = 4 * b.c * n - d * x * x;
        i64 r;
        if (!is_square(disc_y, r)) continue;
        for (i64 num : {-b.b * x + r, -b.b * x - r})
            if (num % (2 * b.c) == 0) return true;
    }
    return false;
}

std::vector<BinaryForm> reduced_forms(i64 d) {
    if (d >= 0 || ((d % 4 + 4) % 4 != 0 && (d % 4 + 4) % 4 != 1))
        throw std::invalid_argument("reduced_forms: d must be negative, 0 or 1 mod 4");
    std::vector<BinaryForm> out;
    for (i64 a = 1; 3 * a * a <= -d; ++a)
        for (i64 bb = -a + 1; bb <= a; ++bb) {
            if (((bb - d) % 2 + 2) % 2 != 0) continue;
            i64 num = bb * bb - d;
            if (num % (4 * a) != 0) continue;
            i64 c = num / (4 * a);
            if (c < a) continue;
            if (a == c && bb < 0) continue;
            if (std::gcd(std::gcd(a, std::abs(bb)), c) != 1) continue;
            out.emplace_back(a, bb, c);
        }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<int> genus_characters(const BinaryForm& b) {
    if (!primitive(b)) throw std::invalid_argument("genus_characters: form must be primitive");
    const i64 d = b.disc();
    const i64 m = coprime_value(b);
    std::vector<int> out;
    i64 odd = -d;
    while (odd % 2 == 0) odd /= 2;
    for (i64 p = 3; p * p <= odd; p += 2)
        if (odd % p == 0) {
            out.push_back(arith::jacobi(m, p));
            while (odd % p == 0) odd /= p;
        }
    if (odd > 1) out.push_back(arith::jacobi(m, odd));
    if (d % 4 == 0) {
        i64 n = -d / 4;
        switch (n % 8) {
            case 1:
            case 5:
            case 4:
                out.push_back(chi_delta(m));
                break;
            case 2:
                out.push_back(chi_delta(m) * chi_eps(m));
                break;
            case 6:
                out.push_back(chi_eps(m));
                break;
            case 0:
                out.push_back(chi_delta(m));
                out.push_back(chi_eps(m));
                break;
            default:  // n = 3 (mod 4): no supplementary character
                break;
        }
    }
    return out;
}

std::vector<i64> represented_units(const BinaryForm& b, i64 m) {
    if (m <= 0) throw std::invalid_argument("represented_units: m must be positive");
    const i64 g = 2 * -b.disc();
    std::set<i64> vals;
    for (i64 x = 0; x < m; ++x)
        for (i64 y = 0; y < m; ++y) {
            i64 v = b.eval(x, y);
            if (std::gcd(v, g) == 1) vals.insert(((v % m) + m) % m);
        }
    return {vals.begin(), vals.end()};
}

int classes_in_genus(const BinaryForm& b) {
    if (!primitive(b)) throw std::invalid_argument("classes_in_genus: form must be primitive");
    const auto target = genus_characters(b);
    int count = 0;
    for (const BinaryForm& f : reduced_forms(b.disc()))
        if (genus_characters(f) == target) ++count;
    if (count == 0) throw std::logic_error("classes_in_genus: genus of b is empty");
    return count;
}

UniversalityCertificate is_P8_universal(const BinaryForm& b, int eta) {
    check_eta(eta);
    if (b.b != 0) throw std::invalid_argument("is_P8_universal: form must be diagonal");
    if (!primitive(b)) throw std::invalid_argument("is_P8_universal: form must be primitive");
    auto reject = [&](std::string reason) {
        UniversalityCertificate cert{b, eta, false, std::nullopt, std::move(reason)};
        for (std::size_t i = 1; i <= 100000; ++i) {
            i64 q = (i64)arith::ap_prime({eta, i});
            if (!binary_represents(b, q)) {
                cert.witness = q;
                return cert;
            }
        }
        throw std::logic_error("is_P8_universal: rejected form without witness");
    };
    if (b.odd_radical_of_disc() != 1) return reject("odd radical of disc must divide 8");
    // disc = -4 * 2^k, so the form is <1, 2^k>
    int k = arith::valuation(b.a * b.c, 2);
    if (classes_in_genus(b) != 1) return reject("more than one class in the genus");
    if (!local2_classes(k).count(eta)) return reject("class eta not represented over Z_2");
    // odd primes q with jacobi(disc, q) = -1 are anisotropic, hence missed;
    // for disc = -2^(k+2) the symbol depends only on eta mod 8
    int s = (eta == 1 || eta == 5) ? 1 : -1;  // jacobi(-1, q)
    if (k % 2 == 1) s *= (eta == 1 || eta == 7) ? 1 : -1;  // jacobi(2, q)
    if (s != 1) return reject("form anisotropic at the primes of P(8,eta)");
    // finitely many odd primes dividing disc, each checked directly
    // (empty when disc is a power of two)
    i64 odd = b.a * b.c;
    while (odd % 2 == 0) odd /= 2;
    for (i64 p = 3; p <= odd; p += 2)
        if (odd % p == 0 && p % 8 == eta && !binary_represents(b, p))
            return reject("ramified prime in P(8,eta) not represented");
    return {b, eta, true, std::nullopt, "genus of one class, locally universal on P(8,eta)"};
}

UniversalitySet universal_set(int eta, i64 disc_bound) {
    check_eta(eta);
    UniversalitySet out{eta, {}};
    for (i64 i = 1; i * i <= disc_bound; ++i)
        for (i64 j = i; i * j <= disc_bound; ++j) {
            if (std::gcd(i, j) != 1) continue;
            if (is_P8_universal(BinaryForm(i, j), eta).universal)
                out.members.emplace_back(i, j);
        }
    return out;
}

int xi_count(int eta, i64 i, i64 j, int w) {
    check_eta(eta);
    if (i <= 0 || j < i || w < 1) throw std::invalid_argument("xi_count: need 0 < i <= j, w >= 1");
    BinaryForm f(i, j);
    int n = 0;
    for (int k = 1; k <= w; ++k)
        if (binary_represents(f, (i64)arith::ap_prime({eta, (std::size_t)k}))) ++n;
    return n;
}

std::optional<int> PsiTable::xi(i64 i, i64 j) const {
    for (const XiEntry& e : entries)
        if (e.i == i && e.j == j) return e.xi;
    return std::nullopt;
}

std::string PsiTable::json() const {
    nlohmann::json j;
    j["eta"] = eta;
    j["u"] = u;
    j["v"] = v;
    j["w"] = w;
    j["psi"] = psi;
    auto& arr = j["xi"] = nlohmann::json::array();
    for (const XiEntry& e : entries) arr.push_back({e.i, e.j, e.xi});
    return j.dump();
}

std::string PsiTable::text() const {
    std::ostringstream os;
    os << "psi_" << eta << "(" << u << "," << v << ";" << w << ") = " << psi << "\n";
    os << "pairs with maximal xi:\n";
    for (const XiEntry& e : entries)
        if (e.xi == psi) os << "  <" << e.i << "," << e.j << ">  xi = " << e.xi << "\n";
    return os.str();
}

PsiTable psi(int eta, i64 u, i64 v, int w) {
    check_eta(eta);
    if (u < 1 || v < u || w < 1) throw std::invalid_argument("psi: need 1 <= u <= v, w >= 1");
    std::vector<i64> qs(w);
    for (int k = 1; k <= w; ++k) qs[k - 1] = (i64)arith::ap_prime({eta, (std::size_t)k});
    PsiTable table{eta, u, v, w, 0, {}};
    for (i64 i = 1; i <= u; ++i)
        for (i64 j = i; j <= v; ++j) {
            if (std::gcd(i, j) == 1 && is_P8_universal(BinaryForm(i, j), eta).universal) continue;
            table.entries.push_back({i, j, 0});
        }
    parallel_for(table.entries.size(), worker_threads(), [&](std::size_t idx) {
        XiEntry& e = table.entries[idx];
        BinaryForm f(e.i, e.j);
        for (i64 q : qs)
            if (binary_represents(f, q)) ++e.xi;
    });
    for (const XiEntry& e : table.entries) table.psi = std::max(table.psi, e.xi);
    return table;
}

}  // namespace oddreg::apbinary
