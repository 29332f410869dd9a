#include "oddreg/arith.hpp"

#include <algorithm>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>

namespace oddreg::arith {

using boost::multiprecision::cpp_int;

i64 gcd(i64 a, i64 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b) {
        i64 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

int valuation(i64 n, i64 p) {
    if (n == 0) throw std::invalid_argument("valuation of 0");
    if (n < 0) n = -n;
    int v = 0;
    while (n % p == 0) {
        n /= p;
        ++v;
    }
    return v;
}

int jacobi(i64 a, i64 n) {
    if (n <= 0 || n % 2 == 0) throw std::invalid_argument("jacobi: n must be odd positive");
    a %= n;
    if (a < 0) a += n;
    int result = 1;
    while (a != 0) {
        while (a % 2 == 0) {
            a /= 2;
            i64 r = n % 8;
            if (r == 3 || r == 5) result = -result;
        }
        std::swap(a, n);
        if (a % 4 == 3 && n % 4 == 3) result = -result;
        a %= n;
    }
    return n == 1 ? result : 0;
}

u64 mul_mod(u64 a, u64 b, u64 m) { return static_cast<u64>((unsigned __int128)a * b % m); }

u64 pow_mod(u64 a, u64 e, u64 m) {
    u64 r = 1;
    a %= m;
    while (e) {
        if (e & 1) r = mul_mod(r, a, m);
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    return r;
}

u64 inv_mod(u64 a, u64 m) {
    i64 t = 0, nt = 1;
    i64 r = static_cast<i64>(m), nr = static_cast<i64>(a % m);
    while (nr != 0) {
        i64 q = r / nr;
        std::swap(t -= q * nt, nt);
        std::swap(r -= q * nr, nr);
    }
    if (r != 1) throw std::invalid_argument("inv_mod: not invertible");
    return static_cast<u64>(t < 0 ? t + static_cast<i64>(m) : t);
}

bool is_prime(u64 n) {
    if (n < 2) return false;
    for (u64 p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (n % p == 0) return n == p;
    }
    u64 d = n - 1;
    int s = 0;
    while (d % 2 == 0) {
        d /= 2;
        ++s;
    }
    // Deterministic witness set for all 64-bit inputs.
    for (u64 a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        u64 x = pow_mod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int i = 1; i < s; ++i) {
            x = mul_mod(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

void PrimeSieve::grow_to_limit(u64 n) {
    if (n <= sieved_to_) return;
    u64 lo = sieved_to_ + 1;
    u64 hi = std::max<u64>(n, sieved_to_ * 2 + 1000);
    // small primes needed for marking
    u64 root = static_cast<u64>(std::sqrt(static_cast<double>(hi))) + 2;
    if (primes_.empty() || primes_.back() < root) {
        // bootstrap by simple sieve up to root
        std::vector<bool> comp(root + 1, false);
        primes_.clear();
        for (u64 p = 2; p <= root; ++p) {
            if (!comp[p]) {
                primes_.push_back(p);
                for (u64 q = p * p; q <= root; q += p) comp[q] = true;
            }
        }
        lo = root + 1;
        if (lo <= sieved_to_) lo = sieved_to_ + 1;
        sieved_to_ = root;
        if (hi <= sieved_to_) return;
    }
    std::vector<bool> comp(hi - lo + 1, false);
    for (u64 p : primes_) {
        if (p * p > hi) break;
        u64 start = std::max(p * p, ((lo + p - 1) / p) * p);
        for (u64 q = start; q <= hi; q += p) comp[q - lo] = true;
    }
    for (u64 x = lo; x <= hi; ++x)
        if (!comp[x - lo]) primes_.push_back(x);
    sieved_to_ = hi;
}

void PrimeSieve::grow_to_count(std::size_t n) {
    while (primes_.size() < n) {
        double est = primes_.empty() ? 100.0 : static_cast<double>(primes_.back());
        u64 target = static_cast<u64>(std::max(est * 2, 1000.0));
        grow_to_limit(target);
    }
}

u64 PrimeSieve::prime(std::size_t i) {
    std::lock_guard<std::mutex> lk(mu_);
    grow_to_count(i);
    return primes_[i - 1];
}

std::vector<u64> PrimeSieve::primes_up_to(u64 n) {
    std::lock_guard<std::mutex> lk(mu_);
    grow_to_limit(n);
    auto it = std::upper_bound(primes_.begin(), primes_.end(), n);
    return std::vector<u64>(primes_.begin(), it);
}

PrimeSieve& sieve() {
    static PrimeSieve s;
    return s;
}

APClass::APClass(i64 u_, i64 v_) : u(u_), v(v_) {
    if (u <= 0 || v < 0 || gcd(u, v) != 1) throw std::invalid_argument("APClass: need gcd(u,v)=1");
    if (u % 2 == 1) {
        if (v % 2 == 1) {
            u = 2 * u_;
        } else {
            u = 2 * u_;
            v = u_ + v_;
        }
    }
}

u64 ap_prime(PrimeIndex idx) {
    if (idx.i < 1 || (idx.eta != 1 && idx.eta != 3 && idx.eta != 5 && idx.eta != 7))
        throw std::invalid_argument("ap_prime: eta in {1,3,5,7}, i >= 1");
    // Walk the shared stream; cheap relative to everything downstream.
    std::size_t found = 0;
    for (std::size_t k = 1;; ++k) {
        u64 p = sieve().prime(k);
        if (p % 8 == static_cast<u64>(idx.eta)) {
            if (++found == idx.i) return p;
        }
    }
}

int smallest_w(const std::vector<i64>& N_factors, int delta) {
    cpp_int N = 1;
    for (i64 f : N_factors) N *= f;
    int lo = std::max(4, 2 * delta);
    for (int w = lo + 1;; ++w) {
        cpp_int prod = 1;
        for (int k = 2 * delta + 1; k <= w; ++k) prod *= sieve().odd_prime(k);
        cpp_int rhs = N;
        if (delta > 0) {
            cpp_int base = cpp_int(w + 1) << (w + 1);
            for (int j = 0; j < delta; ++j) rhs *= base;
        }
        if (prod > rhs) return w;
    }
}

int smallest_w(i64 N, int delta) { return smallest_w(std::vector<i64>{N}, delta); }

i64 coprime_shift(i64 u, i64 v, const std::vector<i64>& primes) {
    if (primes.size() < 2) throw std::invalid_argument("coprime_shift: need s >= 2");
    i64 prod = 1;
    for (std::size_t i = 0; i < primes.size(); ++i) {
        i64 p = primes[i];
        if (p <= 2 || !is_prime(static_cast<u64>(p))) throw std::invalid_argument("coprime_shift: odd primes only");
        if (i > 0 && primes[i - 1] >= p) throw std::invalid_argument("coprime_shift: primes must be increasing");
        prod *= p;
    }
    if (gcd(u, prod) != 1) throw std::invalid_argument("coprime_shift: gcd(u, p_1...p_s) must be 1");
    i64 bound = static_cast<i64>(primes.size() + 2) << (primes.size() - 1);
    for (i64 n = 0; n < bound; ++n) {
        if (gcd(u * n + v, prod) == 1) return n;
    }
    throw std::logic_error("coprime_shift: bound exceeded");
}

}  // namespace oddreg::arith
