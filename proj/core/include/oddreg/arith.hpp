#pragma once

#include <mutex>
#include <optional>

#include "oddreg/common.hpp"

namespace oddreg::arith {

/// Jacobi symbol (a/n) for odd positive n; 0 when gcd(a,n) > 1.
/// Throws std::invalid_argument when n is even or nonpositive.
int jacobi(i64 a, i64 n);

/// Deterministic Miller-Rabin for 64-bit inputs.
bool is_prime(u64 n);

i64 gcd(i64 a, i64 b);

/// ord_p(n) for n != 0.
int valuation(i64 n, i64 p);

/// a^-1 mod m (gcd(a,m)=1).
u64 inv_mod(u64 a, u64 m);

u64 mul_mod(u64 a, u64 b, u64 m);
u64 pow_mod(u64 a, u64 e, u64 m);

/// Shared, growable prime stream backed by a segmented sieve.
/// All accessors are safe for concurrent callers.
class PrimeSieve {
  public:
    /// i-th prime overall, 1-based (prime(1) == 2).
    u64 prime(std::size_t i);
    /// k-th odd prime, 1-based (odd_prime(1) == 3).
    u64 odd_prime(std::size_t k) { return prime(k + 1); }
    /// All primes <= n.
    std::vector<u64> primes_up_to(u64 n);

  private:
    void grow_to_count(std::size_t n);
    void grow_to_limit(u64 n);

    std::mutex mu_;
    std::vector<u64> primes_;
    u64 sieved_to_ = 1;
};

/// Process-wide sieve instance.
PrimeSieve& sieve();

/// An arithmetic progression {un+v} with gcd(u,v)=1, normalized so that
/// u is even and v odd (for odd u: (u,v) -> (2u,v) or (2u,u+v)).
struct APClass {
    i64 u, v;
    APClass(i64 u_, i64 v_);
};

struct PrimeIndex {
    int eta;        // residue in {1,3,5,7}
    std::size_t i;  // 1-based index
};

/// The i-th prime congruent to eta (mod 8).
u64 ap_prime(PrimeIndex idx);

/// Least w > max(4, 2*delta) with q_{2d+1}...q_w > N * ((w+1)*2^(w+1))^delta,
/// where q_k is the k-th odd prime. Products are exact (arbitrary precision).
int smallest_w(const std::vector<i64>& N_factors, int delta);
int smallest_w(i64 N, int delta);

/// Least n >= 0 with gcd(u*n+v, p_1...p_s) = 1 for odd primes p_1<...<p_s,
/// s >= 2, gcd(u, p_1...p_s) = 1. The result is < (s+2)*2^(s-1).
i64 coprime_shift(i64 u, i64 v, const std::vector<i64>& primes);

}  // namespace oddreg::arith
