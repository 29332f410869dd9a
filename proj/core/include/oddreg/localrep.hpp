#pragma once

#include <map>
#include <memory>
#include <optional>
#include <unordered_map>

#include "oddreg/forms.hpp"

namespace oddreg::localrep {

/// Verdict of n -> L over Z_p with a witnessing residue vector.
struct LocalReport {
    i64 p = 0;
    i64 n = 0;
    bool represented = false;
    Vec3 witness{};      // satisfies Q(witness) == n (mod modulus) when represented
    i64 modulus = 0;     // deciding prime power
    std::string obstruction;  // set when not represented
};

/// Odd primes at which the form is anisotropic, with mod-8 splits.
struct AnisotropySet {
    std::vector<i64> primes;                 // sorted
    std::array<std::vector<i64>, 4> by_eta;  // eta = 1,3,5,7 -> index (eta-1)/2
    std::size_t t() const { return primes.size(); }
    std::size_t t_eta(int eta) const { return by_eta[(eta - 1) / 2].size(); }
};

/// One rank-1 component of an odd-p diagonalization: scale exponent and the
/// Legendre character of the unit.
struct OddJordanEntry {
    int scale;
    int chi;  // jacobi(unit, p)
};

/// Diagonalizes the doubled Gram over Z_p (p odd); entries sorted by scale.
std::vector<OddJordanEntry> odd_jordan(const forms::GramLattice& l, i64 p);

/// n -> L over Z_p, decided by Hensel-pruned residue lifting.
LocalReport represents_locally(const forms::GramLattice& l, i64 p, i64 n);

/// n -> gen(L): local representability at every prime dividing 2*disc.
bool represents_genus(const forms::GramLattice& l, i64 n);

/// {2} together with the odd primes dividing det of the doubled Gram.
std::vector<i64> relevant_primes(const forms::GramLattice& l);

AnisotropySet anisotropic_primes(const forms::GramLattice& l);

/// p-stability of a diagonal form; without p, tests all odd primes dividing
/// the discriminant.
bool is_stable(const forms::DiagonalForm& f, std::optional<i64> p = std::nullopt);

/// The set of alpha in {1,3,5,7} with 8n+alpha -> L over Z_2 for all n.
std::vector<int> odd_profile(const forms::DiagonalForm& f);

/// Constructive residue g: 0 <= g < p^2, ord_p(8g+w) <= 1, 8g+w represented
/// by the form over Z_p but not by its binary part with the p-free pair.
i64 lembound1_g(const forms::DiagonalForm& f, i64 w, i64 p);

/// Per-lattice cache of local verdicts; share one instance across the many
/// queries a sieve run makes. Not thread-safe: use one instance per thread
/// or serialize access externally.
class LocalCache {
  public:
    explicit LocalCache(const forms::GramLattice& l);

    bool represents(i64 p, i64 n);
    bool represents_genus(i64 n);
    const forms::GramLattice& lattice() const { return l_; }

  private:
    struct PrimeCtx {
        i64 p;
        int jmax = 0;
        i64 mod = 0;  // p^jmax
        std::array<int, 3> scales{};  // odd p: diagonalized scale exponents
        std::array<int, 3> chis{};    // odd p: unit characters
        std::optional<std::array<i64, 3>> diag;  // p=2, diagonal lattice: Q-coefficients
        std::unordered_map<i64, char> prim;  // p=2, non-diagonal: n mod 2^jmax -> verdict
    };
    bool prim(PrimeCtx& ctx, i64 nred);

    forms::GramLattice l_;
    std::vector<PrimeCtx> ctxs_;
};

/// Process-wide shared cache for a lattice (keyed by the doubled Gram).
std::shared_ptr<LocalCache> shared_cache(const forms::GramLattice& l);

}  // namespace oddreg::localrep
