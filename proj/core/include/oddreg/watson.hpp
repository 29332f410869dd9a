#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "oddreg/forms.hpp"

namespace oddreg::watson {

/// Watson sublattice Lambda_m(L) = {x in L : Q(x) = 0 and 2B(x, L) = 0 mod m},
/// m in {2, odd prime}; result may be non-primitive.
forms::GramLattice big_lambda(const forms::GramLattice& l, i64 m);

/// Generator of the norm ideal n(L): gcd of the Q-values and bilinear forms
/// over a basis.
i64 norm_ideal(const forms::GramLattice& l);

/// lambda_m(L): big_lambda rescaled to norm ideal Z, canonically reduced.
forms::GramLattice lambda(const forms::GramLattice& l, i64 m);

/// Chain of lambda_p steps from a diagonal form down to a stable one.
struct ReductionChain {
    forms::DiagonalForm start;
    std::vector<std::pair<i64, forms::DiagonalForm>> steps;
    forms::DiagonalForm terminal;
    // set when a failing prime has an isotropic unimodular component, so the
    // descent lemma's hypothesis does not apply ("reduction blocked")
    std::optional<i64> blocked_at;
};

ReductionChain reduce_to_stable(const forms::DiagonalForm& f);

/// One missing-prime candidate variant and its bounded-regularity verdict.
enum class VariantType { i, ii };  // (i): <a, l^2 b, l^2 c>; (ii): <a, b, l^2 c>

struct MissingPrimeVerdict {
    i64 l;
    forms::DiagonalForm base;
    VariantType type;
    forms::DiagonalForm variant;
    std::optional<i64> exception;  // smallest odd genus-represented miss
    i64 bound;
};

/// For each prime l in [lmin, lmax] and each stable base, builds the type-(i)
/// variant and, when jacobi(-ab, l) = -1, the type-(ii) variant, and runs the
/// bounded odd-regularity check up to `bound`.
std::vector<MissingPrimeVerdict> missing_prime_scan(
    const std::vector<forms::DiagonalForm>& bases, i64 lmin, i64 lmax, i64 bound,
    std::optional<VariantType> only = std::nullopt);

/// The analytic counting contradiction for type-(i) variants at prime l:
/// lower bound on genus-represented residues vs. the representation cap.
struct CountingGate {
    i64 l;
    i64 lower;  // ceil(l - (2l/9 + 2 + 3l/25 + 3 + (l+1)/2))
    i64 upper;  // [sqrt(2l) + 1/2]
    bool contradiction;
};

CountingGate counting_gate(i64 l);

/// Per-prime cap on locally-missed residues: (p+1)/2 * ceil(l / p^2) for odd
/// p != l, and (l+1)/2 at p = l.
i64 local_bad_bound(i64 p, i64 l);

}  // namespace oddreg::watson
