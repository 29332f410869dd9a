#pragma once

#include <vector>

#include "oddreg/forms.hpp"

namespace oddreg::genus {

/// A genus: the representative plus the full list of isometry classes
/// (canonical doubled Grams, sorted), as found by reduced enumeration.
struct GenusDescriptor {
    forms::GramLattice representative;
    std::vector<forms::GramLattice> classes;  // canonical, sorted
    int h() const { return static_cast<int>(classes.size()); }
};

/// Histogram of Q(x) mod 2^k over (Z/2^k)^3, computed by 2-adic block
/// diagonalization and convolution (exact; never enumerates 2^{3k} points).
std::vector<u64> count_profile_2(const forms::GramLattice& l, int k);

/// Z_p-equivalence at every prime: equal determinant, matching odd-p Jordan
/// invariants, and identical representation counts mod 2^k for k up to
/// ord_2(4 * det2).
bool same_genus(const forms::GramLattice& l, const forms::GramLattice& m);

/// All isometry classes in gen(L), by exhaustive Minkowski-reduced
/// enumeration at the target determinant. Refuses when det2/8 exceeds
/// disc_cap.
GenusDescriptor enumerate_genus(const forms::GramLattice& l, i64 disc_cap = 10000);

}  // namespace oddreg::genus
