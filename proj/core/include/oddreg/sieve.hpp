#pragma once

#include <optional>
#include <string>
#include <vector>

#include "oddreg/forms.hpp"

namespace oddreg::sieve {

/// Exact membership bitset for Q(L) over [0, N].
struct RepSet {
    forms::GramLattice form;
    i64 bound = 0;
    std::vector<u64> bits;

    bool contains(i64 n) const {
        return n >= 0 && n <= bound && (bits[n >> 6] >> (n & 63)) & 1;
    }
};

/// Exhaustive ellipsoid enumeration of Q(L) up to N. Refuses when the bitset
/// would exceed mem_cap_bytes.
RepSet rep_set(const forms::GramLattice& l, i64 n,
               i64 mem_cap_bytes = i64{2} << 30);

/// The three bounded-regularity progressions S_{d,a}.
enum class Mode { odd, even, full };

Mode parse_mode(const std::string& s);
std::string mode_name(Mode m);

struct RegularityReport {
    forms::GramLattice form;
    Mode mode = Mode::full;
    i64 bound = 0;
    std::vector<i64> exceptions;     // genus-represented, not represented
    bool genus_condition_met = false;  // progression meets Q(gen(L))
    double wall_time = 0.0;            // seconds

    std::string json() const;
};

RegularityReport verify_regularity(const forms::GramLattice& l, Mode mode, i64 n);

struct ChainReport {
    bool ok = false;
    std::optional<i64> counterexample;  // odd value breaking an inclusion
    std::optional<Mat3> embedding;      // X with X^T G_L X = G_K, when one exists
    std::string detail;
};

/// Checks the odd-value chain Q(M) subset Q(K) subset Q(L) up to N, plus the
/// square-discriminant-ratio condition any lattice chain needs; reports an
/// integral embedding of K into L when one exists.
ChainReport chain_check(const forms::GramLattice& m, const forms::GramLattice& k,
                        const forms::GramLattice& l, i64 n);

/// The three diagonal odd-universal forms represent every odd value up to N.
bool kaplansky_check(i64 n);

}  // namespace oddreg::sieve
