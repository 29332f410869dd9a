#pragma once

#include <optional>
#include <string>
#include <vector>

#include "oddreg/forms.hpp"

namespace oddreg::regproof {

/// R(N,l,r) = {v in (Z/lZ)^3 : Q_N(v) = r (mod l)}.
struct RSet {
    forms::GramLattice n;
    i64 l, r;
    std::vector<Vec3> vectors;  // entries in [0,l), sorted

    bool contains(const Vec3& v) const;
};

RSet r_set(const forms::GramLattice& n, i64 l, i64 r);

/// R(K,N,l) = {T integral : T^t M_K T = l^2 M_N}.
struct TransformSet {
    forms::GramLattice k, n;
    i64 l;
    std::vector<Mat3> matrices;
};

TransformSet transform_set(const forms::GramLattice& k, const forms::GramLattice& n, i64 l);

/// Decision N prec_{l,r} K: every v in R(N,l,r) is good, i.e. some
/// T in R(K,N,l) has (1/l) T v integral.
struct PrecResult {
    forms::GramLattice n, k;
    i64 l, r;
    bool ok;
    RSet rset;
    std::vector<std::optional<Mat3>> witnesses;  // aligned with rset.vectors
    std::vector<Vec3> bad;                       // the non-good vectors
};

PrecResult check_prec(const forms::GramLattice& n, const forms::GramLattice& k, i64 l, i64 r);

/// One partition block P_i (or tilde block) with its matrix.
struct TrapPartition {
    std::vector<Vec3> vectors;  // mod l, all sign representatives listed
    Mat3 t;
};

/// Serializable certificate for the graph-trapping criterion.
struct TrapCertificate {
    forms::GramLattice n, k;
    i64 l, r;
    std::vector<TrapPartition> partitions;  // P_1..P_k with T_i
    std::vector<TrapPartition> tilde;       // tilde blocks with tilde T_j
    std::vector<i64> expected_exclusions;   // the g(z_i)

    std::string json() const;
    static TrapCertificate from_json(const std::string& text);
};

struct TrapVerdict {
    bool ok;
    std::string failure;            // human-readable reason when !ok
    std::vector<i64> exclusions;    // verified g(z_i), one per partition
    std::vector<Vec3> eigenvectors; // the z_i used
};

/// Full verification of a trap certificate: partition correctness,
/// T^t M_N T = l^2 M_N, infinite order of (1/l)T_i (symbolically, via the
/// characteristic polynomial), closure of every block over lifts mod l^2,
/// and the eigenvector exclusions g(z_i) = Q_N(z_i).
TrapVerdict check_trap(const TrapCertificate& cert);

/// Numeric cross-validation of a verified certificate up to nmax:
/// {n = r (mod l)} cap Q(N) minus the exclusion square-classes must lie
/// in Q(K). A counterexample throws logic_error (soundness bug).
struct TransferReport {
    bool ok;
    i64 bound;
    i64 checked;  // values of Q(N) in the progression that were tested
    std::vector<i64> exclusions;
    // members of each g*S in the progression and in Q(N), with a flag
    // telling whether K happens to represent them anyway
    std::vector<std::pair<i64, bool>> excluded_values;
};

TransferReport transfer_conclusion(const forms::GramLattice& n, const forms::GramLattice& k,
                                   i64 l, i64 r, const std::vector<i64>& exclusions, i64 nmax);
TransferReport transfer_conclusion(const PrecResult& prec, i64 nmax);
TransferReport transfer_conclusion(const TrapCertificate& cert, i64 nmax);

}  // namespace oddreg::regproof
