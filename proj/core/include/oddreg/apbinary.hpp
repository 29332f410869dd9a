#pragma once

#include <optional>
#include <string>
#include <vector>

#include "oddreg/forms.hpp"

namespace oddreg::apbinary {

/// Exact representation test n = B(x, y) by exhaustive search over the
/// finite ellipse {B <= n}. Throws on negative n.
bool binary_represents(const forms::BinaryForm& b, i64 n);

/// All reduced primitive forms (a, b, c) of discriminant d < 0:
/// |b| <= a <= c, b = d (mod 2), with b >= 0 when |b| = a or a = c.
std::vector<forms::BinaryForm> reduced_forms(i64 d);

/// Assigned genus characters of a primitive form, evaluated on a
/// represented value coprime to 2 disc: one entry per odd prime divisor
/// of the discriminant, then the supplementary characters delta and/or
/// epsilon as dictated by disc mod 32.
std::vector<int> genus_characters(const forms::BinaryForm& b);

/// Residues mod m of the values of b coprime to 2 disc: the slow genus
/// fingerprint (m = 8|disc|) that genus_characters is validated against.
std::vector<i64> represented_units(const forms::BinaryForm& b, i64 m);

/// Number of classes of primitive forms of discriminant disc(b) in the
/// genus of b. Requires b primitive.
int classes_in_genus(const forms::BinaryForm& b);

/// Decision certificate for P(8,eta)-universality of a diagonal form.
struct UniversalityCertificate {
    forms::BinaryForm form;
    int eta;
    bool universal;
    std::optional<i64> witness;  // a prime of P(8,eta) not represented
    std::string reason;
};

/// Exact decision for diagonal primitive b: necessary gates (odd radical
/// of the discriminant is 1, one class in the genus), then local
/// representability of the class eta mod 8 at the primes dividing 2 disc.
UniversalityCertificate is_P8_universal(const forms::BinaryForm& b, int eta);

/// All P(8,eta)-universal diagonal forms <i,j> with i <= j, i*j <= disc_bound.
struct UniversalitySet {
    int eta;
    std::vector<forms::BinaryForm> members;
};

UniversalitySet universal_set(int eta, i64 disc_bound = 1024);

/// xi_eta(i,j;w) = #{k <= w : q_{eta,k} represented by <i,j>}.
int xi_count(int eta, i64 i, i64 j, int w);

struct XiEntry {
    i64 i, j;
    int xi;
};

/// psi_eta(u,v;w) = max xi over 1 <= i <= u, i <= j <= v, <i,j> not in
/// U(8,eta); entries holds every admissible pair.
struct PsiTable {
    int eta;
    i64 u, v;
    int w;
    int psi;
    std::vector<XiEntry> entries;

    std::optional<int> xi(i64 i, i64 j) const;
    std::string json() const;
    std::string text() const;  // aligned summary table
};

PsiTable psi(int eta, i64 u, i64 v, int w);

}  // namespace oddreg::apbinary
