#pragma once

#include <optional>
#include <string>

#include "oddreg/common.hpp"

namespace oddreg::forms {

/// Primitive positive diagonal ternary form <a,b,c>, stored sorted a<=b<=c.
struct DiagonalForm {
    i64 a, b, c;

    DiagonalForm(i64 a_, i64 b_, i64 c_);
    bool operator==(const DiagonalForm&) const = default;
    auto operator<=>(const DiagonalForm&) const = default;

    i64 disc() const { return a * b * c; }
    std::string str() const;
};

/// Ternary lattice stored as a doubled Gram matrix G = 2B: symmetric,
/// even positive diagonal, positive definite, norm ideal Z. The quadratic
/// form is Q(x) = x^T G x / 2; half-integral scale lattices have odd
/// off-diagonal entries in G.
class GramLattice {
  public:
    explicit GramLattice(const Mat3& doubled_gram);
    GramLattice(const DiagonalForm& f);

    const Mat3& gram2() const { return g_; }
    i64 q(const Vec3& v) const;        // Q(v)
    i64 b2(const Vec3& v, const Vec3& w) const;  // 2B(v,w) = v^T G w

    /// det(G); disc(L) = det(G)/8 (a positive rational in general).
    i64 det2() const { return g_.det(); }
    bool disc_is_integral() const { return det2() % 8 == 0; }
    i64 disc() const;  // throws if non-integral
    bool half_integral_scale() const;

    /// Change of basis: columns of U are the new basis vectors.
    GramLattice transformed(const Mat3& u) const;

    /// Deterministic canonical representative of the isometry class
    /// (Minkowski-reduced, ties broken by lexicographic minimality).
    GramLattice canonical() const;

    /// Successive minima m1 <= m2 <= m3.
    std::array<i64, 3> minima() const;

    std::optional<DiagonalForm> as_diagonal() const;  // of the canonical form

    bool operator==(const GramLattice& o) const { return g_ == o.g_; }
    std::string str() const;  // "g11,g22,g33,g12,g13,g23" doubled-Gram encoding

  private:
    Mat3 g_;
};

bool is_isometric(const GramLattice& l, const GramLattice& m);

/// All vectors v (one per +-v pair) with Q(v) == value.
std::vector<Vec3> vectors_of_norm(const GramLattice& l, i64 value);

/// All vectors with Q(v) <= bound, one per +-v pair, excluding 0.
std::vector<Vec3> vectors_up_to(const GramLattice& l, i64 bound);

/// Integral representation K -> L: X with X^T G_L X = G_K, if one exists.
std::optional<Mat3> represent_lattice(const GramLattice& l, const GramLattice& k);

/// Positive definite primitive binary form a x^2 + b xy + c y^2.
struct BinaryForm {
    i64 a, b, c;

    BinaryForm(i64 a_, i64 b_, i64 c_);          // general
    BinaryForm(i64 i, i64 j) : BinaryForm(i, 0, j) {}  // diagonal <i,j>

    bool operator==(const BinaryForm&) const = default;
    auto operator<=>(const BinaryForm&) const = default;

    i64 disc() const { return b * b - 4 * a * c; }  // D < 0
    i64 eval(i64 x, i64 y) const { return a * x * x + b * x * y + c * y * y; }
    /// Product of the odd prime divisors of disc().
    i64 odd_radical_of_disc() const;
    std::string str() const;
};

/// Parses "a,b,c" (diagonal, as a GramLattice) or six doubled-Gram entries
/// "g11,g22,g33,g12,g13,g23".
GramLattice parse_form(const std::string& text);

}  // namespace oddreg::forms
