#include "oddreg/forms.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "oddreg/arith.hpp"

namespace oddreg::forms {

namespace {

/// Lexicographic key preferring small diagonals, then off-diagonals close to
/// zero; makes the canonical Gram diagonal whenever a minima basis is.
std::array<i64, 9> gram_key(const Mat3& g) {
    return {g(0, 0), g(1, 1), g(2, 2),
            std::abs(g(0, 1)), std::abs(g(0, 2)), std::abs(g(1, 2)),
            g(0, 1), g(0, 2), g(1, 2)};
}

Mat3 basis_mat(const Vec3& v1, const Vec3& v2, const Vec3& v3) {
    Mat3 u;
    for (int r = 0; r < 3; ++r) {
        u(r, 0) = v1[r];
        u(r, 1) = v2[r];
        u(r, 2) = v3[r];
    }
    return u;
}

}  // namespace

DiagonalForm::DiagonalForm(i64 a_, i64 b_, i64 c_) : a(a_), b(b_), c(c_) {
    if (a <= 0 || b <= 0 || c <= 0) throw std::invalid_argument("DiagonalForm: coefficients must be positive");
    if (a > b) std::swap(a, b);
    if (b > c) std::swap(b, c);
    if (a > b) std::swap(a, b);
    if (arith::gcd(arith::gcd(a, b), c) != 1) throw std::invalid_argument("DiagonalForm: must be primitive");
}

std::string DiagonalForm::str() const {
    std::ostringstream os;
    os << a << ',' << b << ',' << c;
    return os.str();
}

GramLattice::GramLattice(const Mat3& g) : g_(g) {
    for (int r = 0; r < 3; ++r) {
        if (g_(r, r) <= 0 || g_(r, r) % 2 != 0)
            throw std::invalid_argument("GramLattice: diagonal must be positive even");
        for (int c = r + 1; c < 3; ++c)
            if (g_(r, c) != g_(c, r)) throw std::invalid_argument("GramLattice: matrix must be symmetric");
    }
    i64 m2 = g_(0, 0) * g_(1, 1) - g_(0, 1) * g_(0, 1);
    if (m2 <= 0 || g_.det() <= 0) throw std::invalid_argument("GramLattice: matrix must be positive definite");
}

GramLattice::GramLattice(const DiagonalForm& f)
    : GramLattice(Mat3::diag(2 * f.a, 2 * f.b, 2 * f.c)) {}

i64 GramLattice::q(const Vec3& v) const {
    i64 s = 0;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) s += g_(r, c) * v[r] * v[c];
    return s / 2;
}

i64 GramLattice::b2(const Vec3& v, const Vec3& w) const {
    i64 s = 0;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) s += g_(r, c) * v[r] * w[c];
    return s;
}

i64 GramLattice::disc() const {
    if (!disc_is_integral()) throw std::logic_error("disc: lattice has half-integral scale");
    return det2() / 8;
}

bool GramLattice::half_integral_scale() const {
    return g_(0, 1) % 2 != 0 || g_(0, 2) % 2 != 0 || g_(1, 2) % 2 != 0;
}

GramLattice GramLattice::transformed(const Mat3& u) const {
    i64 d = u.det();
    if (d != 1 && d != -1) throw std::invalid_argument("transformed: U must be unimodular");
    return GramLattice(u.transposed() * g_ * u);
}

std::vector<Vec3> vectors_up_to(const GramLattice& l, i64 bound) {
    std::vector<Vec3> out;
    if (bound <= 0) return out;
    const Mat3& g = l.gram2();
    // Cholesky of Q = G/2 in long double: Q(x) = sum d_i (x_i + sum_{k>i} u_ik x_k)^2.
    long double a[3][3];
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) a[r][c] = static_cast<long double>(g(r, c)) / 2.0L;
    long double d[3], u01, u02, u12;
    d[0] = a[0][0];
    u01 = a[0][1] / d[0];
    u02 = a[0][2] / d[0];
    d[1] = a[1][1] - d[0] * u01 * u01;
    u12 = (a[1][2] - d[0] * u01 * u02) / d[1];
    d[2] = a[2][2] - d[0] * u02 * u02 - d[1] * u12 * u12;

    const long double B = static_cast<long double>(bound) * (1 + 1e-12L) + 1e-9L;
    i64 z_hi = static_cast<i64>(std::floor(std::sqrt(B / d[2]))) + 1;
    for (i64 z = 0; z <= z_hi; ++z) {
        long double rz = B - d[2] * z * z;
        if (rz < 0) continue;
        long double cy = -u12 * z;
        long double wy = std::sqrt(rz / d[1]);
        i64 y_lo = static_cast<i64>(std::ceil(cy - wy)) - 1;
        i64 y_hi = static_cast<i64>(std::floor(cy + wy)) + 1;
        for (i64 y = y_lo; y <= y_hi; ++y) {
            long double ty = y - cy;
            long double rx = rz - d[1] * ty * ty;
            if (rx < 0) continue;
            long double cx = -u01 * y - u02 * z;
            long double wx = std::sqrt(rx / d[0]);
            i64 x_lo = static_cast<i64>(std::ceil(cx - wx)) - 1;
            i64 x_hi = static_cast<i64>(std::floor(cx + wx)) + 1;
            for (i64 x = x_lo; x <= x_hi; ++x) {
                if (z == 0 && (y < 0 || (y == 0 && x <= 0))) continue;  // one per +-pair
                Vec3 v{x, y, z};
                if (l.q(v) <= bound) out.push_back(v);
            }
        }
    }
    return out;
}

std::vector<Vec3> vectors_of_norm(const GramLattice& l, i64 value) {
    std::vector<Vec3> out;
    for (const Vec3& v : vectors_up_to(l, value))
        if (l.q(v) == value) out.push_back(v);
    return out;
}

std::array<i64, 3> GramLattice::minima() const {
    // The standard basis vectors are independent with Q(e_i) = g_ii/2, so
    // m3 <= max_i g_ii/2 and enumerating up to that bound suffices.
    i64 bound = std::max({g_(0, 0), g_(1, 1), g_(2, 2)}) / 2;
    auto vecs = vectors_up_to(*this, bound);
    std::sort(vecs.begin(), vecs.end(),
              [this](const Vec3& v, const Vec3& w) { return q(v) < q(w); });
    std::array<i64, 3> m{};
    std::vector<Vec3> picked;
    for (const Vec3& v : vecs) {
        if (picked.size() == 1) {
            // independent from picked[0]?
            const Vec3& p = picked[0];
            if (p[0] * v[1] == p[1] * v[0] && p[0] * v[2] == p[2] * v[0] &&
                p[1] * v[2] == p[2] * v[1])
                continue;
        } else if (picked.size() == 2) {
            if (basis_mat(picked[0], picked[1], v).det() == 0) continue;
        }
        m[picked.size()] = q(v);
        picked.push_back(v);
        if (picked.size() == 3) return m;
    }
    throw std::logic_error("minima: rank deficiency");
}

GramLattice GramLattice::canonical() const {
    auto m = minima();
    auto c1 = vectors_of_norm(*this, m[0]);
    auto c2 = m[1] == m[0] ? c1 : vectors_of_norm(*this, m[1]);
    auto c3 = m[2] == m[1] ? c2 : vectors_of_norm(*this, m[2]);
    // Include both signs: off-diagonal entries depend on orientation.
    auto with_signs = [](std::vector<Vec3> v) {
        std::size_t n = v.size();
        for (std::size_t i = 0; i < n; ++i) v.push_back({-v[i][0], -v[i][1], -v[i][2]});
        return v;
    };
    c1 = with_signs(std::move(c1));
    c2 = with_signs(std::move(c2));
    c3 = with_signs(std::move(c3));

    bool found = false;
    Mat3 best{};
    std::array<i64, 9> best_key{};
    for (const Vec3& v1 : c1)
        for (const Vec3& v2 : c2)
            for (const Vec3& v3 : c3) {
                Mat3 u = basis_mat(v1, v2, v3);
                i64 d = u.det();
                if (d != 1 && d != -1) continue;
                Mat3 g = u.transposed() * g_ * u;
                auto key = gram_key(g);
                if (!found || key < best_key) {
                    found = true;
                    best = g;
                    best_key = key;
                }
            }
    if (!found)
        // In rank 3 some successive-minima system always extends to a basis.
        throw std::logic_error("canonical: no unimodular minima basis");
    return GramLattice(best);
}

std::optional<DiagonalForm> GramLattice::as_diagonal() const {
    GramLattice c = canonical();
    const Mat3& g = c.gram2();
    if (g(0, 1) != 0 || g(0, 2) != 0 || g(1, 2) != 0) return std::nullopt;
    i64 a = g(0, 0) / 2, b = g(1, 1) / 2, cc = g(2, 2) / 2;
    if (arith::gcd(arith::gcd(a, b), cc) != 1) return std::nullopt;
    return DiagonalForm(a, b, cc);
}

std::string GramLattice::str() const {
    std::ostringstream os;
    os << g_(0, 0) << ',' << g_(1, 1) << ',' << g_(2, 2) << ',' << g_(0, 1) << ','
       << g_(0, 2) << ',' << g_(1, 2);
    return os.str();
}

bool is_isometric(const GramLattice& l, const GramLattice& m) {
    if (l.det2() != m.det2()) return false;
    return l.canonical().gram2() == m.canonical().gram2();
}

std::optional<Mat3> represent_lattice(const GramLattice& l, const GramLattice& k) {
    const Mat3& gk = k.gram2();
    auto with_signs = [](std::vector<Vec3> v) {
        std::size_t n = v.size();
        for (std::size_t i = 0; i < n; ++i) v.push_back({-v[i][0], -v[i][1], -v[i][2]});
        return v;
    };
    auto c1 = with_signs(vectors_of_norm(l, gk(0, 0) / 2));
    auto c2 = with_signs(vectors_of_norm(l, gk(1, 1) / 2));
    auto c3 = with_signs(vectors_of_norm(l, gk(2, 2) / 2));
    for (const Vec3& x1 : c1)
        for (const Vec3& x2 : c2) {
            if (l.b2(x1, x2) != gk(0, 1)) continue;
            for (const Vec3& x3 : c3) {
                if (l.b2(x1, x3) != gk(0, 2) || l.b2(x2, x3) != gk(1, 2)) continue;
                return basis_mat(x1, x2, x3);
            }
        }
    return std::nullopt;
}

BinaryForm::BinaryForm(i64 a_, i64 b_, i64 c_) : a(a_), b(b_), c(c_) {
    if (a <= 0 || c <= 0 || disc() >= 0)
        throw std::invalid_argument("BinaryForm: must be positive definite");
}

i64 BinaryForm::odd_radical_of_disc() const {
    i64 d = -disc();
    while (d % 2 == 0) d /= 2;
    i64 rad = 1;
    for (i64 p = 3; p * p <= d; p += 2) {
        if (d % p == 0) {
            rad *= p;
            while (d % p == 0) d /= p;
        }
    }
    if (d > 1) rad *= d;
    return rad;
}

std::string BinaryForm::str() const {
    std::ostringstream os;
    if (b == 0)
        os << a << ',' << c;
    else
        os << a << ',' << b << ',' << c;
    return os.str();
}

GramLattice parse_form(const std::string& text) {
    std::vector<i64> vals;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        std::size_t pos = 0;
        i64 v = std::stoll(tok, &pos);
        while (pos < tok.size() && std::isspace(static_cast<unsigned char>(tok[pos]))) ++pos;
        if (pos != tok.size()) throw std::invalid_argument("parse_form: bad entry '" + tok + "'");
        vals.push_back(v);
    }
    if (vals.size() == 3) return GramLattice(DiagonalForm(vals[0], vals[1], vals[2]));
    if (vals.size() == 6) {
        Mat3 g;
        g(0, 0) = vals[0];
        g(1, 1) = vals[1];
        g(2, 2) = vals[2];
        g(0, 1) = g(1, 0) = vals[3];
        g(0, 2) = g(2, 0) = vals[4];
        g(1, 2) = g(2, 1) = vals[5];
        return GramLattice(g);
    }
    throw std::invalid_argument("parse_form: expected 3 or 6 comma-separated integers");
}

}  // namespace oddreg::forms
