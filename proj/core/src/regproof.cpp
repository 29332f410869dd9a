#include "oddreg/regproof.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "oddreg/sieve.hpp"

namespace oddreg::regproof {
namespace {

using forms::GramLattice;

i64 mod_pos(i64 a, i64 m) {
    i64 r = a % m;
    return r < 0 ? r + m : r;
}

Vec3 mod_vec(const Vec3& v, i64 l) { return {mod_pos(v[0], l), mod_pos(v[1], l), mod_pos(v[2], l)}; }

void check_lr(i64 l, i64 r) {
    if (l < 1 || r < 0 || r >= l) throw std::invalid_argument("need l >= 1 and 0 <= r < l");
}

/// Sum of the principal 2x2 minors (second characteristic coefficient).
i64 char_c2(const Mat3& t) {
    return t(0, 0) * t(1, 1) - t(0, 1) * t(1, 0) + t(0, 0) * t(2, 2) - t(0, 2) * t(2, 0) +
           t(1, 1) * t(2, 2) - t(1, 2) * t(2, 1);
}

/// True iff (1/l) t has infinite order. Decided via the characteristic
/// polynomial: a finite-order rational 3x3 matrix has char poly a product
/// of cyclotomics of degree <= 2, and its order divides the lcm of their
/// indices; that candidate order is then confirmed by exact powering.
bool infinite_order(const Mat3& t, i64 l) {
    i64 tr = t.trace(), c2 = char_c2(t), d = t.det();
    if (tr % l != 0 || c2 % (l * l) != 0 || d % (l * l * l) != 0) return true;
    // char poly of (1/l)t: x^3 + a x^2 + b x + c
    i64 a = -tr / l, b = c2 / (l * l), c = -d / (l * l * l);
    struct Cyc {
        std::vector<i64> coeffs;  // ascending
        int order;
    };
    const std::vector<Cyc> cyc = {{{-1, 1}, 1},      // x - 1
                                  {{1, 1}, 2},       // x + 1
                                  {{1, 1, 1}, 3},    // x^2 + x + 1
                                  {{1, 0, 1}, 4},    // x^2 + 1
                                  {{1, -1, 1}, 6}};  // x^2 - x + 1
    auto mul = [](const std::vector<i64>& p, const std::vector<i64>& q) {
        std::vector<i64> r(p.size() + q.size() - 1, 0);
        for (std::size_t i = 0; i < p.size(); ++i)
            for (std::size_t j = 0; j < q.size(); ++j) r[i + j] += p[i] * q[j];
        return r;
    };
    int order = 0;
    for (std::size_t i = 0; i < cyc.size() && !order; ++i)
        for (std::size_t j = i; j < cyc.size() && !order; ++j) {
            std::vector<i64> prod = mul(cyc[i].coeffs, cyc[j].coeffs);
            if (prod.size() == 3) {  // two linear factors: multiply a third
                for (std::size_t k = j; k < cyc.size() && !order; ++k) {
                    if (cyc[k].coeffs.size() != 2) continue;
                    std::vector<i64> full = mul(prod, cyc[k].coeffs);
                    if (full == std::vector<i64>{c, b, a, 1})
                        order = std::lcm(std::lcm(cyc[i].order, cyc[j].order), cyc[k].order);
                }
            } else if (prod.size() == 4) {
                if (prod == std::vector<i64>{c, b, a, 1})
                    order = std::lcm(cyc[i].order, cyc[j].order);
            }
        }
    if (!order) return true;  // non-cyclotomic characteristic polynomial
    Mat3 p = Mat3::identity();
    i64 scale = 1;
    for (int i = 0; i < order; ++i) {
        p = p * t;
        scale *= l;
    }
    Mat3 target;
    target(0, 0) = target(1, 1) = target(2, 2) = scale;
    return !(p == target);  // cyclotomic but non-semisimple: infinite order
}

Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

Vec3 primitive(Vec3 v) {
    i64 g = std::gcd(std::gcd(std::abs(v[0]), std::abs(v[1])), std::abs(v[2]));
    if (g > 1)
        for (auto& x : v) x /= g;
    for (int i = 0; i < 3; ++i) {
        if (v[i] > 0) break;
        if (v[i] < 0) {
            for (auto& x : v) x = -x;
            break;
        }
    }
    return v;
}

/// A primitive integral eigenvector of t (eigenvalue +-l), if any.
std::optional<Vec3> eigenvector(const Mat3& t, i64 l) {
    for (i64 lam : {l, -l}) {
        Mat3 a = t;
        a(0, 0) -= lam;
        a(1, 1) -= lam;
        a(2, 2) -= lam;
        Vec3 rows[3] = {{a(0, 0), a(0, 1), a(0, 2)},
                        {a(1, 0), a(1, 1), a(1, 2)},
                        {a(2, 0), a(2, 1), a(2, 2)}};
        for (auto [i, j] : {std::pair{0, 1}, {0, 2}, {1, 2}}) {
            Vec3 z = cross(rows[i], rows[j]);
            if (z == Vec3{0, 0, 0}) continue;
            z = primitive(z);
            if (a.apply(z) == Vec3{0, 0, 0}) return z;
        }
        // rank <= 1: two-dimensional kernel, take a small primitive vector
        for (i64 s = 1; s <= 8; ++s)
            for (i64 x = -s; x <= s; ++x)
                for (i64 y = -s; y <= s; ++y)
                    for (i64 z3 : {-s, s})
                        for (Vec3 z : {Vec3{x, y, z3}, Vec3{x, z3, y}, Vec3{z3, x, y}})
                            if (z != Vec3{0, 0, 0} && a.apply(z) == Vec3{0, 0, 0})
                                return primitive(z);
    }
    return std::nullopt;
}

bool is_square(i64 n) {
    if (n < 0) return false;
    i64 r = (i64)std::sqrt((double)n);
    while (r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r * r == n;
}

nlohmann::json mat_to_json(const Mat3& t) {
    nlohmann::json rows = nlohmann::json::array();
    for (int r = 0; r < 3; ++r) rows.push_back({t(r, 0), t(r, 1), t(r, 2)});
    return rows;
}

Mat3 mat_from_json(const nlohmann::json& rows) {
    Mat3 t;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) t(r, c) = rows.at(r).at(c).get<i64>();
    return t;
}

}  // namespace

bool RSet::contains(const Vec3& v) const {
    Vec3 w = mod_vec(v, l);
    return std::binary_search(vectors.begin(), vectors.end(), w);
}

RSet r_set(const GramLattice& n, i64 l, i64 r) {
    check_lr(l, r);
    RSet out{n, l, r, {}};
    for (i64 x = 0; x < l; ++x)
        for (i64 y = 0; y < l; ++y)
            for (i64 z = 0; z < l; ++z)
                if (mod_pos(n.q({x, y, z}), l) == r) out.vectors.push_back({x, y, z});
    return out;
}

TransformSet transform_set(const GramLattice& k, const GramLattice& n, i64 l) {
    if (l < 1) throw std::invalid_argument("transform_set: l must be positive");
    const Mat3& gn = n.gram2();
    const Mat3& gk = k.gram2();
    std::vector<Vec3> cols[3];
    for (int i = 0; i < 3; ++i) {
        i64 doubled = l * l * gn(i, i);
        if (doubled % 2 != 0) throw std::invalid_argument("transform_set: non-integral norm");
        for (const Vec3& v : vectors_of_norm(k, doubled / 2)) {
            cols[i].push_back(v);
            cols[i].push_back({-v[0], -v[1], -v[2]});
        }
    }
    auto dot = [&](const Vec3& a, const Vec3& b) {
        i64 s = 0;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) s += a[r] * gk(r, c) * b[c];
        return s;  // 2B_K(a, b)
    };
    TransformSet out{k, n, l, {}};
    for (const Vec3& c0 : cols[0])
        for (const Vec3& c1 : cols[1]) {
            if (dot(c0, c1) != l * l * gn(0, 1)) continue;
            for (const Vec3& c2 : cols[2]) {
                if (dot(c0, c2) != l * l * gn(0, 2)) continue;
                if (dot(c1, c2) != l * l * gn(1, 2)) continue;
                Mat3 t;
                for (int r = 0; r < 3; ++r) {
                    t(r, 0) = c0[r];
                    t(r, 1) = c1[r];
                    t(r, 2) = c2[r];
                }
                out.matrices.push_back(t);
            }
        }
    return out;
}

PrecResult check_prec(const GramLattice& n, const GramLattice& k, i64 l, i64 r) {
    PrecResult res{n, k, l, r, true, r_set(n, l, r), {}, {}};
    TransformSet ts = transform_set(k, n, l);
    res.witnesses.resize(res.rset.vectors.size());
    parallel_for(res.rset.vectors.size(), worker_threads(), [&](std::size_t i) {
        const Vec3& v = res.rset.vectors[i];
        for (const Mat3& t : ts.matrices) {
            Vec3 w = t.apply(v);
            if (w[0] % l == 0 && w[1] % l == 0 && w[2] % l == 0) {
                res.witnesses[i] = t;
                break;
            }
        }
    });
    for (std::size_t i = 0; i < res.rset.vectors.size(); ++i)
        if (!res.witnesses[i]) res.bad.push_back(res.rset.vectors[i]);
    res.ok = res.bad.empty();
    return res;
}

std::string TrapCertificate::json() const {
    nlohmann::json j;
    j["N"] = n.str();
    j["K"] = k.str();
    j["l"] = l;
    j["r"] = r;
    auto blocks = [](const std::vector<TrapPartition>& ps) {
        nlohmann::json arr = nlohmann::json::array();
        for (const TrapPartition& p : ps) {
            nlohmann::json b;
            b["vectors"] = nlohmann::json::array();
            for (const Vec3& v : p.vectors) b["vectors"].push_back({v[0], v[1], v[2]});
            b["T"] = mat_to_json(p.t);
            arr.push_back(b);
        }
        return arr;
    };
    j["partitions"] = blocks(partitions);
    j["tilde"] = blocks(tilde);
    j["expected_exclusions"] = expected_exclusions;
    return j.dump(2);
}

TrapCertificate TrapCertificate::from_json(const std::string& text) {
    try {
        nlohmann::json j = nlohmann::json::parse(text);
        auto blocks = [](const nlohmann::json& arr) {
            std::vector<TrapPartition> out;
            for (const auto& b : arr) {
                TrapPartition p{{}, mat_from_json(b.at("T"))};
                for (const auto& v : b.at("vectors"))
                    p.vectors.push_back({v.at(0).get<i64>(), v.at(1).get<i64>(), v.at(2).get<i64>()});
                out.push_back(p);
            }
            return out;
        };
        return TrapCertificate{forms::parse_form(j.at("N").get<std::string>()),
                               forms::parse_form(j.at("K").get<std::string>()),
                               j.at("l").get<i64>(),
                               j.at("r").get<i64>(),
                               blocks(j.at("partitions")),
                               blocks(j.at("tilde")),
                               j.at("expected_exclusions").get<std::vector<i64>>()};
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("TrapCertificate: malformed JSON: ") + e.what());
    }
}

TrapVerdict check_trap(const TrapCertificate& cert) {
    const i64 l = cert.l;
    auto fail = [](std::string why) { return TrapVerdict{false, std::move(why), {}, {}}; };
    check_lr(l, cert.r);
    const Mat3& gn = cert.n.gram2();
    Mat3 gn_l2;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) gn_l2(a, b) = l * l * gn(a, b);
    // per-block matrix conditions first
    for (const TrapPartition& p : cert.partitions) {
        if (!(p.t.transposed() * gn * p.t == gn_l2))
            return fail("T^t M_N T != l^2 M_N for a main block");
        if (!infinite_order(p.t, l)) return fail("(1/l)T has finite order");
    }
    for (const TrapPartition& p : cert.tilde)
        if (!(p.t.transposed() * gn * p.t == gn_l2))
            return fail("T^t M_N T != l^2 M_N for a tilde block");
    // partition correctness against R - R_K
    PrecResult prec = check_prec(cert.n, cert.k, l, cert.r);
    std::set<Vec3> bad(prec.bad.begin(), prec.bad.end());
    std::set<Vec3> good;
    for (std::size_t i = 0; i < prec.rset.vectors.size(); ++i)
        if (prec.witnesses[i]) good.insert(prec.rset.vectors[i]);
    std::set<Vec3> seen, main_union;
    for (const TrapPartition& p : cert.partitions)
        for (const Vec3& v : p.vectors) {
            Vec3 w = mod_vec(v, l);
            if (!bad.count(w)) return fail("partition vector not in R - R_K");
            if (!seen.insert(w).second) return fail("partition blocks overlap");
            main_union.insert(w);
        }
    for (const TrapPartition& p : cert.tilde)
        for (const Vec3& v : p.vectors) {
            Vec3 w = mod_vec(v, l);
            if (!bad.count(w)) return fail("tilde vector not in R - R_K");
            if (!seen.insert(w).second) return fail("partition blocks overlap");
        }
    if (seen.size() != bad.size()) return fail("partition does not cover R - R_K");
    // closure over all lifts mod l^2
    auto closed = [&](const TrapPartition& p, const std::set<Vec3>& allowed) {
        for (const Vec3& v0raw : p.vectors) {
            Vec3 v0 = mod_vec(v0raw, l);
            Vec3 w0 = p.t.apply(v0);
            if (w0[0] % l || w0[1] % l || w0[2] % l) return false;  // (1/l)Tv not integral
            for (i64 a = 0; a < l; ++a)
                for (i64 b = 0; b < l; ++b)
                    for (i64 c = 0; c < l; ++c) {
                        Vec3 v{v0[0] + l * a, v0[1] + l * b, v0[2] + l * c};
                        Vec3 u = p.t.apply(v);
                        Vec3 img = mod_vec({u[0] / l, u[1] / l, u[2] / l}, l);
                        if (!allowed.count(img) && !good.count(img)) return false;
                    }
        }
        return true;
    };
    for (const TrapPartition& p : cert.partitions) {
        std::set<Vec3> own;
        for (const Vec3& v : p.vectors) own.insert(mod_vec(v, l));
        if (!closed(p, own)) return fail("main block not closed into P_i or R_K");
    }
    for (const TrapPartition& p : cert.tilde)
        if (!closed(p, main_union)) return fail("tilde block not closed into the main blocks or R_K");
    // eigenvector exclusions
    TrapVerdict verdict{true, "", {}, {}};
    for (const TrapPartition& p : cert.partitions) {
        auto z = eigenvector(p.t, l);
        if (!z) return fail("main block matrix has no integral eigenvector");
        verdict.eigenvectors.push_back(*z);
        verdict.exclusions.push_back(cert.n.q(*z));
    }
    std::vector<i64> got = verdict.exclusions, want = cert.expected_exclusions;
    std::sort(got.begin(), got.end());
    std::sort(want.begin(), want.end());
    if (got != want) return fail("exclusion classes do not match expected_exclusions");
    return verdict;
}

TransferReport transfer_conclusion(const GramLattice& n, const GramLattice& k, i64 l, i64 r,
                                   const std::vector<i64>& exclusions, i64 nmax) {
    check_lr(l, r);
    sieve::RepSet qn = sieve::rep_set(n, nmax);
    sieve::RepSet qk = sieve::rep_set(k, nmax);
    TransferReport rep{true, nmax, 0, exclusions, {}};
    for (i64 m = r; m <= nmax; m += l) {
        if (!qn.contains(m)) continue;
        bool excluded = false;
        for (i64 g : exclusions)
            if (g != 0 && m % g == 0 && is_square(m / g)) excluded = true;
        if (excluded) {
            rep.excluded_values.emplace_back(m, qk.contains(m));
            continue;
        }
        ++rep.checked;
        if (!qk.contains(m))
            throw std::logic_error("transfer_conclusion: verified certificate contradicted at " +
                                   std::to_string(m));
    }
    return rep;
}

TransferReport transfer_conclusion(const PrecResult& prec, i64 nmax) {
    if (!prec.ok) throw std::invalid_argument("transfer_conclusion: prec relation not verified");
    return transfer_conclusion(prec.n, prec.k, prec.l, prec.r, {}, nmax);
}

TransferReport transfer_conclusion(const TrapCertificate& cert, i64 nmax) {
    TrapVerdict v = check_trap(cert);
    if (!v.ok) throw std::invalid_argument("transfer_conclusion: certificate rejected: " + v.failure);
    return transfer_conclusion(cert.n, cert.k, cert.l, cert.r, v.exclusions, nmax);
}

}  // namespace oddreg::regproof
