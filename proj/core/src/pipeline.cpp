#include "oddreg/pipeline.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "oddreg/apbinary.hpp"
#include "oddreg/arith.hpp"
#include "oddreg/genus.hpp"
#include "oddreg/localrep.hpp"
#include "oddreg/regproof.hpp"
#include "oddreg/sieve.hpp"

namespace oddreg::pipeline {

using forms::DiagonalForm;
using forms::GramLattice;

namespace {

Mat3 gram6(i64 g11, i64 g22, i64 g33, i64 g12, i64 g13, i64 g23) {
    Mat3 g;
    g(0, 0) = g11;
    g(1, 1) = g22;
    g(2, 2) = g33;
    g(0, 1) = g(1, 0) = g12;
    g(0, 2) = g(2, 0) = g13;
    g(1, 2) = g(2, 1) = g23;
    return g;
}

i64 qp(int eta, std::size_t i) { return static_cast<i64>(arith::ap_prime({eta, i})); }

/// 2-adic stage test: which odd residues the form covers, as decided by the
/// full progressions (odd_profile).
bool stage_matches(const std::vector<int>& profile, int alpha) {
    auto in = [&](int v) { return std::find(profile.begin(), profile.end(), v) != profile.end(); };
    switch (alpha) {
        case 1: return in(1);
        case 3: return !in(1) && in(3);
        case 5: return !in(1) && !in(3) && in(5);
        case 7: return profile == std::vector<int>{7};
    }
    return false;
}

/// Staged bounded odd-regularity: a cheap prefilter bound before the real one.
bool odd_regular_up_to(const DiagonalForm& f, i64 n_check) {
    GramLattice l(f);
    if (!sieve::verify_regularity(l, sieve::Mode::odd, std::min<i64>(2000, n_check))
             .exceptions.empty())
        return false;
    return sieve::verify_regularity(l, sieve::Mode::odd, n_check).exceptions.empty();
}

}  // namespace

std::string status_name(Status s) {
    switch (s) {
        case Status::regular_known: return "regular-known";
        case Status::stable_odd_regular: return "stable-odd-regular";
        case Status::nonstable_verified: return "nonstable-verified";
        case Status::open_bounded: return "open";
    }
    return "?";
}

std::string data_dir() {
    const char* env = std::getenv("ODDREG_DATA_DIR");
    return env ? env : "data";
}

std::vector<DiagonalForm> load_regular_list(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open regular-form list: " + path);
    nlohmann::json j;
    in >> j;
    std::vector<DiagonalForm> out;
    for (const auto& rec : j.at("forms")) {
        const auto& f = rec.at("form");
        out.emplace_back(f.at(0).get<i64>(), f.at(1).get<i64>(), f.at(2).get<i64>());
    }
    if (out.size() != j.at("count").get<std::size_t>())
        throw std::runtime_error("regular-form list count mismatch");
    return out;
}

const std::vector<DiagonalForm>& stable_eight() {
    static const std::vector<DiagonalForm> v = {{1, 4, 5}, {1, 2, 24}, {1, 6, 8}, {1, 5, 12},
                                                {1, 4, 21}, {3, 4, 7}, {2, 5, 24}, {5, 6, 8}};
    return v;
}

std::vector<DiagonalForm> stable53(const std::vector<DiagonalForm>& regular_list) {
    std::vector<DiagonalForm> out;
    for (const auto& f : regular_list)
        if (localrep::is_stable(f)) out.push_back(f);
    for (const auto& f : stable_eight()) out.push_back(f);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<SearchRegion> terminal_regions() {
    return {
        {1, 1, {1, 2, 4, 8, 16}, 0, 1633, {}},
        {1, 1, {}, 73, 97, {}},
        {3, 59, {}, 67, 179, {{1, 2}}},
        {5, 53, {}, 61, 197, {{1, 1}, {1, 4}}},
        {7, 71, {}, 79, 199, {}},
    };
}

// ---------------------------------------------------------------------------
// staged-bound replay

namespace {

struct Audit {
    StageAudit out;
    void check(const std::string& what, i64 got, i64 want) {
        std::ostringstream os;
        os << what << ": " << got;
        if (got == want) {
            os << " (ok)";
        } else {
            os << " (MISMATCH, expected " << want << ")";
            out.ok = false;
        }
        out.steps.push_back(os.str());
    }
    void fact(const std::string& what, bool holds) {
        out.steps.push_back(what + (holds ? " (ok)" : " (FAILS)"));
        if (!holds) out.ok = false;
    }
};

}  // namespace

std::vector<StageAudit> replay_stages() {
    std::vector<StageAudit> audits;

    {  // the global t <= 20 bound shared by stages 3, 5, 7
        Audit a;
        a.out.alpha = 0;
        a.check("smallest_w(1, 3)", arith::smallest_w(i64{1}, 3), 21);
        a.out.steps.push_back("=> t <= 20 for every stage");
        audits.push_back(a.out);
    }
    {  // alpha = 1
        Audit a;
        a.out.alpha = 1;
        a.check("smallest_w(1, 2)", arith::smallest_w(i64{1}, 2), 11);
        a.check("b <= q_{1,11}", qp(1, 11), 257);
        a.check("smallest_w(257, 1)", arith::smallest_w(i64{257}, 1), 8);
        a.check("b <= q_{1,8}", qp(1, 8), 193);
        a.check("psi_1(1,193;16)", apbinary::psi(1, 1, 193, 16).psi, 8);
        a.fact("psi_1(1,193;16) < 16 - 7", apbinary::psi(1, 1, 193, 16).psi < 16 - 7);
        a.check("c <= q_{1,16}", qp(1, 16), 401);
        a.check("smallest_w(193*401, 0)", arith::smallest_w(i64{193} * 401, 0), 6);
        a.check("b <= q_{1,6}", qp(1, 6), 113);
        a.fact("q_{1,1} q_{1,2} = 17*41 > 401", qp(1, 1) * qp(1, 2) > 401);
        a.out.steps.push_back("=> t_1 <= 2");
        a.check("b <= q_{1,3}", qp(1, 3), 73);
        a.check("psi_1(1,73;5)", apbinary::psi(1, 1, 73, 5).psi, 2);
        a.fact("psi_1(1,73;5) < 5 - 2", apbinary::psi(1, 1, 73, 5).psi < 5 - 2);
        a.check("c <= q_{1,5}", qp(1, 5), 97);
        // the b in {1,2,4,8,16} branch
        a.check("smallest_w(16, 1)", arith::smallest_w(i64{16}, 1), 6);
        a.out.steps.push_back("=> t <= 5 when b in {1,2,4,8,16}");
        const std::vector<i64> e1 = {201, 553, 649, 817, 1457, 1633};
        const std::vector<i64> f1 = {305, 553, 689, 1073, 1457, 1633};
        for (auto [bs, set] : {std::pair<std::vector<i64>, const std::vector<i64>*>{
                                   {1, 4, 16}, &e1},
                               {{2, 8}, &f1}}) {
            for (i64 e : *set) {
                a.fact("e = " + std::to_string(e) + " is 1 mod 8 and <= 1633",
                       e % 8 == 1 && e <= 1633);
                for (i64 b : bs)
                    a.fact("e = " + std::to_string(e) + " not -> <1," + std::to_string(b) + ">",
                           !apbinary::binary_represents(forms::BinaryForm(1, b), e));
            }
            for (std::size_t i = 0; i < set->size(); ++i)
                for (std::size_t j = i + 1; j < set->size(); ++j)
                    a.fact("coprimality in the witness set",
                           std::gcd((*set)[i], (*set)[j]) == 1);
        }
        a.out.steps.push_back("six pairwise coprime misses > five anisotropic primes => c <= 1633");
        audits.push_back(a.out);
    }
    {  // alpha = 3
        Audit a;
        a.out.alpha = 3;
        a.check("a <= q_{3,21}", qp(3, 21), 419);
        a.check("b <= q_{3,22}", qp(3, 22), 443);
        a.check("smallest_w(419*443, 1)", arith::smallest_w(i64{419} * 443, 1), 10);
        a.check("a <= q_{3,10}", qp(3, 10), 139);
        a.check("b <= q_{3,11}", qp(3, 11), 163);
        a.check("psi_3(139,163;22)", apbinary::psi(3, 139, 163, 22).psi, 12);
        a.fact("psi_3(139,163;22) < 22 - 9", apbinary::psi(3, 139, 163, 22).psi < 22 - 9);
        a.check("c <= q_{3,22}", qp(3, 22), 443);
        a.check("smallest_w(139*163*443, 0)", arith::smallest_w(i64{139} * 163 * 443, 0), 8);
        a.check("a <= q_{3,8}", qp(3, 8), 107);
        a.check("b <= q_{3,9}", qp(3, 9), 131);
        a.check("psi_3(107,131;20)", apbinary::psi(3, 107, 131, 20).psi, 12);
        a.fact("psi_3(107,131;20) < 20 - 7", apbinary::psi(3, 107, 131, 20).psi < 20 - 7);
        a.check("c <= q_{3,20}", qp(3, 20), 379);
        a.fact("q_{3,1} q_{3,2} q_{3,3} = 3*11*19 > 379", qp(3, 1) * qp(3, 2) * qp(3, 3) > 379);
        a.fact("q_{3,2} q_{3,3} > 131", qp(3, 2) * qp(3, 3) > 131);
        a.out.steps.push_back("=> t_3 <= 5");
        a.check("a <= q_{3,6}", qp(3, 6), 67);
        a.check("b <= q_{3,7}", qp(3, 7), 83);
        a.check("psi_3(67,83;15)", apbinary::psi(3, 67, 83, 15).psi, 9);
        a.fact("psi_3(67,83;15) < 15 - 5", apbinary::psi(3, 67, 83, 15).psi < 15 - 5);
        a.check("c <= q_{3,15}", qp(3, 15), 251);
        a.out.steps.push_back("=> t_3 <= 4");
        a.check("a <= q_{3,5}", qp(3, 5), 59);
        a.check("b <= q_{3,6}", qp(3, 6), 67);
        a.check("psi_3(59,67;12)", apbinary::psi(3, 59, 67, 12).psi, 7);
        a.fact("psi_3(59,67;12) < 12 - 4", apbinary::psi(3, 59, 67, 12).psi < 12 - 4);
        a.check("c <= q_{3,12}", qp(3, 12), 179);
        audits.push_back(a.out);
    }
    {  // alpha = 5
        Audit a;
        a.out.alpha = 5;
        a.check("a <= q_{5,21}", qp(5, 21), 389);
        a.check("b <= q_{5,22}", qp(5, 22), 397);
        a.check("smallest_w(389*397, 1)", arith::smallest_w(i64{389} * 397, 1), 10);
        a.check("a <= q_{5,10}", qp(5, 10), 157);
        a.check("b <= q_{5,11}", qp(5, 11), 173);
        a.check("psi_5(157,173;26)", apbinary::psi(5, 157, 173, 26).psi, 16);
        a.fact("psi_5(157,173;26) < 26 - 9", apbinary::psi(5, 157, 173, 26).psi < 26 - 9);
        a.check("c <= q_{5,26}", qp(5, 26), 541);
        a.check("smallest_w(157*173*541, 0)", arith::smallest_w(i64{157} * 173 * 541, 0), 8);
        a.check("a <= q_{5,8}", qp(5, 8), 109);
        a.check("b <= q_{5,9}", qp(5, 9), 149);
        a.fact("q_{5,1} q_{5,2} q_{5,3} = 5*13*29 > 541", qp(5, 1) * qp(5, 2) * qp(5, 3) > 541);
        a.fact("q_{5,2} q_{5,3} > 149", qp(5, 2) * qp(5, 3) > 149);
        a.out.steps.push_back("=> t_5 <= 4");
        a.check("a <= q_{5,5}", qp(5, 5), 53);
        a.check("b <= q_{5,6}", qp(5, 6), 61);
        a.check("psi_5(53,61;13)", apbinary::psi(5, 53, 61, 13).psi, 8);
        a.fact("psi_5(53,61;13) < 13 - 4", apbinary::psi(5, 53, 61, 13).psi < 13 - 4);
        a.check("c <= q_{5,13}", qp(5, 13), 197);
        audits.push_back(a.out);
    }
    {  // alpha = 7
        Audit a;
        a.out.alpha = 7;
        a.check("a <= q_{7,21}", qp(7, 21), 431);
        a.check("b <= q_{7,22}", qp(7, 22), 439);
        a.check("smallest_w(431*439, 1)", arith::smallest_w(i64{431} * 439, 1), 10);
        a.check("a <= q_{7,10}", qp(7, 10), 167);
        a.check("b <= q_{7,11}", qp(7, 11), 191);
        a.fact("U(8,7) is empty", apbinary::universal_set(7).members.empty());
        a.check("psi_7(167,191;21)", apbinary::psi(7, 167, 191, 21).psi, 11);
        a.fact("psi_7(167,191;21) < 21 - 9", apbinary::psi(7, 167, 191, 21).psi < 21 - 9);
        a.check("c <= q_{7,21}", qp(7, 21), 431);
        a.check("smallest_w(167*191*431, 0)", arith::smallest_w(i64{167} * 191 * 431, 0), 8);
        a.check("a <= q_{7,8}", qp(7, 8), 127);
        a.check("b <= q_{7,9}", qp(7, 9), 151);
        a.check("psi_7(127,151;17)", apbinary::psi(7, 127, 151, 17).psi, 9);
        a.fact("psi_7(127,151;17) < 17 - 7", apbinary::psi(7, 127, 151, 17).psi < 17 - 7);
        a.check("c <= q_{7,17}", qp(7, 17), 311);
        a.fact("q_{7,1} q_{7,2} = 7*23 > 151", qp(7, 1) * qp(7, 2) > 151);
        a.fact("q_{7,1} q_{7,2} q_{7,3} = 7*23*31 > 311", qp(7, 1) * qp(7, 2) * qp(7, 3) > 311);
        a.out.steps.push_back("=> t_7 <= 4");
        a.check("a <= q_{7,5}", qp(7, 5), 71);
        a.check("b <= q_{7,6}", qp(7, 6), 79);
        a.check("psi_7(71,79;12)", apbinary::psi(7, 71, 79, 12).psi, 7);
        a.fact("psi_7(71,79;12) < 12 - 4", apbinary::psi(7, 71, 79, 12).psi < 12 - 4);
        a.check("c <= q_{7,12}", qp(7, 12), 199);
        audits.push_back(a.out);
    }
    return audits;
}

// ---------------------------------------------------------------------------
// stable search

StableSearchResult stable_search(i64 n_check, const std::vector<DiagonalForm>& regular_list) {
    StableSearchResult res;
    res.audit = replay_stages();
    for (const auto& a : res.audit) res.audit_ok = res.audit_ok && a.ok;

    // dedupe per stage: the two alpha=1 regions overlap, but a form skipped by
    // one stage's hypothesis filter must still reach the other stages
    std::set<std::array<i64, 4>> seen;
    std::vector<std::pair<DiagonalForm, int>> pool;  // (form, alpha)
    for (const SearchRegion& reg : terminal_regions()) {
        std::vector<i64> bs = reg.b_set;
        if (bs.empty())
            for (i64 b = 1; b <= reg.b_max; ++b) bs.push_back(b);
        for (i64 a = 1; a <= reg.a_max; ++a)
            for (i64 b : bs) {
                if (b < a) continue;
                bool excl = false;
                for (auto [xa, xb] : reg.excluded_ab) excl = excl || (a == xa && b == xb);
                if (excl) continue;
                for (i64 c = b; c <= reg.c_max; ++c) {
                    if (std::gcd(std::gcd(a, b), c) != 1) continue;
                    if (!seen.insert({reg.alpha, a, b, c}).second) continue;
                    DiagonalForm f(a, b, c);
                    if (!localrep::is_stable(f)) continue;
                    if (!stage_matches(localrep::odd_profile(f), reg.alpha)) continue;
                    pool.emplace_back(f, reg.alpha);
                }
            }
    }

    std::vector<char> pass(pool.size(), 0);
    parallel_for(pool.size(), worker_threads(),
                 [&](std::size_t i) { pass[i] = odd_regular_up_to(pool[i].first, n_check); });

    std::set<DiagonalForm> regular(regular_list.begin(), regular_list.end());
    for (std::size_t i = 0; i < pool.size(); ++i) {
        if (!pass[i]) continue;
        const auto& [f, alpha] = pool[i];
        bool known = regular.count(f) > 0;
        CandidateRecord rec{f, known ? Status::regular_known : Status::stable_odd_regular,
                            "stable search, stage alpha=" + std::to_string(alpha), n_check,
                            true, {}};
        res.survivors.push_back(rec);
        if (!known) res.non_regular.push_back(f);
    }
    std::sort(res.non_regular.begin(), res.non_regular.end());
    return res;
}

// ---------------------------------------------------------------------------
// ascent search

namespace {

/// Single-prime ascent children of a parent: adjust each coefficient's
/// p-exponent within [-v_p, +2], keep primitive results whose lambda_p maps
/// back to the parent and whose unimodular p-component is anisotropic
/// (rank <= 1, or rank 2 with (-u1 u2 / p) = -1), so the descent lemma ties
/// the child to the parent.
std::vector<DiagonalForm> ascent_children(const DiagonalForm& parent, i64 p, i64 disc_cap,
                                          std::vector<DiagonalForm>* capped) {
    std::array<i64, 3> co{parent.a, parent.b, parent.c};
    std::array<std::vector<i64>, 3> choices;
    for (int i = 0; i < 3; ++i) {
        i64 v = co[i];
        int e = 0;
        while (v % p == 0) {
            v /= p;
            ++e;
        }
        for (int d = -e; d <= 2; ++d) {
            i64 m = co[i];
            for (int t = 0; t < -d; ++t) m /= p;
            for (int t = 0; t < d; ++t) m *= p;
            choices[i].push_back(m);
        }
    }
    std::vector<DiagonalForm> out;
    for (i64 x : choices[0])
        for (i64 y : choices[1])
            for (i64 z : choices[2]) {
                if (std::gcd(std::gcd(x, y), z) != 1) continue;
                DiagonalForm child(x, y, z);
                if (child == parent) continue;
                // unimodular p-component of the child
                std::vector<i64> units;
                for (i64 v : {child.a, child.b, child.c})
                    if (v % p != 0) units.push_back(v);
                if (units.size() == 3) continue;  // lambda_p is the identity
                if (units.size() == 2 && arith::jacobi(-units[0] * units[1], p) != -1) continue;
                auto down = watson::lambda(GramLattice(child), p).as_diagonal();
                if (!down || !(*down == parent)) continue;
                if (child.disc() > disc_cap) {
                    if (capped) capped->push_back(child);
                    continue;
                }
                out.push_back(child);
            }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace

AscentResult ascent_search(const std::vector<DiagonalForm>& stable_set, i64 disc_cap,
                           i64 n_check, const std::vector<DiagonalForm>& regular_list) {
    AscentResult res;
    std::set<DiagonalForm> accepted(stable_set.begin(), stable_set.end());
    std::set<DiagonalForm> rejected;
    std::map<DiagonalForm, std::string> provenance;
    std::vector<DiagonalForm> frontier(stable_set.begin(), stable_set.end());

    int rounds = 0;
    while (!frontier.empty() && ++rounds <= 64) {
        // gather candidate children of the whole frontier
        std::vector<std::pair<DiagonalForm, std::string>> todo;
        std::set<DiagonalForm> batch;
        for (const DiagonalForm& parent : frontier)
            for (i64 p : {3, 5, 7})
                for (const DiagonalForm& child :
                     ascent_children(parent, p, disc_cap, &res.boundary)) {
                    if (accepted.count(child) || rejected.count(child) || batch.count(child))
                        continue;
                    batch.insert(child);
                    todo.emplace_back(child, parent.str() + " *" + std::to_string(p));
                }
        std::vector<char> pass(todo.size(), 0);
        parallel_for(todo.size(), worker_threads(),
                     [&](std::size_t i) { pass[i] = odd_regular_up_to(todo[i].first, n_check); });
        frontier.clear();
        for (std::size_t i = 0; i < todo.size(); ++i) {
            if (!pass[i]) {
                rejected.insert(todo[i].first);
                continue;
            }
            accepted.insert(todo[i].first);
            provenance[todo[i].first] = todo[i].second;
            frontier.push_back(todo[i].first);
            res.log.push_back(todo[i].first.str() + " from " + todo[i].second);
        }
    }
    res.fixpoint = frontier.empty();

    std::set<DiagonalForm> base(stable_set.begin(), stable_set.end());
    std::set<DiagonalForm> regular(regular_list.begin(), regular_list.end());
    std::set<DiagonalForm> open;
    for (const auto& e : table4())
        if (e.open) open.insert(e.form);
    for (const DiagonalForm& f : accepted) {
        if (base.count(f)) continue;
        Status st = regular.count(f) ? Status::regular_known
                    : open.count(f)  ? Status::open_bounded
                                     : Status::nonstable_verified;
        CandidateRecord rec{f, st, "ascent " + provenance[f], n_check, true,
                            watson::reduce_to_stable(f).steps};
        res.records.push_back(rec);
    }
    std::sort(res.records.begin(), res.records.end(),
              [](const CandidateRecord& x, const CandidateRecord& y) { return x.form < y.form; });
    // deduplicate boundary report
    std::sort(res.boundary.begin(), res.boundary.end());
    res.boundary.erase(std::unique(res.boundary.begin(), res.boundary.end()),
                       res.boundary.end());
    return res;
}

const std::vector<TableEntry>& table4() {
    static const std::vector<TableEntry> t = {
        {1, {1, 1, 36}, false},   {2, {1, 4, 9}, false},    {3, {1, 5, 20}, false},
        {4, {2, 3, 24}, false},   {5, {3, 6, 8}, false},    {6, {1, 3, 54}, true},
        {7, {3, 4, 15}, false},   {8, {1, 12, 21}, false},  {9, {3, 7, 12}, false},
        {10, {1, 5, 60}, false},  {11, {1, 9, 36}, false},  {12, {3, 4, 27}, false},
        {13, {1, 6, 72}, false},  {14, {1, 18, 24}, false}, {15, {2, 3, 72}, false},
        {16, {2, 9, 24}, false},  {17, {6, 8, 9}, false},   {18, {1, 5, 100}, true},
        {19, {1, 12, 45}, false}, {20, {5, 9, 12}, false},  {21, {1, 21, 28}, false},
        {22, {3, 7, 28}, false},  {23, {2, 15, 24}, false}, {24, {6, 8, 15}, false},
        {25, {3, 15, 20}, false}, {26, {1, 9, 108}, true},  {27, {1, 16, 72}, true},
        {28, {1, 10, 120}, false}, {29, {1, 30, 40}, false}, {30, {1, 21, 84}, false},
        {31, {3, 7, 84}, false},  {32, {1, 45, 60}, false}, {33, {5, 9, 60}, false},
        {34, {1, 24, 144}, true}, {35, {3, 10, 120}, false}, {36, {3, 30, 40}, false},
        {37, {3, 8, 216}, true},
    };
    return t;
}

std::vector<CandidateRecord> assemble_candidates(const std::vector<DiagonalForm>& regular_list,
                                                 const StableSearchResult& stable,
                                                 const AscentResult& ascent) {
    std::vector<CandidateRecord> out;
    std::set<DiagonalForm> have;
    for (const auto& rec : stable.survivors)
        if (rec.status == Status::stable_odd_regular) {
            out.push_back(rec);
            have.insert(rec.form);
        }
    for (const auto& rec : ascent.records) {
        if (have.count(rec.form)) continue;
        out.push_back(rec);
        have.insert(rec.form);
    }
    for (const auto& f : regular_list) {
        if (have.count(f)) continue;
        CandidateRecord rec{f, Status::regular_known, "regular list", 0, false, {}};
        out.push_back(rec);
        have.insert(f);
    }
    std::sort(out.begin(), out.end(), [](const CandidateRecord& x, const CandidateRecord& y) {
        return x.form < y.form;
    });
    return out;
}

std::string candidates_json(const std::vector<CandidateRecord>& list) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& rec : list) {
        nlohmann::json r;
        r["form"] = {rec.form.a, rec.form.b, rec.form.c};
        r["status"] = status_name(rec.status);
        r["provenance"] = rec.provenance;
        r["bound"] = rec.bound;
        r["passed"] = rec.passed;
        nlohmann::json chain = nlohmann::json::array();
        for (const auto& [p, f] : rec.chain) chain.push_back({p, {f.a, f.b, f.c}});
        r["chain"] = chain;
        arr.push_back(r);
    }
    nlohmann::json doc;
    doc["count"] = list.size();
    doc["candidates"] = arr;
    return doc.dump(1);
}

// ---------------------------------------------------------------------------
// Theorem 4.8 (the 8 stable forms)

namespace {

struct ChainData {
    int i;
    DiagonalForm l;
    Mat3 m, k;
};

struct PrecData {
    int i;
    DiagonalForm l;
    Mat3 m;
    std::vector<std::pair<i64, i64>> lr;
};

bool same_class(const GramLattice& a, const GramLattice& b) {
    return a.canonical() == b.canonical();
}

/// The non-L class of a two-class genus.
std::optional<GramLattice> genus_mate(const GramLattice& l) {
    auto g = genus::enumerate_genus(l);
    if (g.h() != 2) return std::nullopt;
    for (const auto& cls : g.classes)
        if (!same_class(cls, l)) return cls;
    return std::nullopt;
}

}  // namespace

std::vector<Theorem48Verdict> verify_theorem48(i64 bound) {
    const std::vector<ChainData> chains = {
        {1, {1, 4, 5}, gram6(2, 2, 40, 0, 0, 0), gram6(2, 8, 40, 0, 0, 0)},
        {2, {1, 2, 24}, gram6(6, 6, 12, 2, 0, 0), gram6(6, 24, 12, 4, 0, 0)},
        {5, {1, 4, 21}, gram6(2, 2, 168, 0, 0, 0), gram6(2, 8, 168, 0, 0, 0)},
        {7, {2, 5, 24}, gram6(14, 14, 12, 6, 0, 0), gram6(14, 56, 12, 12, 0, 0)},
        {8, {5, 6, 8}, gram6(22, 22, 4, 2, 0, 0), gram6(22, 88, 4, 4, 0, 0)},
    };
    const std::vector<PrecData> precs = {
        {3, {1, 6, 8}, gram6(4, 8, 14, 0, 0, 4), {{4, 1}, {4, 3}}},
        {4, {1, 5, 12}, gram6(4, 8, 18, 0, 2, 4), {{4, 3}, {8, 1}, {8, 5}}},
        {6, {3, 4, 7}, gram6(4, 14, 14, 2, 2, 0), {{4, 1}, {8, 3}, {8, 7}}},
    };

    std::vector<Theorem48Verdict> out;
    auto base = [&](int i, const DiagonalForm& f, const Mat3& mg) {
        Theorem48Verdict v{i, f, GramLattice(mg), "", false, false, ""};
        auto mate = genus_mate(GramLattice(f));
        if (!mate) {
            v.detail = "genus is not two-class";
            return v;
        }
        if (!same_class(*mate, GramLattice(mg))) {
            v.detail = "genus mate differs from the printed M(i)";
            return v;
        }
        v.bounded_ok =
            sieve::verify_regularity(GramLattice(f), sieve::Mode::odd, bound).exceptions.empty();
        v.detail = "mate confirmed";
        return v;
    };
    for (const auto& cd : chains) {
        auto v = base(cd.i, cd.l, cd.m);
        v.strategy = "chain";
        if (v.detail == "mate confirmed") {
            auto rep = sieve::chain_check(GramLattice(cd.m), GramLattice(cd.k),
                                          GramLattice(cd.l), std::min<i64>(bound, 100000));
            // K(i) is a sublattice of M(i); the K -> L step is the odd-value
            // inclusion chain_check tests numerically
            bool k_in_m =
                forms::represent_lattice(GramLattice(cd.m), GramLattice(cd.k)).has_value();
            v.verified = rep.ok && k_in_m;
            v.detail += rep.ok ? "; odd-value chain M -> K -> L holds" : "; " + rep.detail;
            v.detail += k_in_m ? "; K is a sublattice of M" : "; K does NOT embed in M";
        }
        out.push_back(v);
    }
    for (const auto& pd : precs) {
        auto v = base(pd.i, pd.l, pd.m);
        v.strategy = "prec";
        if (v.detail == "mate confirmed") {
            bool all = true;
            for (auto [l, r] : pd.lr) {
                auto res = regproof::check_prec(GramLattice(pd.m), GramLattice(pd.l), l, r);
                all = all && res.ok;
                v.detail += "; prec(" + std::to_string(l) + "," + std::to_string(r) + ")=" +
                            (res.ok ? "ok" : "FAIL");
            }
            v.verified = all;
        }
        out.push_back(v);
    }
    std::sort(out.begin(), out.end(),
              [](const Theorem48Verdict& x, const Theorem48Verdict& y) { return x.index < y.index; });
    return out;
}

// ---------------------------------------------------------------------------
// Theorem 5.4 (the 37 non-stable candidates)

namespace {

/// Parity cover: every odd value of the diagonal mate arises with the
/// coordinates outside the parity pattern even, so it lies in the lattice
/// scaling those coefficients by 4; verified when each such sublattice
/// embeds into l.
bool parity_cover(const DiagonalForm& mate, const GramLattice& l, std::string& detail) {
    std::array<i64, 3> m{mate.a, mate.b, mate.c};
    for (int px = 0; px < 2; ++px)
        for (int py = 0; py < 2; ++py)
            for (int pz = 0; pz < 2; ++pz) {
                if ((m[0] * px + m[1] * py + m[2] * pz) % 2 == 0) continue;  // even values
                Mat3 g = gram6(2 * m[0] * (px ? 1 : 4), 2 * m[1] * (py ? 1 : 4),
                               2 * m[2] * (pz ? 1 : 4), 0, 0, 0);
                if (!forms::represent_lattice(l, GramLattice(g))) {
                    detail += "; parity branch (" + std::to_string(px) + std::to_string(py) +
                              std::to_string(pz) + ") does not embed";
                    return false;
                }
            }
    detail += "; all odd parity branches embed";
    return true;
}

}  // namespace

std::vector<Theorem54Verdict> verify_theorem54(i64 bound, const std::string& cert_dir) {
    const std::set<int> trap_i = {1, 15};
    const std::set<int> parity_i = {2, 11};
    const std::map<int, std::vector<std::pair<i64, i64>>> prec_i = {
        {12, {{3, 0}, {24, 7}, {24, 19}}}, {13, {{4, 1}, {4, 3}}},  {14, {{4, 1}, {4, 3}}},
        {16, {{4, 1}, {4, 3}}},            {17, {{4, 1}, {4, 3}}},  {19, {{8, 1}, {8, 5}}},
        {20, {{8, 1}, {8, 5}}},
    };
    const std::set<int> open_i = {6, 18, 26, 27, 34, 37};

    std::vector<Theorem54Verdict> out;
    out.reserve(table4().size());
    // verified pool for the lambda-descent fixpoint: everything already
    // proved odd-regular (regular list members and the 8 stable forms are
    // included implicitly through their membership checks below)
    std::set<DiagonalForm> verified;
    for (const auto& f : load_regular_list(data_dir() + "/jones_pall_102.json"))
        verified.insert(f);
    for (const auto& f : stable_eight()) verified.insert(f);

    for (std::size_t idx = 0; idx < table4().size(); ++idx) {
        const TableEntry& e = table4()[idx];
        Theorem54Verdict v{e.index, e.form, "", false, false, ""};
        v.bounded_ok = sieve::verify_regularity(GramLattice(e.form), sieve::Mode::odd, bound)
                           .exceptions.empty();
        if (open_i.count(e.index)) {
            v.strategy = "open";
            v.detail = "bounded verification only";
        } else if (trap_i.count(e.index)) {
            v.strategy = "proposition";
            std::string file =
                cert_dir + (e.index == 1 ? "/prop51.json" : "/prop53.json");
            std::ifstream in(file);
            if (!in) {
                v.detail = "missing certificate " + file;
            } else {
                std::stringstream ss;
                ss << in.rdbuf();
                auto cert = regproof::TrapCertificate::from_json(ss.str());
                auto verdict = regproof::check_trap(cert);
                auto mate = genus_mate(GramLattice(e.form));
                bool mate_ok = mate.has_value();
                v.verified = verdict.ok && mate_ok;
                v.detail = verdict.ok ? "trap certificate verified" : verdict.failure;
                if (e.index == 1 && mate_ok)
                    v.detail += same_class(*mate, GramLattice(DiagonalForm(1, 4, 9)))
                                    ? "; mate <1,4,9>"
                                    : "; UNEXPECTED mate";
                if (e.index == 15 && mate_ok)
                    v.detail += same_class(*mate, GramLattice(DiagonalForm(3, 8, 18)))
                                    ? "; mate <3,8,18>"
                                    : "; UNEXPECTED mate";
            }
        } else if (parity_i.count(e.index)) {
            v.strategy = "parity";
            auto mate = genus_mate(GramLattice(e.form));
            if (!mate) {
                v.detail = "genus is not two-class";
            } else {
                auto md = mate->as_diagonal();
                if (!md) {
                    v.detail = "mate is not diagonal";
                } else {
                    v.detail = "mate " + md->str();
                    v.verified = parity_cover(*md, GramLattice(e.form), v.detail);
                }
            }
        } else if (prec_i.count(e.index)) {
            v.strategy = "prec";
            auto mate = genus_mate(GramLattice(e.form));
            if (!mate) {
                v.detail = "genus is not two-class";
            } else {
                if (e.index == 12)
                    v.detail = same_class(*mate, GramLattice(gram6(14, 32, 6, 4, 0, 0)))
                                   ? "mate matches printed M(12)"
                                   : "UNEXPECTED mate";
                else
                    v.detail = "mate " + mate->str();
                bool all = v.detail.find("UNEXPECTED") == std::string::npos;
                for (auto [l, r] : prec_i.at(e.index)) {
                    auto res = regproof::check_prec(*mate, GramLattice(e.form), l, r);
                    all = all && res.ok;
                    v.detail += "; prec(" + std::to_string(l) + "," + std::to_string(r) + ")=" +
                                (res.ok ? "ok" : "FAIL");
                }
                v.verified = all;
            }
        } else {
            v.strategy = "lambda-descent";  // resolved in the fixpoint below
        }
        if (v.verified) verified.insert(e.form);
        out.push_back(v);
    }

    // lambda-descent fixpoint for the remaining indices
    bool changed = true;
    while (changed) {
        changed = false;
        for (auto& v : out) {
            if (v.strategy != "lambda-descent" || v.verified) continue;
            for (i64 p : {3, 5, 7}) {
                auto down = watson::lambda(GramLattice(v.form), p).as_diagonal();
                if (down && verified.count(*down)) {
                    v.verified = true;
                    v.detail = "lambda_" + std::to_string(p) + " descends to verified " +
                               down->str();
                    verified.insert(v.form);
                    changed = true;
                    break;
                }
            }
        }
    }
    for (auto& v : out)
        if (v.strategy == "lambda-descent" && !v.verified)
            v.detail = "no lambda descent to a verified form found";
    return out;
}

// ---------------------------------------------------------------------------
// Lemma 5.1 finite checks

const std::vector<i64>& lemma51_e_set(int eta) {
    static const std::vector<i64> e1 = {1, 11 * 19, 13 * 29};
    static const std::vector<i64> e3 = {11, 11 * 17, 13 * 23};
    static const std::vector<i64> e5 = {13, 13 * 17, 11 * 23};
    static const std::vector<i64> e7 = {23, 11 * 13, 17 * 23};
    switch (eta) {
        case 1: return e1;
        case 3: return e3;
        case 5: return e5;
        case 7: return e7;
    }
    throw std::invalid_argument("lemma51_e_set: eta must be 1, 3, 5 or 7");
}

namespace {

std::vector<std::pair<i64, i64>> printed_pairs() {
    const std::vector<std::pair<i64, std::vector<i64>>> rows = {
        {1, {1, 2, 3, 4, 5, 6, 8, 10, 12, 16, 21, 24, 32, 40, 48, 64}},
        {2, {2, 3, 4, 5, 6, 8, 10, 16, 24, 32}},
        {3, {4, 7, 8, 10}},
        {4, {4, 5, 6, 7, 8, 12, 16, 21, 24}},
        {5, {6, 8, 12, 24}},
        {6, {8, 16}},
        {8, {8, 16, 24, 32, 40, 64}},
        {16, {16, 24, 48}},
    };
    std::vector<std::pair<i64, i64>> out;
    for (const auto& [a, bs] : rows)
        for (i64 b : bs) out.emplace_back(a, b);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

Lemma51Report lemma51_finite_checks(const std::vector<DiagonalForm>& stable53_in,
                                    i64 scan_bound) {
    Lemma51Report rep;
    std::set<std::pair<i64, i64>> pairs;
    for (const auto& f : stable53_in) {
        pairs.insert({std::min(f.a, f.b), std::max(f.a, f.b)});
        pairs.insert({std::min(f.a, f.c), std::max(f.a, f.c)});
        pairs.insert({std::min(f.b, f.c), std::max(f.b, f.c)});
    }
    rep.pairs.assign(pairs.begin(), pairs.end());
    rep.pairs_match_printed = rep.pairs == printed_pairs();

    rep.all_pairs_witnessed = true;
    for (const auto& [a, b] : rep.pairs)
        for (int eta : {1, 3, 5, 7}) {
            std::optional<i64> found;
            for (i64 e : lemma51_e_set(eta))
                if (!apbinary::binary_represents(forms::BinaryForm(a, b), e)) {
                    found = e;
                    break;
                }
            if (found) {
                rep.witnesses.push_back({a, b, eta, *found});
            } else {
                rep.all_pairs_witnessed = false;
            }
        }

    rep.scan_i = watson::missing_prime_scan(stable53_in, 11, 151, scan_bound,
                                            watson::VariantType::i);
    rep.scan_ii = watson::missing_prime_scan(stable53_in, 11, 29, scan_bound,
                                             watson::VariantType::ii);
    rep.scan_complete = true;
    for (const auto& v : rep.scan_i) rep.scan_complete = rep.scan_complete && v.exception;
    for (const auto& v : rep.scan_ii) rep.scan_complete = rep.scan_complete && v.exception;
    return rep;
}

}  // namespace oddreg::pipeline
