#include <algorithm>
#include <set>

#include "doctest.h"
#include "json.hpp"
#include "oddreg/pipeline.hpp"

using namespace oddreg;
using namespace oddreg::forms;
using namespace oddreg::pipeline;

namespace {

std::vector<DiagonalForm> regular102() {
    static std::vector<DiagonalForm> list =
        load_regular_list(data_dir() + "/jones_pall_102.json");
    return list;
}

}  // namespace

TEST_CASE("status names") {
    CHECK(status_name(Status::regular_known) == "regular-known");
    CHECK(status_name(Status::stable_odd_regular) == "stable-odd-regular");
    CHECK(status_name(Status::nonstable_verified) == "nonstable-verified");
    CHECK(status_name(Status::open_bounded) == "open");
}

TEST_CASE("regular list asset loads") {
    auto list = regular102();
    REQUIRE(list.size() == 102);
    CHECK(std::count(list.begin(), list.end(), DiagonalForm(1, 1, 1)) == 1);
    CHECK(std::count(list.begin(), list.end(), DiagonalForm(1, 2, 3)) == 1);
    // forms are primitive and sorted
    for (const auto& f : list) {
        CHECK(f.a <= f.b);
        CHECK(f.b <= f.c);
        CHECK(std::gcd(std::gcd(f.a, f.b), f.c) == 1);
        CHECK(f.disc() <= 14400);
    }
    CHECK(stable53(list).size() == 53);
}

TEST_CASE("terminal regions") {
    auto regs = terminal_regions();
    REQUIRE(regs.size() == 5);
    CHECK(regs[0].alpha == 1);
    CHECK(regs[0].b_set == std::vector<i64>{1, 2, 4, 8, 16});
    CHECK(regs[0].c_max == 1633);
    CHECK(regs[1].b_max == 73);
    CHECK(regs[1].c_max == 97);
    CHECK(regs[2].alpha == 3);
    CHECK(regs[2].a_max == 59);
    CHECK(regs[2].c_max == 179);
    CHECK(regs[3].alpha == 5);
    CHECK(regs[3].c_max == 197);
    CHECK(regs[3].excluded_ab.size() == 2);
    CHECK(regs[4].alpha == 7);
    CHECK(regs[4].a_max == 71);
    CHECK(regs[4].b_max == 79);
    CHECK(regs[4].c_max == 199);
}

TEST_CASE("staged bound replay is internally consistent") {
    auto audits = replay_stages();
    REQUIRE(audits.size() == 5);
    for (const auto& a : audits) {
        INFO("alpha = ", a.alpha);
        CHECK(a.ok);
        CHECK(!a.steps.empty());
    }
}

TEST_CASE("stable search finds exactly the eight non-regular survivors") {
    auto res = stable_search(20000, regular102());
    CHECK(res.audit_ok);
    CHECK(res.survivors.size() == 53);
    REQUIRE(res.non_regular.size() == 8);
    auto expect = stable_eight();
    std::sort(expect.begin(), expect.end());
    CHECK(res.non_regular == expect);
}

TEST_CASE("ascent search reproduces the 37-candidate table") {
    auto reg = regular102();
    auto res = ascent_search(stable53(reg), 10000, 20000, reg);
    CHECK(res.fixpoint);
    std::set<DiagonalForm> nonreg, open;
    for (const auto& r : res.records) {
        if (r.status != Status::regular_known) nonreg.insert(r.form);
        if (r.status == Status::open_bounded) open.insert(r.form);
        // every record carries a reduction chain ending at a stable form
        CHECK(r.passed);
    }
    std::set<DiagonalForm> want, want_open;
    for (const auto& e : table4()) {
        want.insert(e.form);
        if (e.open) want_open.insert(e.form);
    }
    CHECK(nonreg == want);
    CHECK(open == want_open);
    CHECK(want_open.size() == 6);
}

TEST_CASE("candidate assembly reaches 147 and serializes") {
    auto reg = regular102();
    auto stable = stable_search(20000, reg);
    auto ascent = ascent_search(stable53(reg), 10000, 20000, reg);
    auto all = assemble_candidates(reg, stable, ascent);
    REQUIRE(all.size() == 147);
    std::set<DiagonalForm> uniq;
    for (const auto& r : all) uniq.insert(r.form);
    CHECK(uniq.size() == 147);

    auto doc = nlohmann::json::parse(candidates_json(all));
    CHECK(doc.at("count").get<std::size_t>() == 147);
    CHECK(doc.at("candidates").size() == 147);
    // counts by status: 102 regular, 8 stable, 31 verified, 6 open
    std::map<std::string, int> by;
    for (const auto& rec : doc.at("candidates")) by[rec.at("status").get<std::string>()]++;
    CHECK(by["regular-known"] == 102);
    CHECK(by["stable-odd-regular"] == 8);
    CHECK(by["nonstable-verified"] == 31);
    CHECK(by["open"] == 6);
}

TEST_CASE("table 4 constants") {
    const auto& t = table4();
    REQUIRE(t.size() == 37);
    CHECK(t[0].form == DiagonalForm(1, 1, 36));
    CHECK(t[11].form == DiagonalForm(3, 4, 27));
    CHECK(t[36].form == DiagonalForm(3, 8, 216));
    int open = 0;
    for (const auto& e : t) open += e.open;
    CHECK(open == 6);
    for (std::size_t i = 0; i < t.size(); ++i) CHECK(t[i].index == static_cast<int>(i) + 1);
}

TEST_CASE("theorem 4.8 verification") {
    auto verdicts = verify_theorem48(20000);
    REQUIRE(verdicts.size() == 8);
    int chain = 0, prec = 0;
    for (const auto& v : verdicts) {
        INFO("i = ", v.index, ": ", v.detail);
        CHECK(v.verified);
        CHECK(v.bounded_ok);
        if (v.strategy == "chain") ++chain;
        if (v.strategy == "prec") ++prec;
    }
    CHECK(chain == 5);
    CHECK(prec == 3);
}

TEST_CASE("theorem 5.4 verification") {
    auto verdicts = verify_theorem54(20000, data_dir() + "/certs");
    REQUIRE(verdicts.size() == 37);
    const std::set<int> open = {6, 18, 26, 27, 34, 37};
    for (const auto& v : verdicts) {
        INFO("i = ", v.index, " (", v.strategy, "): ", v.detail);
        CHECK(v.bounded_ok);
        CHECK(v.verified == !open.count(v.index));
    }
    CHECK(verdicts[0].strategy == "proposition");
    CHECK(verdicts[1].strategy == "parity");
    CHECK(verdicts[11].strategy == "prec");
    CHECK(verdicts[2].strategy == "lambda-descent");
    CHECK(verdicts[14].strategy == "proposition");
}

TEST_CASE("lemma 5.1 E-sets") {
    CHECK(lemma51_e_set(1) == std::vector<i64>{1, 209, 377});
    CHECK(lemma51_e_set(3) == std::vector<i64>{11, 187, 299});
    CHECK(lemma51_e_set(5) == std::vector<i64>{13, 221, 253});
    CHECK(lemma51_e_set(7) == std::vector<i64>{23, 143, 391});
    CHECK_THROWS_AS(lemma51_e_set(2), std::invalid_argument);
}

TEST_CASE("lemma 5.1 pair regeneration and witnesses") {
    auto rep = lemma51_finite_checks(stable53(regular102()), 2000);
    CHECK(rep.pairs.size() == 54);
    CHECK(rep.pairs_match_printed);
    CHECK(rep.all_pairs_witnessed);
    // one witness per (pair, eta)
    CHECK(rep.witnesses.size() == 54 * 4);
    // scans ran over every variant shape
    CHECK(rep.scan_i.size() == 4480);
    CHECK(rep.scan_ii.size() == 445);
}
