// oddreg: command-line surface over the verification library.
// Exit codes: 0 = verified / consistent, 1 = discrepancy found, 2 = usage error.
#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "oddreg/apbinary.hpp"
#include "oddreg/arith.hpp"
#include "oddreg/forms.hpp"
#include "oddreg/genus.hpp"
#include "oddreg/pipeline.hpp"
#include "oddreg/regproof.hpp"
#include "oddreg/sieve.hpp"
#include "oddreg/watson.hpp"

using namespace oddreg;
using nlohmann::json;

namespace {

struct RunConfig {
    std::string format = "text";
    unsigned threads = 8;
};

bool json_out(const RunConfig& cfg) { return cfg.format == "json"; }

void emit(const RunConfig& cfg, const json& doc, const std::string& text) {
    if (json_out(cfg))
        std::cout << doc.dump(2) << "\n";
    else
        std::cout << text;
}

json form_json(const forms::GramLattice& l) {
    json j;
    j["gram2"] = l.str();
    if (auto d = l.as_diagonal()) j["diagonal"] = d->str();
    return j;
}

std::vector<forms::DiagonalForm> regular_list() {
    return pipeline::load_regular_list(pipeline::data_dir() + "/jones_pall_102.json");
}

int cmd_verify(const RunConfig& cfg, const std::string& form, const std::string& mode,
               i64 limit) {
    auto l = forms::parse_form(form);
    auto rep = sieve::verify_regularity(l, sieve::parse_mode(mode), limit);
    std::ostringstream t;
    t << "form " << l.str() << " mode " << mode << " bound " << limit << "\n";
    t << "genus condition met: " << (rep.genus_condition_met ? "yes" : "no") << "\n";
    if (rep.exceptions.empty()) {
        t << "exceptions: none\n";
    } else {
        t << "exceptions:";
        for (i64 e : rep.exceptions) t << " " << e;
        t << "\n";
    }
    emit(cfg, json::parse(rep.json()), t.str());
    return rep.exceptions.empty() ? 0 : 1;
}

int cmd_psi(const RunConfig& cfg, int eta, i64 u, i64 v, int w) {
    auto table = apbinary::psi(eta, u, v, w);
    emit(cfg, json::parse(table.json()),
         table.text() + "psi = " + std::to_string(table.psi) + "\n");
    return 0;
}

int cmd_tables(const RunConfig& cfg, int which) {
    json doc;
    std::ostringstream t;
    bool consistent = true;
    if (which == 1) {
        struct Row {
            i64 n;
            int d, w;
        };
        const std::vector<Row> rows = {
            {1, 3, 21},
            {1, 2, 11},
            {257, 1, 8},
            {i64{193} * 401, 0, 6},
            {16, 1, 6},
            {i64{419} * 443, 1, 10},
            {i64{139} * 163 * 443, 0, 8},
            {i64{389} * 397, 1, 10},
            {i64{157} * 173 * 541, 0, 8},
            {i64{431} * 439, 1, 10},
            {i64{167} * 191 * 431, 0, 8},
        };
        doc["table"] = 1;
        for (const auto& r : rows) {
            int got = arith::smallest_w(r.n, r.d);
            consistent = consistent && got == r.w;
            doc["rows"].push_back({{"N", r.n}, {"delta", r.d}, {"w", got}, {"printed", r.w}});
            t << "N=" << r.n << " delta=" << r.d << " w=" << got
              << (got == r.w ? "" : "  MISMATCH (printed " + std::to_string(r.w) + ")") << "\n";
        }
    } else if (which == 2) {
        struct Row {
            int eta;
            i64 u, v;
            int w, psi;
        };
        const std::vector<Row> rows = {
            {1, 1, 193, 16, 8}, {1, 1, 73, 5, 2},    {3, 139, 163, 22, 12},
            {3, 107, 131, 20, 12}, {3, 67, 83, 15, 9}, {3, 59, 67, 12, 7},
            {5, 157, 173, 26, 16}, {5, 53, 61, 13, 8}, {7, 167, 191, 21, 11},
            {7, 127, 151, 17, 9},  {7, 71, 79, 12, 7},
        };
        doc["table"] = 2;
        for (const auto& r : rows) {
            int got = apbinary::psi(r.eta, r.u, r.v, r.w).psi;
            consistent = consistent && got == r.psi;
            doc["rows"].push_back({{"eta", r.eta},
                                   {"u", r.u},
                                   {"v", r.v},
                                   {"w", r.w},
                                   {"psi", got},
                                   {"printed", r.psi}});
            t << "psi_" << r.eta << "(" << r.u << "," << r.v << ";" << r.w << ") = " << got
              << (got == r.psi ? "" : "  MISMATCH (printed " + std::to_string(r.psi) + ")")
              << "\n";
        }
    } else if (which == 3) {
        const std::map<int, std::vector<forms::BinaryForm>> printed = {
            {1, {{1, 1}, {1, 2}, {1, 4}, {1, 8}, {1, 16}}},
            {3, {{1, 2}}},
            {5, {{1, 1}, {1, 4}}},
            {7, {}},
        };
        doc["table"] = 3;
        for (int eta : {1, 3, 5, 7}) {
            auto got = apbinary::universal_set(eta).members;
            auto want = printed.at(eta);
            std::sort(got.begin(), got.end());
            std::sort(want.begin(), want.end());
            consistent = consistent && got == want;
            json row{{"eta", eta}, {"members", json::array()}};
            t << "U(8," << eta << ") =";
            for (const auto& b : got) {
                row["members"].push_back(b.str());
                t << " <" << b.a << "," << b.c << ">";
            }
            if (got.empty()) t << " (empty)";
            t << (got == want ? "" : "  MISMATCH") << "\n";
            doc["rows"].push_back(row);
        }
    } else if (which == 4) {
        doc["table"] = 4;
        for (const auto& e : pipeline::table4()) {
            doc["rows"].push_back(
                {{"index", e.index}, {"form", e.form.str()}, {"open", e.open}});
            t << "L(" << e.index << ") = " << e.form.str() << (e.open ? "  (open)" : "")
              << "\n";
        }
    } else {
        throw CLI::ValidationError("--which must be 1, 2, 3 or 4");
    }
    doc["consistent"] = consistent;
    emit(cfg, doc, t.str());
    return consistent ? 0 : 1;
}

int cmd_watson(const RunConfig& cfg, const std::string& form, i64 p) {
    auto l = forms::parse_form(form);
    auto img = watson::lambda(l, p);
    json doc{{"input", form_json(l)}, {"p", p}, {"lambda", form_json(img)}};
    std::ostringstream t;
    t << "lambda_" << p << "(" << l.str() << ") = " << img.str();
    if (auto d = img.as_diagonal()) t << "  <" << d->a << "," << d->b << "," << d->c << ">";
    t << "\n";
    if (auto d = l.as_diagonal()) {
        auto chain = watson::reduce_to_stable(*d);
        t << "reduction chain to stable:";
        doc["chain"] = json::array();
        for (const auto& [q, g] : chain.steps) {
            t << " --lambda_" << q << "--> " << g.str();
            doc["chain"].push_back({{"p", q}, {"form", g.str()}});
        }
        t << (chain.steps.empty() ? " (already stable)" : "") << "\n";
        doc["terminal"] = chain.terminal.str();
        if (chain.blocked_at) {
            doc["blocked_at"] = *chain.blocked_at;
            t << "descent blocked at p = " << *chain.blocked_at << "\n";
        }
    }
    emit(cfg, doc, t.str());
    return 0;
}

int cmd_genus(const RunConfig& cfg, const std::string& form) {
    auto l = forms::parse_form(form);
    auto g = genus::enumerate_genus(l, 1000000);
    json doc{{"form", form_json(l)}, {"h", g.h()}, {"classes", json::array()}};
    std::ostringstream t;
    t << "gen(" << l.str() << "): h = " << g.h() << "\n";
    for (const auto& c : g.classes) {
        doc["classes"].push_back(form_json(c));
        t << "  class " << c.str();
        if (auto d = c.as_diagonal()) t << "  <" << d->a << "," << d->b << "," << d->c << ">";
        t << "\n";
    }
    emit(cfg, doc, t.str());
    return 0;
}

int cmd_prec(const RunConfig& cfg, const std::string& nstr, const std::string& kstr, i64 l,
             i64 r) {
    auto n = forms::parse_form(nstr);
    auto k = forms::parse_form(kstr);
    auto res = regproof::check_prec(n, k, l, r);
    json doc{{"n", form_json(n)}, {"k", form_json(k)},     {"l", l},
             {"r", r},            {"rset_size", res.rset.vectors.size()},
             {"ok", res.ok}};
    std::ostringstream t;
    t << "N = " << n.str() << ", K = " << k.str() << ", (l,r) = (" << l << "," << r << ")\n";
    t << "R(N,l,r) has " << res.rset.vectors.size() << " vectors; prec "
      << (res.ok ? "holds" : "fails") << "\n";
    if (!res.ok) {
        doc["bad"] = json::array();
        for (const auto& v : res.bad) {
            doc["bad"].push_back({v[0], v[1], v[2]});
            t << "  bad vector (" << v[0] << "," << v[1] << "," << v[2] << ")\n";
        }
    }
    emit(cfg, doc, t.str());
    return res.ok ? 0 : 1;
}

int cmd_trap(const RunConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CLI::ValidationError("cannot open certificate file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    auto cert = regproof::TrapCertificate::from_json(ss.str());
    auto v = regproof::check_trap(cert);
    json doc{{"n", form_json(cert.n)},
             {"k", form_json(cert.k)},
             {"l", cert.l},
             {"r", cert.r},
             {"ok", v.ok},
             {"exclusions", v.exclusions}};
    std::ostringstream t;
    t << "certificate N = " << cert.n.str() << ", K = " << cert.k.str() << ", (l,r) = ("
      << cert.l << "," << cert.r << ")\n";
    if (v.ok) {
        t << "verified; exclusion square-classes:";
        for (i64 e : v.exclusions) t << " " << e;
        t << "\n";
    } else {
        doc["failure"] = v.failure;
        t << "FAILED: " << v.failure << "\n";
    }
    emit(cfg, doc, t.str());
    return v.ok ? 0 : 1;
}

int cmd_enumerate(const RunConfig& cfg, const std::string& stage, i64 n_check, i64 disc_cap,
                  const std::string& out_path) {
    auto reg = regular_list();
    if (stage == "stable") {
        auto res = pipeline::stable_search(n_check, reg);
        auto expect = pipeline::stable_eight();
        std::sort(expect.begin(), expect.end());
        bool consistent = res.audit_ok && res.non_regular == expect;
        json doc{{"stage", "stable"},
                 {"survivors", res.survivors.size()},
                 {"audit_ok", res.audit_ok},
                 {"consistent", consistent},
                 {"non_regular", json::array()}};
        std::ostringstream t;
        t << "stable search: " << res.survivors.size() << " survivors, "
          << res.non_regular.size() << " outside the regular list\n";
        for (const auto& f : res.non_regular) {
            doc["non_regular"].push_back(f.str());
            t << "  " << f.str() << "\n";
        }
        t << "staged-bound audit: " << (res.audit_ok ? "ok" : "FAILED") << "\n";
        emit(cfg, doc, t.str());
        return consistent ? 0 : 1;
    }
    if (stage == "ascent") {
        auto res = pipeline::ascent_search(pipeline::stable53(reg), disc_cap, n_check, reg);
        std::set<forms::DiagonalForm> nonreg, want;
        for (const auto& r : res.records)
            if (r.status != pipeline::Status::regular_known) nonreg.insert(r.form);
        for (const auto& e : pipeline::table4()) want.insert(e.form);
        bool consistent = res.fixpoint && nonreg == want;
        json doc{{"stage", "ascent"},
                 {"records", res.records.size()},
                 {"boundary", res.boundary.size()},
                 {"fixpoint", res.fixpoint},
                 {"consistent", consistent},
                 {"forms", json::array()}};
        std::ostringstream t;
        t << "ascent search: " << res.records.size() << " records ("
          << nonreg.size() << " non-regular), fixpoint "
          << (res.fixpoint ? "reached" : "NOT reached") << ", " << res.boundary.size()
          << " boundary rejections\n";
        for (const auto& r : res.records) {
            doc["forms"].push_back(
                {{"form", r.form.str()}, {"status", pipeline::status_name(r.status)}});
            t << "  " << r.form.str() << "  " << pipeline::status_name(r.status) << "\n";
        }
        emit(cfg, doc, t.str());
        return consistent ? 0 : 1;
    }
    if (stage == "full") {
        auto stable = pipeline::stable_search(n_check, reg);
        auto ascent = pipeline::ascent_search(pipeline::stable53(reg), disc_cap, n_check, reg);
        auto all = pipeline::assemble_candidates(reg, stable, ascent);
        std::string payload = pipeline::candidates_json(all);
        if (!out_path.empty()) {
            std::ofstream out(out_path);
            out << payload;
        }
        std::ostringstream t;
        std::map<std::string, int> by;
        for (const auto& r : all) by[pipeline::status_name(r.status)]++;
        t << "assembled " << all.size() << " candidates\n";
        for (const auto& [k, v] : by) t << "  " << k << ": " << v << "\n";
        if (!out_path.empty()) t << "written to " << out_path << "\n";
        emit(cfg, json::parse(payload), t.str());
        return all.size() == 147 ? 0 : 1;
    }
    throw CLI::ValidationError("--stage must be stable, ascent or full");
}

int cmd_lemma51(const RunConfig& cfg, i64 bound) {
    auto rep = pipeline::lemma51_finite_checks(pipeline::stable53(regular_list()), bound);
    bool consistent = rep.pairs.size() == 54 && rep.pairs_match_printed &&
                      rep.all_pairs_witnessed && rep.scan_complete;
    json doc{{"pairs", rep.pairs.size()},
             {"pairs_match_printed", rep.pairs_match_printed},
             {"all_pairs_witnessed", rep.all_pairs_witnessed},
             {"scan_i_variants", rep.scan_i.size()},
             {"scan_ii_variants", rep.scan_ii.size()},
             {"scan_complete", rep.scan_complete},
             {"consistent", consistent}};
    std::ostringstream t;
    t << "pairs: " << rep.pairs.size() << " (match printed: "
      << (rep.pairs_match_printed ? "yes" : "NO") << ")\n";
    t << "every (eta, pair) witnessed: " << (rep.all_pairs_witnessed ? "yes" : "NO") << "\n";
    t << "missing-prime scan: " << rep.scan_i.size() << " type-(i) + " << rep.scan_ii.size()
      << " type-(ii) variants, exceptions found for all: "
      << (rep.scan_complete ? "yes" : "NO") << "\n";
    emit(cfg, doc, t.str());
    return consistent ? 0 : 1;
}

int cmd_kaplansky(const RunConfig& cfg, i64 limit) {
    bool ok = sieve::kaplansky_check(limit);
    json doc{{"bound", limit}, {"ok", ok}};
    std::ostringstream t;
    t << "the three odd-universal forms cover every odd n <= " << limit << ": "
      << (ok ? "yes" : "NO") << "\n";
    emit(cfg, doc, t.str());
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"oddreg: regular ternary form verification toolkit"};
    app.require_subcommand(1);
    RunConfig cfg;
    app.add_option("--format", cfg.format, "Output format")
        ->check(CLI::IsMember({"text", "json"}))
        ->capture_default_str();
    app.add_option("--threads", cfg.threads, "Worker-thread cap for parallel phases")
        ->check(CLI::Range(1u, 256u))
        ->capture_default_str();

    std::string form, mode = "full", nstr, kstr, cert_path, stage, out_path;
    i64 limit = 1000000, p = 2, prec_l = 0, prec_r = 0;
    i64 n_check = 100000, disc_cap = 10000, scan_bound = 100000, kap_limit = 1000000;
    int eta = 1, psi_w = 1, which = 1;
    i64 psi_u = 1, psi_v = 1;

    auto* verify = app.add_subcommand("verify", "Bounded regularity check of one form");
    verify->add_option("--form", form, "a,b,c or six doubled-Gram entries")->required();
    verify->add_option("--mode", mode, "odd | even | full")->capture_default_str();
    verify->add_option("--limit", limit, "Check bound")->check(CLI::PositiveNumber);

    auto* psi = app.add_subcommand("psi", "psi_eta(u,v;w) table");
    psi->add_option("--eta", eta)->required()->check(CLI::IsMember({1, 3, 5, 7}));
    psi->add_option("--u", psi_u)->required()->check(CLI::PositiveNumber);
    psi->add_option("--v", psi_v)->required()->check(CLI::PositiveNumber);
    psi->add_option("--w", psi_w)->required()->check(CLI::PositiveNumber);

    auto* tables = app.add_subcommand("tables", "Reproduce a printed table");
    tables->add_option("--which", which, "1 | 2 | 3 | 4")->required();

    auto* watson = app.add_subcommand("watson", "lambda_p transform and reduction chain");
    watson->add_option("--form", form)->required();
    watson->add_option("--p", p, "2 or an odd prime")->required();

    auto* genus = app.add_subcommand("genus", "Enumerate the genus of a form");
    genus->add_option("--form", form)->required();

    auto* prec = app.add_subcommand("prec", "Check N prec_{l,r} K");
    prec->add_option("--n", nstr, "six doubled-Gram entries")->required();
    prec->add_option("--k", kstr, "six doubled-Gram entries")->required();
    prec->add_option("--l", prec_l)->required()->check(CLI::PositiveNumber);
    prec->add_option("--r", prec_r)->required();

    auto* trap = app.add_subcommand("trap", "Verify a trap certificate");
    trap->add_option("--cert", cert_path, "certificate JSON file")->required();

    auto* enumerate = app.add_subcommand("enumerate", "Candidate searches");
    enumerate->add_option("--stage", stage, "stable | ascent | full")->required();
    enumerate->add_option("--limit", n_check, "Bounded-regularity check bound")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    enumerate->add_option("--disc-cap", disc_cap, "Ascent discriminant cap")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    enumerate->add_option("--out", out_path, "Write candidates JSON to this file");

    auto* lemma51 = app.add_subcommand("lemma51", "Missing-prime finite checks");
    lemma51->add_option("--limit", scan_bound, "Scan bound")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();

    auto* kaplansky = app.add_subcommand("kaplansky", "Odd-universal sanity check");
    kaplansky->add_option("--limit", kap_limit)
        ->check(CLI::PositiveNumber)
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    worker_threads() = cfg.threads;
    try {
        if (*verify) return cmd_verify(cfg, form, mode, limit);
        if (*psi) return cmd_psi(cfg, eta, psi_u, psi_v, psi_w);
        if (*tables) return cmd_tables(cfg, which);
        if (*watson) return cmd_watson(cfg, form, p);
        if (*genus) return cmd_genus(cfg, form);
        if (*prec) return cmd_prec(cfg, nstr, kstr, prec_l, prec_r);
        if (*trap) return cmd_trap(cfg, cert_path);
        if (*enumerate) return cmd_enumerate(cfg, stage, n_check, disc_cap, out_path);
        if (*lemma51) return cmd_lemma51(cfg, scan_bound);
        if (*kaplansky) return cmd_kaplansky(cfg, kap_limit);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
