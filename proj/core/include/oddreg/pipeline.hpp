#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "oddreg/forms.hpp"
#include "oddreg/watson.hpp"

namespace oddreg::pipeline {

/// Classification status of a candidate diagonal form.
enum class Status {
    regular_known,       // member of the 102-form regular list
    stable_odd_regular,  // one of the 8 stable non-regular survivors
    nonstable_verified,  // non-stable, odd-regularity proved
    open_bounded,        // non-stable, only bounded verification available
};

std::string status_name(Status s);

struct CandidateRecord {
    forms::DiagonalForm form;
    Status status;
    std::string provenance;  // search stage or ascent chain
    i64 bound = 0;           // bounded odd-regularity check bound
    bool passed = false;
    // lambda_p reduction chain to a stable terminal (empty when stable)
    std::vector<std::pair<i64, forms::DiagonalForm>> chain;
};

/// One terminal enumeration region of the stable-candidate search.
struct SearchRegion {
    int alpha;
    i64 a_max;
    std::vector<i64> b_set;  // when nonempty, b is drawn from this set
    i64 b_max;               // otherwise b <= b_max
    i64 c_max;
    std::vector<std::pair<i64, i64>> excluded_ab;  // side conditions on (a,b)
};

/// The terminal regions established by the four staged-bound lemmas.
std::vector<SearchRegion> terminal_regions();

/// One staged-bound replay: every arithmetic fact the lemma chains through
/// (prime values q_{alpha,i}, smallest_w thresholds, psi values, product
/// inequalities), re-computed and compared to the claimed constants.
struct StageAudit {
    int alpha;
    std::vector<std::string> steps;
    bool ok = true;
};

/// Re-derives the staged bound sequences of all four lemmas.
std::vector<StageAudit> replay_stages();

/// Loads the 102-form regular list data asset (JSON).
std::vector<forms::DiagonalForm> load_regular_list(const std::string& path);

/// Data directory: $ODDREG_DATA_DIR when set, else "data".
std::string data_dir();

struct StableSearchResult {
    std::vector<CandidateRecord> survivors;  // all bounded-odd-regular survivors
    std::vector<forms::DiagonalForm> non_regular;  // survivors outside the regular list
    std::vector<StageAudit> audit;
    bool audit_ok = true;
};

/// Enumerates the terminal regions, filters by stability, 2-adic stage
/// hypothesis and bounded odd-regularity, and splits survivors into
/// known-regular vs non-regular. regular_list is the 102-form asset.
StableSearchResult stable_search(i64 n_check,
                                 const std::vector<forms::DiagonalForm>& regular_list);

struct AscentResult {
    std::vector<CandidateRecord> records;  // non-stable forms found (regular ones
                                           // are tagged regular_known)
    std::vector<forms::DiagonalForm> boundary;  // rejected only by the disc cap
    bool fixpoint = false;
    std::vector<std::string> log;  // audit: each accepted ascent step
};

/// Closes stable_set under single-prime coefficient ascents at p in {3,5,7}
/// whose lambda_p maps back to the parent, keeping bounded-odd-regular
/// children with disc <= disc_cap, iterated to a fixpoint. regular_list
/// members among the finds are tagged regular_known.
AscentResult ascent_search(const std::vector<forms::DiagonalForm>& stable_set,
                           i64 disc_cap, i64 n_check,
                           const std::vector<forms::DiagonalForm>& regular_list);

/// The printed 37-entry candidate table L(1)..L(37) (1-based index), with
/// the open flag for the six forms whose odd-regularity is unresolved.
struct TableEntry {
    int index;
    forms::DiagonalForm form;
    bool open;
};
const std::vector<TableEntry>& table4();

/// Full 147-candidate assembly: 102 regular + 8 stable + 37 non-stable.
std::vector<CandidateRecord> assemble_candidates(
    const std::vector<forms::DiagonalForm>& regular_list,
    const StableSearchResult& stable, const AscentResult& ascent);

std::string candidates_json(const std::vector<CandidateRecord>& list);

/// Verdict for one of the 8 stable non-regular forms: genus mate, proof
/// strategy (sublattice chain or prec certificates), bounded re-check.
struct Theorem48Verdict {
    int index;  // 1..8
    forms::DiagonalForm form;
    forms::GramLattice mate;       // M(i), the other class in the genus
    std::string strategy;          // "chain" or "prec"
    bool verified = false;         // structural argument checked
    bool bounded_ok = false;       // sieve check clean up to bound
    std::string detail;
};

std::vector<Theorem48Verdict> verify_theorem48(i64 bound);

/// Verdict for one of the 37 non-stable candidates.
struct Theorem54Verdict {
    int index;  // 1..37
    forms::DiagonalForm form;
    std::string strategy;  // "proposition", "parity", "prec", "lambda-descent",
                           // "open"
    bool verified = false;   // odd-regularity proved by the dispatched argument
    bool bounded_ok = false; // sieve check clean up to bound
    std::string detail;
};

/// Dispatches the proof strategy for each of the 37 candidates; cert_dir
/// holds the trap-certificate JSON files for i in {1,15}.
std::vector<Theorem54Verdict> verify_theorem54(i64 bound, const std::string& cert_dir);

/// Finite checks behind the missing-prime bound.
struct Lemma51Report {
    std::vector<std::pair<i64, i64>> pairs;  // regenerated (a,b) pairs, sorted
    bool pairs_match_printed = false;
    struct PairWitness {
        i64 a, b;
        int eta;
        i64 e;  // member of E_eta not represented by <a,b>
    };
    std::vector<PairWitness> witnesses;
    bool all_pairs_witnessed = false;
    std::vector<watson::MissingPrimeVerdict> scan_i, scan_ii;
    bool scan_complete = false;  // every variant has an exception <= scan bound
};

/// E_eta of the missing-prime lemma.
const std::vector<i64>& lemma51_e_set(int eta);

/// stable53 = 45 stable regular + 8 stable non-regular forms.
Lemma51Report lemma51_finite_checks(const std::vector<forms::DiagonalForm>& stable53,
                                    i64 scan_bound);

/// The 53 stable odd-regular forms assembled from the data asset.
std::vector<forms::DiagonalForm> stable53(const std::vector<forms::DiagonalForm>& regular_list);

/// The 8 stable non-regular forms of the stable classification theorem.
const std::vector<forms::DiagonalForm>& stable_eight();

}  // namespace oddreg::pipeline
