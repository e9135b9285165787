#pragma once

#include "papp/model.hpp"
#include "papp/rules.hpp"

namespace papp {

/// A total deterministic rule over a stated domain. Anonymity holds by
/// construction since the input is an anonymous profile.
using RuleOracle = RuleFn;

enum class Axiom {
    Strategyproofness,
    SpUnrepresented,
    WeakRepresentation,
    WeakProportionalRepresentation,
    ParetoOptimality,
};

Axiom parse_axiom(const std::string& tag);
std::string axiom_name(Axiom axiom);

/// Concrete counterexample to an axiom, reproducible by re-running the rule.
struct ViolationWitness {
    Axiom axiom;
    AnonymousProfile profile;
    Committee committee;
    // present for the strategyproofness variants
    std::optional<Ballot> true_ballot;
    std::optional<AnonymousProfile> deviated_profile;
    std::optional<Committee> deviated_committee;
    int seats_before = 0; // f(A, k, true_ballot)
    int seats_after = 0;  // f(A', k, true_ballot)

    std::string to_json() const;
};

// ---- committee filters ---------------------------------------------------

/// Parties y dominated by some x: every y-approver also approves x and a
/// voter approves x without y.
std::vector<Party> pareto_dominated_parties(const AnonymousProfile& a);

/// Parties each uniquely approved by at least n/k voters (the WR set X).
std::vector<Party> wr_required_parties(const AnonymousProfile& a, int k);

/// Committees W with W(x) >= 1 for every x uniquely approved by >= n/k voters.
std::vector<Committee> wr_committees(const AnonymousProfile& a, int k);

/// Committees W with W(x) >= l whenever x is uniquely approved by >= l*n/k voters.
std::vector<Committee> wpr_committees(const AnonymousProfile& a, int k);

/// Nested-ballot chain bounds: per-ballot lower bounds on W(ballot parties)
/// implied by strategyproofness + weak representation. Max-weight chains over
/// the subset lattice are computed exactly; requires m <= 8.
struct CleverWrContext {
    Ballot required_set; // X as a mask
    std::vector<std::pair<Ballot, int>> ballot_lower_bounds; // W(B) >= bound
};

CleverWrContext clever_wr_context(const AnonymousProfile& a, int k);

/// wr_committees further filtered by the chain bounds.
std::vector<Committee> clever_wr_committees(const AnonymousProfile& a, int k);

/// For each ballot X present: the largest l <= min(|X|, k) with
/// count(X) >= l * ceil(n/k); a lower bound f(A, k, X) >= l for any
/// anonymous rule with strategyproofness + weak representation.
std::vector<std::pair<Ballot, int>> fact2_bounds(const AnonymousProfile& a, int k);

// ---- exhaustive checking ---------------------------------------------------

struct CheckOptions {
    bool collect_all = false;
    int jobs = 1;
};

struct CheckResult {
    std::vector<ViolationWitness> witnesses; // canonical order; empty = pass
    uint64_t profiles_checked = 0;
    bool passed() const { return witnesses.empty(); }
};

/// Exhaustively scans the domain (and all in-domain single-voter deviations
/// for the strategyproofness variants). Returns the first violation in
/// canonical order, or all when collect_all is set. Deterministic for any
/// worker count.
CheckResult check_axiom(const RuleOracle& rule, Axiom axiom, const DomainSpec& spec,
                        const CheckOptions& opts = {});

// ---- rule lifts between committee sizes ------------------------------------

enum class LiftKind {
    ReplicateVoters, // g(A,k) = f(replicated A, k)
    CloneParty,      // clone x into a fresh party, merge its seats back
    ClonePlusSeat,   // clone, add n/k voters with ballot xy, drop one xy seat
    WprExtraSeat,    // add n/k voters approving only x, drop one x seat
};

struct LiftSpec {
    LiftKind kind;
    int ell = 1;   // ReplicateVoters factor
    Party x = 0;   // cloned / boosted party
};

/// The derived rule g of the respective induction proof. For the clone
/// lifts the seats of the clone pair are merged onto x so g outputs a
/// committee over the original m parties.
RuleOracle lift_rule(const RuleOracle& f, const LiftSpec& lift);

} // namespace papp
