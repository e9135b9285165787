#pragma once

#include "papp/axioms.hpp"
#include "papp/rules.hpp"

namespace papp {

/// A reproducible manipulation counterexample: profile pair differing in one
/// ballot, plus the committees the rule must produce under the stated
/// tie-break orders.
enum class RuleFamily { Thiele, SeqThiele, DivisorMp };

struct CounterexampleBundle {
    RuleFamily family;
    WeightVector weights;      // Thiele / SeqThiele
    DivisorFunction divisor;   // DivisorMp
    AnonymousProfile profile;
    AnonymousProfile deviated_profile;
    Ballot true_ballot;
    int k = 0;

    struct Expectation {
        TieBreakOrder tb;
        Committee committee;          // f(A, k)
        Committee deviated_committee; // f(A', k)
        bool violates_sp_unrepresented = false;
    };
    std::vector<Expectation> expectations;

    // portioning weights implied by the divisor construction
    std::optional<PortioningWeights> expected_weights;
    std::optional<PortioningWeights> expected_weights_deviated;

    // construction parameters, for reporting
    int j_star = 0;
    int ell = 0;

    /// Evaluates the bundle's rule on a profile under a tie-break order.
    Committee evaluate(const AnonymousProfile& a, const TieBreakOrder& tb) const;
};

/// Thiele manipulation profile: j0 = first weight index below 1,
/// m = 2*j0 parties, n = 2*C(2j0, j0) - 2 voters, k = j0.
/// Rejects AV and CCAV.
CounterexampleBundle build_thiele_counterexample(const WeightVector& w);

/// Sequential-Thiele counterexample on m = 4 parties, n = 4*ell + 1 voters,
/// where ell >= 4 is minimal with w_{j*} < (ell-2)/ell. Rejects AV.
CounterexampleBundle build_seq_thiele_counterexample(const WeightVector& w);

/// Divisor-method counterexample: searches the minimal j* with some ell
/// satisfying (ell+1)/g(j) <= ell/g(0) (bounded search), adjusting ell* = 1
/// to 3; m = 4, n = 4*ell* + 4, k = j* + 1. Errors when no pair exists
/// within the bound (AV-like divisor functions).
struct DivisorSearchBounds {
    int max_j = 64;
    long long max_ell = 1 << 16;
};

CounterexampleBundle build_divisor_mp_counterexample(
    const DivisorFunction& g, const DivisorSearchBounds& bounds = {});

/// Evaluates the bundle's rule on both profiles under every stated
/// tie-break order and checks the expectations; throws on mismatch.
void verify_bundle(const CounterexampleBundle& bundle);

} // namespace papp
