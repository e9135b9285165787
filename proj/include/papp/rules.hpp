#pragma once

#include "papp/model.hpp"
#include "papp/rational.hpp"

namespace papp {

/// Non-increasing Thiele weight vector with w1 = 1, exact rationals.
/// Entries beyond position k never matter since W(A_i) <= k; callers
/// materialize at least k entries.
struct WeightVector {
    std::vector<Rational> entries;

    static WeightVector av(int len);
    static WeightVector pav(int len);
    static WeightVector ccav(int len);
    // Extends the given prefix by repeating its last entry.
    static WeightVector from_prefix(std::vector<Rational> prefix, int len);

    void validate() const;
    int size() const { return static_cast<int>(entries.size()); }
    const Rational& w(int j) const { return entries.at(j - 1); } // 1-based

    /// Sum of the first j weights (score a ballot contributes per j covered seats).
    Rational prefix_sum(int j) const;

    bool is_av() const;   // all ones
    bool is_ccav() const; // (1, 0, 0, ...)

    /// First index j with w_j < 1, if any.
    std::optional<int> first_index_below_one() const;
};

/// Linear tie-breaking order: parties listed best-first. Induces the
/// committee order >_k by lexicographic comparison of committees written
/// as rank-sorted party sequences.
struct TieBreakOrder {
    std::vector<Party> order; // order[0] is the best party

    static TieBreakOrder identity(int m);
    static TieBreakOrder from_parties(std::vector<Party> parties);

    int m() const { return static_cast<int>(order.size()); }
    int rank(Party p) const;

    /// true if lhs precedes rhs in >_k (lhs is the preferred committee).
    bool prefers(const Committee& lhs, const Committee& rhs) const;

    /// Committees of size k in this order's >_k sequence.
    std::vector<Committee> committees_in_order(int k) const;
};

/// Divisor function g: either the Jefferson preset g(t) = t + 1 or a
/// finite table of positive rationals.
struct DivisorFunction {
    std::optional<std::vector<Rational>> table; // empty = Jefferson

    static DivisorFunction jefferson() { return {}; }
    static DivisorFunction from_table(std::vector<Rational> t);

    Rational operator()(int t) const;
    bool is_jefferson() const { return !table.has_value(); }
};

/// Majoritarian-portioning weights; parties never selected hold weight 0.
struct PortioningWeights {
    std::vector<long long> weights; // per party

    long long total() const;
    std::string to_string() const;
};

// ---- rules -------------------------------------------------------------

Rational thiele_score(const WeightVector& w, const Committee& committee,
                      const AnonymousProfile& a);

Committee thiele_select(const WeightVector& w, const AnonymousProfile& a, int k,
                        const TieBreakOrder& tb);

Committee seq_thiele_select(const WeightVector& w, const AnonymousProfile& a, int k,
                            const TieBreakOrder& tb);

PortioningWeights majoritarian_portioning(const AnonymousProfile& a,
                                          const TieBreakOrder& tb);

Committee divisor_apportion(const PortioningWeights& weights, const DivisorFunction& g,
                            int k, const TieBreakOrder& tb);

/// The k=2 AV variant: clone removal by the tie-break order, then both
/// seats to the AV winner unless exactly the n/2-score tie case applies.
Committee av_variant_k2_select(const AnonymousProfile& a, const TieBreakOrder& tb);

// ---- CLI-facing rule dispatch ------------------------------------------

/// Rule as a total function (profile, k) -> committee.
using RuleFn = std::function<Committee(const AnonymousProfile&, int)>;

/// Parses a rule name: av, pav, ccav, thiele:<w1,w2,...>, seq-pav,
/// seq-thiele:<...>, mp-jefferson, mp-divisor:<g0,g1,...>, av-variant-k2.
/// The returned closure applies the given tie-break order.
RuleFn make_rule(const std::string& name, const TieBreakOrder& tb);

/// The weight vector behind a (seq-)Thiele rule name, materialized to k
/// entries; nullopt for non-Thiele names.
std::optional<WeightVector> rule_weight_vector(const std::string& name, int k);

Rational parse_rational(const std::string& s);

} // namespace papp
