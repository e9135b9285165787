#include "papp/constructions.hpp"

#include <numeric>

namespace papp {

namespace {

uint64_t binomial(int n, int k) {
    uint64_t r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

} // namespace

Committee CounterexampleBundle::evaluate(const AnonymousProfile& a,
                                         const TieBreakOrder& tb) const {
    switch (family) {
        case RuleFamily::Thiele: {
            auto w = WeightVector::from_prefix(weights.entries, k);
            return thiele_select(w, a, k, tb);
        }
        case RuleFamily::SeqThiele: {
            auto w = WeightVector::from_prefix(weights.entries, k);
            return seq_thiele_select(w, a, k, tb);
        }
        case RuleFamily::DivisorMp:
            return divisor_apportion(majoritarian_portioning(a, tb), divisor, k, tb);
    }
    throw std::logic_error("unreachable");
}

CounterexampleBundle build_thiele_counterexample(const WeightVector& w) {
    w.validate();
    auto j0_opt = w.first_index_below_one();
    if (!j0_opt) throw std::invalid_argument("AV admits no Thiele counterexample");
    int j0 = *j0_opt;
    if (w.w(j0) == 0 && j0 < 3)
        throw std::invalid_argument("CCAV admits no Thiele counterexample");

    int m = 2 * j0;
    if (m > kMaxParties) throw std::invalid_argument("committee size too large to build");
    Ballot a_block, b_block;
    for (int i = 0; i < j0; ++i) a_block.mask |= 1u << i;
    for (int i = j0; i < m; ++i) b_block.mask |= 1u << i;
    Party b1 = j0;

    std::vector<std::pair<Ballot, int>> raw;
    raw.emplace_back(a_block, 1);             // voter 1
    raw.emplace_back(Ballot(1u << b1), 1);    // voter 2
    for (uint32_t mask = 1; mask < (1u << m); ++mask) {
        if (std::popcount(mask) != j0) continue;
        if (mask == a_block.mask || mask == b_block.mask) continue;
        raw.emplace_back(Ballot(mask), 2);
    }
    CounterexampleBundle bundle;
    bundle.family = RuleFamily::Thiele;
    bundle.weights = w;
    bundle.k = j0;
    bundle.j_star = j0;
    bundle.profile = AnonymousProfile::make(m, std::move(raw));
    bundle.true_ballot = Ballot(1u << b1);
    bundle.deviated_profile = bundle.profile.with_moved_ballot(bundle.true_ballot, b_block);

    if (bundle.profile.n != static_cast<int>(2 * binomial(m, j0) - 2))
        throw std::logic_error("voter count mismatch in Thiele construction");

    Committee w_a(m), w_b(m);
    for (int i = 0; i < j0; ++i) w_a.seats[i] = 1;
    for (int i = j0; i < m; ++i) w_b.seats[i] = 1;

    // Under the identity order the tie in A' resolves toward the a-block;
    // swapping the roles of the two blocks exhibits the manipulation.
    std::vector<Party> swapped;
    for (int i = j0; i < m; ++i) swapped.push_back(i);
    for (int i = 0; i < j0; ++i) swapped.push_back(i);

    bundle.expectations.push_back(
        {TieBreakOrder::identity(m), w_a, w_a, false});
    bundle.expectations.push_back(
        {TieBreakOrder::from_parties(swapped), w_a, w_b, true});
    return bundle;
}

CounterexampleBundle build_seq_thiele_counterexample(const WeightVector& w) {
    w.validate();
    auto j_opt = w.first_index_below_one();
    if (!j_opt) throw std::invalid_argument("AV admits no sequential counterexample");
    int j_star = *j_opt;
    Rational wj = w.w(j_star);
    int ell = 4;
    while (!(wj < Rational(ell - 2, ell))) ++ell;

    const Party a = 0, b = 1, c = 2, d = 3;
    CounterexampleBundle bundle;
    bundle.family = RuleFamily::SeqThiele;
    bundle.weights = w;
    bundle.k = j_star;
    bundle.j_star = j_star;
    bundle.ell = ell;
    bundle.profile = AnonymousProfile::make(
        4, {{Ballot::of({b}), 1},
            {Ballot::of({a, b}), ell},
            {Ballot::of({b, d}), ell},
            {Ballot::of({a, c}), ell},
            {Ballot::of({c, d}), ell - 1},
            {Ballot::of({d}), 1}});
    bundle.true_ballot = Ballot::of({d});
    bundle.deviated_profile =
        bundle.profile.with_moved_ballot(bundle.true_ballot, Ballot::of({a, d}));

    Committee before(4), after(4);
    before.seats[b] = j_star - 1;
    before.seats[c] = 1;
    after.seats[a] = j_star - 1;
    after.seats[d] = 1;
    bundle.expectations.push_back({TieBreakOrder::identity(4), before, after, true});
    return bundle;
}

CounterexampleBundle build_divisor_mp_counterexample(const DivisorFunction& g,
                                                     const DivisorSearchBounds& bounds) {
    // minimal j with some ell satisfying (ell+1)/g(j) <= ell/g(0), i.e.
    // ell * (g(j) - g(0)) >= g(0); then the minimal such ell.
    int max_j = bounds.max_j;
    if (g.table) max_j = std::min<int>(max_j, static_cast<int>(g.table->size()) - 1);
    Rational g0 = g(0);
    int j_star = -1;
    long long ell_star = -1;
    for (int j = 1; j <= max_j; ++j) {
        Rational gap = g(j) - g0;
        if (gap <= 0) continue;
        Rational ell_min = g0 / gap; // ell = ceil(g0 / gap)
        BigInt ell_i = numerator(ell_min) / denominator(ell_min);
        if (Rational(ell_i) < ell_min) ++ell_i;
        if (ell_i > bounds.max_ell) continue;
        j_star = j;
        ell_star = static_cast<long long>(ell_i);
        break;
    }
    if (j_star < 0)
        throw std::invalid_argument(
            "no qualifying (ell, j) within search bounds; divisor method is AV-like");
    if (ell_star == 1) ell_star = 3;

    const Party a = 0, b = 1, c = 2, d = 3;
    int ell = static_cast<int>(ell_star);
    CounterexampleBundle bundle;
    bundle.family = RuleFamily::DivisorMp;
    bundle.divisor = g;
    bundle.k = j_star + 1;
    bundle.j_star = j_star;
    bundle.ell = ell;
    bundle.profile = AnonymousProfile::make(
        4, {{Ballot::of({c}), 2},
            {Ballot::of({d}), 2},
            {Ballot::of({a, c}), ell},
            {Ballot::of({c, d}), ell},
            {Ballot::of({a, b}), ell},
            {Ballot::of({b, d}), ell}});
    bundle.true_ballot = Ballot::of({d});
    // both d-voters deviate to ad
    bundle.deviated_profile = bundle.profile
                                  .with_moved_ballot(Ballot::of({d}), Ballot::of({a, d}))
                                  .with_moved_ballot(Ballot::of({d}), Ballot::of({a, d}));

    bundle.expected_weights = PortioningWeights{{0, 2LL * ell, 2LL * ell + 2, 2}};
    bundle.expected_weights_deviated = PortioningWeights{{2LL * ell + 2, 0, 2, 2LL * ell}};

    Committee before(4), after(4);
    before.seats[c] = j_star;
    before.seats[b] = 1;
    after.seats[a] = j_star;
    after.seats[d] = 1;
    bundle.expectations.push_back({TieBreakOrder::identity(4), before, after, true});
    return bundle;
}

void verify_bundle(const CounterexampleBundle& bundle) {
    for (const auto& exp : bundle.expectations) {
        Committee got = bundle.evaluate(bundle.profile, exp.tb);
        if (got != exp.committee)
            throw std::runtime_error("bundle mismatch on A: expected " +
                                     exp.committee.to_string() + ", got " +
                                     got.to_string());
        Committee got2 = bundle.evaluate(bundle.deviated_profile, exp.tb);
        if (got2 != exp.deviated_committee)
            throw std::runtime_error("bundle mismatch on A': expected " +
                                     exp.deviated_committee.to_string() + ", got " +
                                     got2.to_string());
        if (exp.violates_sp_unrepresented) {
            if (got.seats_in(bundle.true_ballot) != 0 ||
                got2.seats_in(bundle.true_ballot) < 1)
                throw std::runtime_error("bundle does not certify an "
                                         "sp-unrepresented violation");
        }
    }
    if (bundle.expected_weights) {
        auto tb = bundle.expectations.front().tb;
        if (majoritarian_portioning(bundle.profile, tb).weights !=
                bundle.expected_weights->weights ||
            majoritarian_portioning(bundle.deviated_profile, tb).weights !=
                bundle.expected_weights_deviated->weights)
            throw std::runtime_error("portioning weights mismatch");
    }
}

} // namespace papp
