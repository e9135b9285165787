#include "papp/axioms.hpp"

#include <algorithm>
#include <thread>

#include <json.hpp>

namespace papp {

Axiom parse_axiom(const std::string& tag) {
    if (tag == "strategyproofness" || tag == "sp") return Axiom::Strategyproofness;
    if (tag == "sp-unrepresented") return Axiom::SpUnrepresented;
    if (tag == "weak-representation" || tag == "wr") return Axiom::WeakRepresentation;
    if (tag == "wpr" || tag == "weak-proportional-representation")
        return Axiom::WeakProportionalRepresentation;
    if (tag == "pareto") return Axiom::ParetoOptimality;
    throw std::invalid_argument("unsupported axiom tag: " + tag);
}

std::string axiom_name(Axiom axiom) {
    switch (axiom) {
        case Axiom::Strategyproofness: return "strategyproofness";
        case Axiom::SpUnrepresented: return "sp-unrepresented";
        case Axiom::WeakRepresentation: return "weak-representation";
        case Axiom::WeakProportionalRepresentation: return "wpr";
        case Axiom::ParetoOptimality: return "pareto";
    }
    return "?";
}

std::string ViolationWitness::to_json() const {
    nlohmann::json j;
    j["axiom"] = axiom_name(axiom);
    j["profile"] = nlohmann::json::parse(profile.to_json());
    j["committee"] = committee.to_string();
    if (true_ballot) {
        j["true_ballot"] = true_ballot->to_string();
        j["deviated_profile"] = nlohmann::json::parse(deviated_profile->to_json());
        j["deviated_committee"] = deviated_committee->to_string();
        j["seats_before"] = seats_before;
        j["seats_after"] = seats_after;
    }
    return j.dump();
}

std::vector<Party> pareto_dominated_parties(const AnonymousProfile& a) {
    std::vector<Party> out;
    for (Party y = 0; y < a.m; ++y) {
        bool dominated = false;
        for (Party x = 0; x < a.m && !dominated; ++x) {
            if (x == y) continue;
            bool contains_all = true, strict = false;
            for (const auto& [b, c] : a.counts) {
                if (b.contains(y) && !b.contains(x)) {
                    contains_all = false;
                    break;
                }
                if (b.contains(x) && !b.contains(y)) strict = true;
            }
            dominated = contains_all && strict;
        }
        if (dominated) out.push_back(y);
    }
    return out;
}

std::vector<Party> wr_required_parties(const AnonymousProfile& a, int k) {
    std::vector<Party> out;
    for (Party x = 0; x < a.m; ++x)
        if (static_cast<long long>(a.count(Ballot(1u << x))) * k >= a.n)
            out.push_back(x);
    return out;
}

std::vector<Committee> wr_committees(const AnonymousProfile& a, int k) {
    auto required = wr_required_parties(a, k);
    std::vector<Committee> out;
    for (const Committee& w : enumerate_committees(a.m, k)) {
        bool ok = std::all_of(required.begin(), required.end(),
                              [&](Party x) { return w.seats[x] >= 1; });
        if (ok) out.push_back(w);
    }
    return out;
}

std::vector<Committee> wpr_committees(const AnonymousProfile& a, int k) {
    std::vector<int> demand(a.m, 0);
    for (Party x = 0; x < a.m; ++x)
        demand[x] = static_cast<int>(
            static_cast<long long>(a.count(Ballot(1u << x))) * k / a.n);
    std::vector<Committee> out;
    for (const Committee& w : enumerate_committees(a.m, k)) {
        bool ok = true;
        for (Party x = 0; x < a.m && ok; ++x) ok = w.seats[x] >= demand[x];
        if (ok) out.push_back(w);
    }
    return out;
}

CleverWrContext clever_wr_context(const AnonymousProfile& a, int k) {
    if (a.m > 8) throw std::invalid_argument("chain search supports m <= 8");
    CleverWrContext ctx;
    for (Party x : wr_required_parties(a, k)) ctx.required_set.mask |= 1u << x;

    // Max total multiplicity of a nested chain of present ballots ending at
    // each ballot B, where every chain member has a party outside X (it is
    // enough to require this of the bottom ballot; supersets inherit it).
    // Strict subsets have numerically smaller masks, so one ascending pass
    // over the present ballots suffices.
    std::vector<std::pair<Ballot, int>> best; // parallel to a.counts subset
    for (const auto& [b, c] : a.counts) {
        if ((b.mask & ~ctx.required_set.mask) == 0) continue; // B inside X
        int chain = c;
        int best_sub = 0;
        for (const auto& [pb, pw] : best)
            if (pb != b && pb.subset_of(b)) best_sub = std::max(best_sub, pw);
        chain += best_sub;
        best.emplace_back(b, chain);
        if (static_cast<long long>(chain) * k >= a.n)
            ctx.ballot_lower_bounds.emplace_back(
                b, std::popcount(b.mask & ctx.required_set.mask) + 1);
    }
    return ctx;
}

std::vector<Committee> clever_wr_committees(const AnonymousProfile& a, int k) {
    auto ctx = clever_wr_context(a, k);
    std::vector<Committee> out;
    for (const Committee& w : wr_committees(a, k)) {
        bool ok = true;
        for (const auto& [b, bound] : ctx.ballot_lower_bounds)
            if (w.seats_in(b) < bound) {
                ok = false;
                break;
            }
        if (ok) out.push_back(w);
    }
    return out;
}

std::vector<std::pair<Ballot, int>> fact2_bounds(const AnonymousProfile& a, int k) {
    int quota = (a.n + k - 1) / k; // ceil(n/k)
    std::vector<std::pair<Ballot, int>> out;
    for (const auto& [b, c] : a.counts)
        out.emplace_back(b, std::min({b.size(), k, c / quota}));
    return out;
}

namespace {

void check_one_profile(const RuleOracle& rule, Axiom axiom, const DomainSpec& spec,
                       const AnonymousProfile& a, bool collect_all,
                       std::vector<ViolationWitness>& out) {
    int k = spec.k;
    Committee w = rule(a, k);
    switch (axiom) {
        case Axiom::WeakRepresentation:
            for (Party x : wr_required_parties(a, k))
                if (w.seats[x] < 1) {
                    out.push_back({axiom, a, w});
                    return;
                }
            return;
        case Axiom::WeakProportionalRepresentation:
            for (Party x = 0; x < a.m; ++x) {
                int demand = static_cast<int>(
                    static_cast<long long>(a.count(Ballot(1u << x))) * k / a.n);
                if (w.seats[x] < demand) {
                    out.push_back({axiom, a, w});
                    return;
                }
            }
            return;
        case Axiom::ParetoOptimality:
            for (Party y : pareto_dominated_parties(a))
                if (w.seats[y] >= 1) {
                    out.push_back({axiom, a, w});
                    return;
                }
            return;
        case Axiom::Strategyproofness:
        case Axiom::SpUnrepresented:
            for (const auto& [true_ballot, deviated] : manipulation_neighbors(a, spec)) {
                int before = w.seats_in(true_ballot);
                if (axiom == Axiom::SpUnrepresented && before != 0) continue;
                Committee w2 = rule(deviated, k);
                int after = w2.seats_in(true_ballot);
                if (after > before) {
                    out.push_back({axiom, a, w, true_ballot, deviated, w2, before, after});
                    if (!collect_all) return;
                }
            }
            return;
    }
}

} // namespace

CheckResult check_axiom(const RuleOracle& rule, Axiom axiom, const DomainSpec& spec,
                        const CheckOptions& opts) {
    spec.validate();
    auto profiles = enumerate_profiles(spec);
    CheckResult result;
    result.profiles_checked = profiles.size();

    int jobs = std::max(1, opts.jobs);
    if (jobs == 1) {
        for (const auto& a : profiles) {
            check_one_profile(rule, axiom, spec, a, opts.collect_all, result.witnesses);
            if (!result.witnesses.empty() && !opts.collect_all) break;
        }
        return result;
    }

    // Contiguous chunks keep canonical order: concatenating the per-worker
    // results in worker order is the sequential order.
    std::vector<std::vector<ViolationWitness>> partial(jobs);
    std::vector<std::thread> threads;
    size_t chunk = (profiles.size() + jobs - 1) / jobs;
    for (int t = 0; t < jobs; ++t) {
        threads.emplace_back([&, t] {
            size_t lo = t * chunk, hi = std::min(profiles.size(), lo + chunk);
            for (size_t i = lo; i < hi; ++i) {
                check_one_profile(rule, axiom, spec, profiles[i], opts.collect_all,
                                  partial[t]);
                if (!partial[t].empty() && !opts.collect_all) break;
            }
        });
    }
    for (auto& th : threads) th.join();
    for (auto& part : partial) {
        for (auto& wit : part) {
            result.witnesses.push_back(std::move(wit));
            if (!opts.collect_all && !result.witnesses.empty()) return result;
        }
    }
    return result;
}

RuleOracle lift_rule(const RuleOracle& f, const LiftSpec& lift) {
    switch (lift.kind) {
        case LiftKind::ReplicateVoters: {
            int ell = lift.ell;
            if (ell < 1) throw std::invalid_argument("replication factor must be >= 1");
            return [f, ell](const AnonymousProfile& a, int k) {
                return f(replicate_voters(a, ell), k);
            };
        }
        case LiftKind::CloneParty: {
            Party x = lift.x;
            return [f, x](const AnonymousProfile& a, int k) {
                Party y = a.m;
                Committee w = f(clone_party(a, x, y), k);
                Committee out(a.m);
                for (Party z = 0; z < a.m; ++z) out.seats[z] = w.seats[z];
                out.seats[x] += w.seats[y];
                return out;
            };
        }
        case LiftKind::ClonePlusSeat: {
            Party x = lift.x;
            return [f, x](const AnonymousProfile& a, int k) {
                if (a.n % k != 0)
                    throw std::invalid_argument("clone-plus-seat lift needs k | n");
                Party y = a.m;
                auto enlarged =
                    add_ballots(clone_party(a, x, y), Ballot::of({x, y}), a.n / k);
                Committee w = f(enlarged, k + 1);
                Committee out(a.m);
                for (Party z = 0; z < a.m; ++z) out.seats[z] = w.seats[z];
                out.seats[x] += w.seats[y];
                if (out.seats[x] < 1)
                    throw std::runtime_error(
                        "clone-plus-seat lift: base rule gave the xy pair no seat");
                --out.seats[x];
                return out;
            };
        }
        case LiftKind::WprExtraSeat: {
            Party x = lift.x;
            return [f, x](const AnonymousProfile& a, int k) {
                if (a.n % k != 0)
                    throw std::invalid_argument("wpr-extra-seat lift needs k | n");
                Committee w = f(add_ballots(a, Ballot(1u << x), a.n / k), k + 1);
                Committee out(a.m);
                for (Party z = 0; z < a.m; ++z) out.seats[z] = w.seats[z];
                if (out.seats[x] < 1)
                    throw std::runtime_error(
                        "wpr-extra-seat lift: base rule gave x no seat");
                --out.seats[x];
                return out;
            };
        }
    }
    throw std::logic_error("unreachable");
}

} // namespace papp
