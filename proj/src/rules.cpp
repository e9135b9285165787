#include "papp/rules.hpp"

#include <algorithm>
#include <sstream>

namespace papp {

WeightVector WeightVector::av(int len) {
    WeightVector w;
    w.entries.assign(std::max(len, 1), Rational(1));
    return w;
}

WeightVector WeightVector::pav(int len) {
    WeightVector w;
    for (int j = 1; j <= std::max(len, 1); ++j)
        w.entries.emplace_back(Rational(1) / j);
    return w;
}

WeightVector WeightVector::ccav(int len) {
    WeightVector w;
    w.entries.assign(std::max(len, 1), Rational(0));
    w.entries[0] = 1;
    return w;
}

WeightVector WeightVector::from_prefix(std::vector<Rational> prefix, int len) {
    if (prefix.empty()) throw std::invalid_argument("empty weight vector");
    WeightVector w;
    w.entries = std::move(prefix);
    while (w.size() < len) w.entries.push_back(w.entries.back());
    w.validate();
    return w;
}

void WeightVector::validate() const {
    if (entries.empty() || entries[0] != 1)
        throw std::invalid_argument("weight vector must start with w1 = 1");
    for (size_t i = 1; i < entries.size(); ++i) {
        if (entries[i] > entries[i - 1])
            throw std::invalid_argument("weight vector must be non-increasing");
        if (entries[i] < 0) throw std::invalid_argument("weights must be non-negative");
    }
}

Rational WeightVector::prefix_sum(int j) const {
    if (j > size()) throw std::out_of_range("weight vector too short");
    Rational total = 0;
    for (int i = 0; i < j; ++i) total += entries[i];
    return total;
}

bool WeightVector::is_av() const {
    return std::all_of(entries.begin(), entries.end(),
                       [](const Rational& r) { return r == 1; });
}

bool WeightVector::is_ccav() const {
    if (entries.empty() || entries[0] != 1) return false;
    for (size_t i = 1; i < entries.size(); ++i)
        if (entries[i] != 0) return false;
    return entries.size() >= 2;
}

std::optional<int> WeightVector::first_index_below_one() const {
    for (int j = 1; j <= size(); ++j)
        if (w(j) < 1) return j;
    return std::nullopt;
}

TieBreakOrder TieBreakOrder::identity(int m) {
    TieBreakOrder tb;
    tb.order.resize(m);
    for (Party p = 0; p < m; ++p) tb.order[p] = p;
    return tb;
}

TieBreakOrder TieBreakOrder::from_parties(std::vector<Party> parties) {
    TieBreakOrder tb;
    tb.order = std::move(parties);
    PartyPermutation check{tb.order};
    check.validate();
    return tb;
}

int TieBreakOrder::rank(Party p) const {
    for (int r = 0; r < m(); ++r)
        if (order[r] == p) return r;
    throw std::invalid_argument("party not in tie-break order");
}

bool TieBreakOrder::prefers(const Committee& lhs, const Committee& rhs) const {
    // compare rank-sorted seat sequences lexicographically
    for (int r = 0; r < m(); ++r) {
        Party p = order[r];
        // More seats for a better-ranked party = earlier sequence.
        if (lhs.seats[p] != rhs.seats[p]) return lhs.seats[p] > rhs.seats[p];
    }
    return false;
}

std::vector<Committee> TieBreakOrder::committees_in_order(int k) const {
    auto by_rank = enumerate_committees(m(), k);
    std::vector<Committee> out;
    out.reserve(by_rank.size());
    for (const Committee& c : by_rank) {
        Committee w(m());
        for (int r = 0; r < m(); ++r) w.seats[order[r]] = c.seats[r];
        out.push_back(std::move(w));
    }
    return out;
}

DivisorFunction DivisorFunction::from_table(std::vector<Rational> t) {
    if (t.empty()) throw std::invalid_argument("empty divisor table");
    for (size_t i = 0; i < t.size(); ++i) {
        if (t[i] <= 0) throw std::invalid_argument("divisor values must be positive");
        if (i > 0 && t[i] < t[i - 1])
            throw std::invalid_argument("divisor function must be non-decreasing");
    }
    DivisorFunction g;
    g.table = std::move(t);
    return g;
}

Rational DivisorFunction::operator()(int t) const {
    if (!table) return Rational(t + 1);
    if (t >= static_cast<int>(table->size()))
        throw std::out_of_range("divisor table too short for requested round");
    return (*table)[t];
}

long long PortioningWeights::total() const {
    long long s = 0;
    for (long long w : weights) s += w;
    return s;
}

std::string PortioningWeights::to_string() const {
    std::string s = "(";
    for (size_t i = 0; i < weights.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(weights[i]);
    }
    return s + ")";
}

Rational thiele_score(const WeightVector& w, const Committee& committee,
                      const AnonymousProfile& a) {
    Rational score = 0;
    for (const auto& [ballot, cnt] : a.counts) {
        int covered = committee.seats_in(ballot);
        if (covered > 0) score += Rational(cnt) * w.prefix_sum(covered);
    }
    return score;
}

Committee thiele_select(const WeightVector& w, const AnonymousProfile& a, int k,
                        const TieBreakOrder& tb) {
    if (w.size() < k) throw std::invalid_argument("weight vector shorter than k");
    // Iterating committees in >_k order means the first maximum wins ties.
    auto committees = tb.committees_in_order(k);
    const Committee* best = nullptr;
    Rational best_score;
    for (const Committee& c : committees) {
        Rational s = thiele_score(w, c, a);
        if (!best || s > best_score) {
            best = &c;
            best_score = std::move(s);
        }
    }
    return *best;
}

Committee seq_thiele_select(const WeightVector& w, const AnonymousProfile& a, int k,
                            const TieBreakOrder& tb) {
    if (w.size() < k) throw std::invalid_argument("weight vector shorter than k");
    Committee current(a.m);
    for (int round = 0; round < k; ++round) {
        Party best = -1;
        Rational best_gain = -1;
        for (Party p : tb.order) { // ties by >_1
            Rational gain = 0;
            for (const auto& [ballot, cnt] : a.counts)
                if (ballot.contains(p))
                    gain += Rational(cnt) * w.w(current.seats_in(ballot) + 1);
            if (best == -1 || gain > best_gain) {
                best = p;
                best_gain = std::move(gain);
            }
        }
        ++current.seats[best];
    }
    return current;
}

PortioningWeights majoritarian_portioning(const AnonymousProfile& a,
                                          const TieBreakOrder& tb) {
    PortioningWeights out;
    out.weights.assign(a.m, 0);
    auto remaining = a.counts;
    while (!remaining.empty()) {
        Party best = -1;
        long long best_count = -1;
        for (Party p : tb.order) {
            long long cnt = 0;
            for (const auto& [b, c] : remaining)
                if (b.contains(p)) cnt += c;
            if (cnt > best_count) {
                best = p;
                best_count = cnt;
            }
        }
        out.weights[best] = best_count;
        std::erase_if(remaining, [&](const auto& e) { return e.first.contains(best); });
    }
    return out;
}

Committee divisor_apportion(const PortioningWeights& weights, const DivisorFunction& g,
                            int k, const TieBreakOrder& tb) {
    int m = static_cast<int>(weights.weights.size());
    if (weights.total() <= 0)
        throw std::invalid_argument("divisor apportionment needs a positive weight");
    Committee w(m);
    for (int round = 0; round < k; ++round) {
        Party best = -1;
        Rational best_quotient = -1;
        for (Party p : tb.order) {
            Rational q = Rational(weights.weights[p]) / g(w.seats[p]);
            if (q > best_quotient) {
                best = p;
                best_quotient = std::move(q);
            }
        }
        ++w.seats[best];
    }
    return w;
}

Committee av_variant_k2_select(const AnonymousProfile& a, const TieBreakOrder& tb) {
    int m = a.m;
    // Clone removal: parties with identical approver sets collapse onto the
    // tie-break-best representative.
    std::vector<bool> removed(m, false);
    for (int ri = 0; ri < m; ++ri) {
        Party x = tb.order[ri];
        if (removed[x]) continue;
        for (int rj = ri + 1; rj < m; ++rj) {
            Party y = tb.order[rj];
            if (removed[y]) continue;
            bool clones = true;
            for (const auto& [b, c] : a.counts)
                if (b.contains(x) != b.contains(y)) {
                    clones = false;
                    break;
                }
            if (clones) removed[y] = true;
        }
    }
    std::vector<long long> score(m, 0);
    long long max_score = 0;
    for (Party p = 0; p < m; ++p) {
        if (removed[p]) continue;
        score[p] = a.approver_count(p);
        max_score = std::max(max_score, score[p]);
    }
    std::vector<Party> at_max;
    for (Party p : tb.order)
        if (!removed[p] && score[p] == max_score) at_max.push_back(p);

    Committee w(m);
    bool tie_case = (2 * max_score == a.n) && at_max.size() >= 2;
    if (!tie_case) {
        w.seats[at_max.front()] = 2; // both seats to the AV winner
    } else {
        w.seats[at_max[0]] = 1;
        w.seats[at_max[1]] = 1;
    }
    return w;
}

Rational parse_rational(const std::string& s) {
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return Rational(BigInt(s));
        return Rational(BigInt(s.substr(0, slash)), BigInt(s.substr(slash + 1)));
    } catch (const std::exception&) {
        throw std::invalid_argument("bad rational: " + s);
    }
}

namespace {

std::vector<Rational> parse_rational_list(const std::string& csv) {
    std::vector<Rational> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(parse_rational(item));
    if (out.empty()) throw std::invalid_argument("empty rational list");
    return out;
}

} // namespace

std::optional<WeightVector> rule_weight_vector(const std::string& name, int k) {
    int len = std::max(k, 1);
    if (name == "av") return WeightVector::av(len);
    if (name == "pav" || name == "seq-pav") return WeightVector::pav(len);
    if (name == "ccav") return WeightVector::ccav(std::max(len, 2));
    for (const std::string prefix : {"thiele:", "seq-thiele:"})
        if (name.rfind(prefix, 0) == 0)
            return WeightVector::from_prefix(parse_rational_list(name.substr(prefix.size())), len);
    return std::nullopt;
}

RuleFn make_rule(const std::string& name, const TieBreakOrder& tb) {
    bool sequential = name.rfind("seq-", 0) == 0;
    if (auto probe = rule_weight_vector(name, 1)) {
        return [name, sequential, tb](const AnonymousProfile& a, int k) {
            auto w = *rule_weight_vector(name, k);
            return sequential ? seq_thiele_select(w, a, k, tb)
                              : thiele_select(w, a, k, tb);
        };
    }
    if (name == "mp-jefferson" || name.rfind("mp-divisor:", 0) == 0) {
        DivisorFunction g = name == "mp-jefferson"
            ? DivisorFunction::jefferson()
            : DivisorFunction::from_table(parse_rational_list(name.substr(11)));
        return [g, tb](const AnonymousProfile& a, int k) {
            return divisor_apportion(majoritarian_portioning(a, tb), g, k, tb);
        };
    }
    if (name == "av-variant-k2") {
        return [tb](const AnonymousProfile& a, int k) {
            if (k != 2) throw std::invalid_argument("av-variant-k2 requires k = 2");
            return av_variant_k2_select(a, tb);
        };
    }
    throw std::invalid_argument("unknown rule: " + name);
}

} // namespace papp
