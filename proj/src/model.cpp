#include "papp/model.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include <json.hpp>

namespace papp {

std::string party_name(Party p) {
    if (p < 0 || p >= kMaxParties) throw std::invalid_argument("party index out of range");
    return std::string(1, static_cast<char>('a' + p));
}

Party parse_party(const std::string& name) {
    if (name.size() != 1 || name[0] < 'a' || name[0] >= 'a' + kMaxParties)
        throw std::invalid_argument("bad party name: " + name);
    return name[0] - 'a';
}

Ballot Ballot::of(std::initializer_list<Party> parties) {
    Ballot b;
    for (Party p : parties) b.mask |= 1u << p;
    return b;
}

std::string Ballot::to_string() const {
    std::string s;
    for (Party p = 0; p < kMaxParties; ++p)
        if (contains(p)) s += static_cast<char>('a' + p);
    return s;
}

Ballot Ballot::parse(const std::string& s) {
    Ballot b;
    for (char c : s) b.mask |= 1u << parse_party(std::string(1, c));
    if (b.mask == 0) throw std::invalid_argument("empty ballot");
    return b;
}

AnonymousProfile AnonymousProfile::make(int m, std::vector<std::pair<Ballot, int>> raw) {
    std::map<Ballot, int> merged;
    for (auto& [b, c] : raw) {
        if (b.mask == 0) throw std::invalid_argument("empty ballot in profile");
        if (b.mask >= (1u << m)) throw std::invalid_argument("ballot references party >= m");
        if (c <= 0) throw std::invalid_argument("non-positive ballot count");
        merged[b] += c;
    }
    AnonymousProfile a;
    a.m = m;
    for (auto& [b, c] : merged) {
        a.counts.emplace_back(b, c);
        a.n += c;
    }
    return a;
}

AnonymousProfile AnonymousProfile::from_ballot_list(int m, const std::vector<Ballot>& ballots) {
    std::vector<std::pair<Ballot, int>> raw;
    raw.reserve(ballots.size());
    for (Ballot b : ballots) raw.emplace_back(b, 1);
    return make(m, std::move(raw));
}

int AnonymousProfile::count(Ballot b) const {
    auto it = std::lower_bound(counts.begin(), counts.end(), b,
                               [](const auto& e, Ballot x) { return e.first < x; });
    return (it != counts.end() && it->first == b) ? it->second : 0;
}

int AnonymousProfile::approver_count(Party p) const {
    int total = 0;
    for (const auto& [b, c] : counts)
        if (b.contains(p)) total += c;
    return total;
}

int AnonymousProfile::total_approvals() const {
    int total = 0;
    for (const auto& [b, c] : counts) total += b.size() * c;
    return total;
}

AnonymousProfile AnonymousProfile::with_moved_ballot(Ballot from, Ballot to) const {
    if (count(from) == 0) throw std::invalid_argument("ballot to move not present");
    auto raw = counts;
    for (auto& [b, c] : raw)
        if (b == from) --c;
    std::erase_if(raw, [](const auto& e) { return e.second == 0; });
    raw.emplace_back(to, 1);
    return make(m, std::move(raw));
}

std::string AnonymousProfile::to_string() const {
    std::string s = "{";
    bool first = true;
    for (const auto& [b, c] : counts) {
        if (!first) s += ", ";
        first = false;
        s += b.to_string() + ":" + std::to_string(c);
    }
    return s + "}";
}

std::string AnonymousProfile::key() const {
    std::string s;
    s.reserve(counts.size() * 4 + 2);
    s.push_back(static_cast<char>(m));
    for (const auto& [b, c] : counts) {
        s.push_back(static_cast<char>(b.mask & 0xff));
        s.push_back(static_cast<char>(b.mask >> 8));
        s.push_back(static_cast<char>(c & 0xff));
        s.push_back(static_cast<char>(c >> 8));
    }
    return s;
}

std::string AnonymousProfile::to_json() const {
    nlohmann::json j;
    j["m"] = m;
    auto& arr = j["ballots"] = nlohmann::json::array();
    for (const auto& [b, c] : counts) {
        nlohmann::json e;
        auto& parties = e["parties"] = nlohmann::json::array();
        for (Party p = 0; p < m; ++p)
            if (b.contains(p)) parties.push_back(party_name(p));
        e["count"] = c;
        arr.push_back(std::move(e));
    }
    return j.dump();
}

AnonymousProfile AnonymousProfile::from_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    int m = j.at("m").get<int>();
    std::vector<std::pair<Ballot, int>> raw;
    for (const auto& e : j.at("ballots")) {
        Ballot b;
        for (const auto& name : e.at("parties"))
            b.mask |= 1u << parse_party(name.get<std::string>());
        raw.emplace_back(b, e.at("count").get<int>());
    }
    return make(m, std::move(raw));
}

int Committee::k() const {
    int total = 0;
    for (int s : seats) total += s;
    return total;
}

int Committee::seats_in(Ballot b) const {
    int total = 0;
    for (Party p = 0; p < m(); ++p)
        if (b.contains(p)) total += seats[p];
    return total;
}

std::string Committee::to_string() const {
    std::string s = "[";
    bool first = true;
    for (Party p = 0; p < m(); ++p)
        for (int i = 0; i < seats[p]; ++i) {
            if (!first) s += ",";
            first = false;
            s += party_name(p);
        }
    return s + "]";
}

Committee Committee::parse(const std::string& s, int m) {
    Committee w(m);
    for (char c : s) {
        if (c == '[' || c == ']' || c == ',' || c == ' ') continue;
        ++w.seats[parse_party(std::string(1, c))];
    }
    return w;
}

void DomainSpec::validate() const {
    if (n < 1 || m < 1 || k < 1) throw std::invalid_argument("DomainSpec needs n,m,k >= 1");
    if (m > kMaxParties) throw std::invalid_argument("too many parties");
}

bool DomainSpec::admits(const AnonymousProfile& a) const {
    if (a.m != m || a.n != n) return false;
    uint32_t full = (1u << m) - 1;
    for (const auto& [b, c] : a.counts) {
        if (b.mask == 0 || b.mask > full) return false;
        if (forbid_full_ballot && b.mask == full) return false;
    }
    if (max_approvals_per_party)
        for (Party p = 0; p < m; ++p)
            if (a.approver_count(p) > *max_approvals_per_party) return false;
    if (max_total_approvals && a.total_approvals() > *max_total_approvals) return false;
    return true;
}

PartyPermutation PartyPermutation::identity(int m) {
    PartyPermutation tau;
    tau.map.resize(m);
    for (Party p = 0; p < m; ++p) tau.map[p] = p;
    return tau;
}

void PartyPermutation::validate() const {
    std::vector<bool> seen(map.size(), false);
    for (Party img : map) {
        if (img < 0 || img >= static_cast<int>(map.size()) || seen[img])
            throw std::invalid_argument("not a permutation");
        seen[img] = true;
    }
}

PartyPermutation PartyPermutation::inverse() const {
    PartyPermutation inv;
    inv.map.resize(map.size());
    for (Party p = 0; p < static_cast<int>(map.size()); ++p) inv.map[map[p]] = p;
    return inv;
}

Ballot PartyPermutation::apply(Ballot b) const {
    Ballot out;
    for (Party p = 0; p < static_cast<int>(map.size()); ++p)
        if (b.contains(p)) out.mask |= 1u << map[p];
    return out;
}

std::vector<Ballot> enumerate_ballots(const DomainSpec& spec) {
    spec.validate();
    uint32_t full = (1u << spec.m) - 1;
    std::vector<Ballot> out;
    for (uint32_t mask = 1; mask <= full; ++mask) {
        if (spec.forbid_full_ballot && mask == full) continue;
        out.emplace_back(mask);
    }
    return out;
}

namespace {

// Recursive stars-and-bars over the canonical ballot list, pruning on the
// per-party and total-approval caps as soon as they are exceeded.
struct ProfileEnumerator {
    const DomainSpec& spec;
    std::vector<Ballot> ballots;
    const std::function<bool(const AnonymousProfile&)>* visit = nullptr;
    uint64_t count_only = 0;
    bool counting = false;
    bool stopped = false;

    std::vector<std::pair<Ballot, int>> chosen;
    std::vector<int> party_totals;
    int approvals = 0;

    explicit ProfileEnumerator(const DomainSpec& s)
        : spec(s), ballots(enumerate_ballots(s)), party_totals(s.m, 0) {}

    bool caps_ok_after(Ballot b, int c) const {
        if (spec.max_total_approvals &&
            approvals + b.size() * c > *spec.max_total_approvals)
            return false;
        if (spec.max_approvals_per_party)
            for (Party p = 0; p < spec.m; ++p)
                if (b.contains(p) && party_totals[p] + c > *spec.max_approvals_per_party)
                    return false;
        return true;
    }

    void emit() {
        if (counting) {
            ++count_only;
            return;
        }
        AnonymousProfile a;
        a.m = spec.m;
        a.n = spec.n;
        a.counts = chosen;
        if (!(*visit)(a)) stopped = true;
    }

    void recurse(size_t idx, int remaining) {
        if (stopped) return;
        if (remaining == 0) {
            emit();
            return;
        }
        if (idx == ballots.size()) return;
        Ballot b = ballots[idx];
        for (int c = 0; c <= remaining && !stopped; ++c) {
            if (c > 0) {
                if (!caps_ok_after(b, 1)) break;
                if (chosen.empty() || chosen.back().first != b)
                    chosen.emplace_back(b, 1);
                else
                    ++chosen.back().second;
                approvals += b.size();
                for (Party p = 0; p < spec.m; ++p)
                    if (b.contains(p)) ++party_totals[p];
            }
            recurse(idx + 1, remaining - c);
        }
        // undo whatever we pushed for this ballot
        if (!chosen.empty() && chosen.back().first == b) {
            int c = chosen.back().second;
            approvals -= b.size() * c;
            for (Party p = 0; p < spec.m; ++p)
                if (b.contains(p)) party_totals[p] -= c;
            chosen.pop_back();
        }
    }
};

} // namespace

void for_each_profile(const DomainSpec& spec,
                      const std::function<bool(const AnonymousProfile&)>& visit) {
    ProfileEnumerator e(spec);
    e.visit = &visit;
    e.recurse(0, spec.n);
}

std::vector<AnonymousProfile> enumerate_profiles(const DomainSpec& spec) {
    std::vector<AnonymousProfile> out;
    for_each_profile(spec, [&](const AnonymousProfile& a) {
        out.push_back(a);
        return true;
    });
    return out;
}

uint64_t count_profiles(const DomainSpec& spec) {
    ProfileEnumerator e(spec);
    e.counting = true;
    e.recurse(0, spec.n);
    return e.count_only;
}

namespace {

void committees_rec(int m, int k, Party min_party, Committee& w,
                    std::vector<Committee>& out) {
    if (k == 0) {
        out.push_back(w);
        return;
    }
    for (Party p = min_party; p < m; ++p) {
        ++w.seats[p];
        committees_rec(m, k - 1, p, w, out);
        --w.seats[p];
    }
}

} // namespace

std::vector<Committee> enumerate_committees(int m, int k) {
    if (m < 1 || k < 0) throw std::invalid_argument("enumerate_committees: m>=1, k>=0");
    std::vector<Committee> out;
    Committee w(m);
    committees_rec(m, k, 0, w, out);
    return out;
}

uint64_t committee_count(int m, int k) {
    // C(m+k-1, k)
    uint64_t num = 1;
    for (int i = 1; i <= k; ++i) num = num * (m - 1 + i) / i;
    return num;
}

std::vector<std::pair<Ballot, AnonymousProfile>>
manipulation_neighbors(const AnonymousProfile& a, const DomainSpec& spec) {
    std::vector<std::pair<Ballot, AnonymousProfile>> out;
    auto ballots = enumerate_ballots(spec);
    for (const auto& [b, c] : a.counts) {
        for (Ballot alt : ballots) {
            if (alt == b) continue;
            AnonymousProfile moved = a.with_moved_ballot(b, alt);
            if (spec.admits(moved)) out.emplace_back(b, std::move(moved));
        }
    }
    return out;
}

AnonymousProfile clone_party(const AnonymousProfile& a, Party x, Party y) {
    if (y < a.m) throw std::invalid_argument("clone target must be a fresh party index");
    if (x < 0 || x >= a.m) throw std::invalid_argument("clone source out of range");
    std::vector<std::pair<Ballot, int>> raw;
    for (const auto& [b, c] : a.counts) {
        Ballot nb = b;
        if (b.contains(x)) nb.mask |= 1u << y;
        raw.emplace_back(nb, c);
    }
    return AnonymousProfile::make(y + 1, std::move(raw));
}

AnonymousProfile replicate_voters(const AnonymousProfile& a, int ell) {
    if (ell < 1) throw std::invalid_argument("replication factor must be >= 1");
    AnonymousProfile out = a;
    out.n = 0;
    for (auto& [b, c] : out.counts) {
        c *= ell;
        out.n += c;
    }
    return out;
}

AnonymousProfile add_ballots(const AnonymousProfile& a, Ballot b, int c) {
    if (c < 1) throw std::invalid_argument("ballot count must be >= 1");
    auto raw = a.counts;
    raw.emplace_back(b, c);
    return AnonymousProfile::make(a.m, std::move(raw));
}

AnonymousProfile apply_party_permutation(const AnonymousProfile& a,
                                         const PartyPermutation& tau) {
    tau.validate();
    if (static_cast<int>(tau.map.size()) != a.m)
        throw std::invalid_argument("permutation size does not match m");
    std::vector<std::pair<Ballot, int>> raw;
    for (const auto& [b, c] : a.counts) raw.emplace_back(tau.apply(b), c);
    return AnonymousProfile::make(a.m, std::move(raw));
}

} // namespace papp
