#pragma once

#include <bit>
#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace papp {

// Parties are indices 0..m-1; in text form they are named 'a', 'b', 'c', ...
using Party = int;

constexpr int kMaxParties = 16;

std::string party_name(Party p);
Party parse_party(const std::string& name);

/// Approval ballot as a subset bitmask over the parties. Invariant: non-empty.
struct Ballot {
    uint32_t mask = 0;

    Ballot() = default;
    explicit Ballot(uint32_t m) : mask(m) {}
    static Ballot of(std::initializer_list<Party> parties);

    bool contains(Party p) const { return (mask >> p) & 1u; }
    int size() const { return std::popcount(mask); }
    bool subset_of(Ballot other) const { return (mask & ~other.mask) == 0; }

    auto operator<=>(const Ballot&) const = default;

    std::string to_string() const;
    static Ballot parse(const std::string& s); // e.g. "ab" -> {a,b}
};

/// Anonymous approval profile: multiset of ballots, kept as a sorted
/// (ballot, count) list so that iteration order (and hence DIMACS variable
/// numbering) is deterministic.
struct AnonymousProfile {
    int m = 0;
    int n = 0;
    std::vector<std::pair<Ballot, int>> counts; // sorted by ballot mask, counts > 0

    static AnonymousProfile make(int m, std::vector<std::pair<Ballot, int>> raw);
    static AnonymousProfile from_ballot_list(int m, const std::vector<Ballot>& ballots);

    int count(Ballot b) const;
    int approver_count(Party p) const;
    int total_approvals() const;
    bool contains_ballot(Ballot b) const { return count(b) > 0; }

    AnonymousProfile with_moved_ballot(Ballot from, Ballot to) const;

    bool operator==(const AnonymousProfile&) const = default;

    std::string to_string() const;
    std::string to_json() const;
    static AnonymousProfile from_json(const std::string& text);

    // compact byte key for hashing / map lookup
    std::string key() const;
};

struct ProfileHash {
    size_t operator()(const AnonymousProfile& p) const {
        return std::hash<std::string>{}(p.key());
    }
};

/// Committee of total size k, as a seats-per-party vector.
struct Committee {
    std::vector<int> seats; // size m

    Committee() = default;
    explicit Committee(int m) : seats(m, 0) {}

    int m() const { return static_cast<int>(seats.size()); }
    int k() const;
    int operator()(Party p) const { return seats[p]; }
    int seats_in(Ballot b) const; // W(A_i): total seats of approved parties

    bool operator==(const Committee&) const = default;

    std::string to_string() const; // "[a,a,c]"
    static Committee parse(const std::string& s, int m);
};

/// Domain of anonymous profiles the checkers and the encoder enumerate.
/// The restriction flags mirror the conditions used for the k=3, m=4, n=6
/// SAT instance; plain constructed specs carry no restrictions.
struct DomainSpec {
    int n = 0;
    int m = 0;
    int k = 0;
    bool forbid_full_ballot = false;
    std::optional<int> max_approvals_per_party;
    std::optional<int> max_total_approvals;

    static DomainSpec plain(int n, int m, int k) { return DomainSpec{n, m, k}; }
    // (i) no full ballots, (ii) every party approved by <= 4 voters,
    // (iii) total approvals <= 11
    static DomainSpec sat_restricted(int n, int m, int k) {
        return DomainSpec{n, m, k, true, 4, 11};
    }

    void validate() const;
    bool admits(const AnonymousProfile& a) const;
};

struct PartyPermutation {
    std::vector<Party> map; // map[x] = image of party x

    static PartyPermutation identity(int m);
    void validate() const;
    PartyPermutation inverse() const;
    Ballot apply(Ballot b) const;
};

// ---- enumeration ------------------------------------------------------

std::vector<Ballot> enumerate_ballots(const DomainSpec& spec);

/// Visits every profile of the domain exactly once, in canonical order.
/// Return false from the visitor to stop early.
void for_each_profile(const DomainSpec& spec,
                      const std::function<bool(const AnonymousProfile&)>& visit);

std::vector<AnonymousProfile> enumerate_profiles(const DomainSpec& spec);

uint64_t count_profiles(const DomainSpec& spec);

/// All committees of size k over m parties, in the lexicographic order of
/// their sorted party sequences. This order doubles as the default
/// tie-breaking order on committees.
std::vector<Committee> enumerate_committees(int m, int k);

uint64_t committee_count(int m, int k); // C(m+k-1, k)

/// Single-voter deviations (true_ballot, resulting profile) that stay
/// inside the domain, in deterministic order.
std::vector<std::pair<Ballot, AnonymousProfile>>
manipulation_neighbors(const AnonymousProfile& a, const DomainSpec& spec);

// ---- profile transformations used by the rule lifts -------------------

/// A^{xy}: add fresh party y to every ballot containing x; m grows by one.
AnonymousProfile clone_party(const AnonymousProfile& a, Party x, Party y);

AnonymousProfile replicate_voters(const AnonymousProfile& a, int ell);

AnonymousProfile add_ballots(const AnonymousProfile& a, Ballot b, int c);

AnonymousProfile apply_party_permutation(const AnonymousProfile& a,
                                         const PartyPermutation& tau);

} // namespace papp
