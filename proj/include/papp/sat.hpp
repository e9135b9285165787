#pragma once

#include "papp/axioms.hpp"
#include "papp/model.hpp"
#include "papp/rules.hpp"

namespace papp {

enum class RepresentationAxiom { WeakRepresentation, WeakProportionalRepresentation };
enum class FeasibilityFilter { Plain, CleverWR };
enum class SpMode { Cardinal, SubsetRestricted, SubsetFree };

RepresentationAxiom parse_representation_axiom(const std::string& tag); // wr | wpr
SpMode parse_sp_mode(const std::string& tag); // cardinal | subset | subset-free

struct EncodeOptions {
    RepresentationAxiom representation_axiom = RepresentationAxiom::WeakRepresentation;
    FeasibilityFilter feasibility_filter = FeasibilityFilter::Plain;
    bool symmetry_breaking = false;
    bool pareto = false;
    SpMode sp_mode = SpMode::Cardinal;
    // When set, both the variable map and the SP pair generation are
    // restricted to exactly these profiles.
    std::optional<std::vector<AnonymousProfile>> profile_restriction;
    int jobs = 1;
};

/// Dense bijection var <-> (profile, feasible committee): variables are
/// numbered 1.. in canonical profile order, then the >_k committee order
/// within each profile's feasible set.
struct CnfVariableMap {
    std::vector<AnonymousProfile> profiles;   // canonical order
    std::vector<Committee> committees;        // global >_k order for (m, k)
    std::vector<std::vector<int>> feasible;   // per profile: indices into committees
    std::vector<int> var_base;                // var of (profile i, feasible pos 0)
    int num_vars = 0;

    int var_of(int profile_idx, int feasible_pos) const {
        return var_base[profile_idx] + feasible_pos;
    }
    /// (profile index, feasible position) of a variable.
    std::pair<int, int> profile_of(int var) const;
    const Committee& committee_of(int var) const;

    std::string to_json() const; // sidecar: var -> (profile, committee)
};

struct CnfInstance {
    int num_vars = 0;
    uint64_t num_clauses = 0;
    // 0-terminated clauses, flat; order: all at-least-one / at-most-one
    // clauses in profile order, then SP clauses in pair order.
    std::vector<int32_t> lits;
    // group-CNF labels: group 0 holds the structural (ALO/AMO) clauses,
    // each source profile-pair gets its own group. Clauses of one group are
    // contiguous, so per-group clause counts reproduce the labels.
    std::vector<uint32_t> group_clause_counts;

    uint64_t alo_clauses = 0;
    uint64_t amo_clauses = 0;
    uint64_t sp_clauses = 0;

    CnfVariableMap map;

    int num_groups() const { return static_cast<int>(group_clause_counts.size()) - 1; }
};

/// The profile the symmetry-breaking argument designates
/// ({a}, {a,b}, {b}, {c}, {c,d}, {d}); its feasible set shrinks to
/// {[a,a,c], [a,b,c]}.
AnonymousProfile symmetry_designated_profile();

CnfInstance encode(const DomainSpec& spec, const EncodeOptions& opts);

/// Loads the shipped 106-profile table (k=3, m=4, n=6); throws when the
/// file is missing or its checksum does not match the pinned value.
std::vector<AnonymousProfile> load_appendix_c_profiles(const std::string& path);

/// Restricted instance over exactly the 106 shipped profiles with
/// pareto + cleverWR + symmetry breaking; SP clauses only within the set.
CnfInstance encode_appendix_c(const std::string& data_path);

void write_dimacs(const CnfInstance& inst, const std::string& path);
void write_gcnf(const CnfInstance& inst, const std::string& path);

struct SolveResult {
    enum class Status { Sat, Unsat, Unknown };
    Status status = Status::Unknown;
    std::vector<bool> model; // 1-based; empty unless Sat
    int exit_code = -1;
    std::string output; // captured solver output (trimmed for Sat)
};

/// Runs `solver_cmd` on an existing DIMACS file; "{cnf}" in the template is
/// replaced by the path (appended when absent). Exit 10 = SAT (model parsed
/// from `v` lines), 20 = UNSAT, anything else = Unknown.
SolveResult solve_file(const std::string& cnf_path, const std::string& solver_cmd,
                       int expect_vars = 0);

/// Serializes the instance to a temporary file and solves it.
SolveResult solve(const CnfInstance& inst, const std::string& solver_cmd);

/// Turns a model into a rule table over the map's profiles; throws unless
/// exactly one variable per profile is true. The returned oracle rejects
/// profiles outside the table.
RuleOracle decode_model(const std::vector<bool>& model, const CnfVariableMap& map);

} // namespace papp
