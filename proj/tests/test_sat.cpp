#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "papp/sat.hpp"

using namespace papp;

namespace {

std::string data_file(const std::string& name) {
    if (const char* dir = std::getenv("PAPP_DATA_DIR"))
        return std::string(dir) + "/" + name;
    for (const char* dir : {"data", "../data"}) {
        auto path = std::string(dir) + "/" + name;
        if (std::filesystem::exists(path)) return path;
    }
    return name;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / name;
}

} // namespace

TEST_CASE("empty instance serializes to the bare header") {
    CnfInstance inst;
    inst.group_clause_counts.push_back(0);
    auto path = temp_file("papp_empty.cnf");
    write_dimacs(inst, path.string());
    CHECK(slurp(path.string()) == "p cnf 0 0\n");
    std::filesystem::remove(path);
}

TEST_CASE("single unit clause format") {
    CnfInstance inst;
    inst.num_vars = 1;
    inst.num_clauses = 1;
    inst.lits = {1, 0};
    inst.group_clause_counts = {1};
    auto path = temp_file("papp_unit.cnf");
    write_dimacs(inst, path.string());
    CHECK(slurp(path.string()) == "p cnf 1 1\n1 0\n");
    auto gpath = temp_file("papp_unit.gcnf");
    write_gcnf(inst, gpath.string());
    CHECK(slurp(gpath.string()) == "p gcnf 1 1 0\n{0} 1 0\n");
    std::filesystem::remove(path);
    std::filesystem::remove(gpath);
}

TEST_CASE("single-profile restriction yields 1 + t(t-1)/2 clauses") {
    auto a = AnonymousProfile::make(
        4, {{Ballot::parse("a"), 4}, {Ballot::parse("d"), 2}});
    EncodeOptions opts;
    opts.profile_restriction = std::vector<AnonymousProfile>{a};
    auto inst = encode(DomainSpec::sat_restricted(6, 4, 3), opts);
    uint64_t t = inst.map.feasible[0].size();
    CHECK(t == 4); // the wr filter leaves 4 committees
    CHECK(inst.num_clauses == 1 + t * (t - 1) / 2);
    CHECK(inst.sp_clauses == 0);
    CHECK(inst.num_vars == static_cast<int>(t));
}

TEST_CASE("clause family counts satisfy the closed forms") {
    auto spec = DomainSpec::sat_restricted(4, 3, 2);
    auto inst = encode(spec, {});
    CHECK(inst.alo_clauses == inst.map.profiles.size());
    uint64_t amo = 0;
    for (const auto& feas : inst.map.feasible) {
        uint64_t t = feas.size();
        amo += t * (t - 1) / 2;
    }
    CHECK(inst.amo_clauses == amo);
    CHECK(inst.num_clauses == inst.alo_clauses + inst.amo_clauses + inst.sp_clauses);
    // flat literal array is consistent: one 0 per clause
    uint64_t zeros = 0;
    for (auto lit : inst.lits) {
        if (lit == 0) ++zeros;
        else CHECK(std::abs(lit) <= inst.num_vars);
    }
    CHECK(zeros == inst.num_clauses);
    // group labels cover every clause
    uint64_t grouped = 0;
    for (auto c : inst.group_clause_counts) grouped += c;
    CHECK(grouped == inst.num_clauses);
}

TEST_CASE("encoding is deterministic and byte-stable") {
    auto spec = DomainSpec::sat_restricted(4, 3, 2);
    EncodeOptions opts;
    opts.jobs = 4;
    auto inst1 = encode(spec, {});
    auto inst2 = encode(spec, opts); // different worker count, same output
    CHECK(inst1.lits == inst2.lits);
    CHECK(inst1.group_clause_counts == inst2.group_clause_counts);
    auto p1 = temp_file("papp_det1.cnf"), p2 = temp_file("papp_det2.cnf");
    write_dimacs(inst1, p1.string());
    write_dimacs(inst2, p2.string());
    CHECK(slurp(p1.string()) == slurp(p2.string()));
    std::filesystem::remove(p1);
    std::filesystem::remove(p2);
}

TEST_CASE("cleverWR and pareto never increase the variable count") {
    auto spec = DomainSpec::sat_restricted(4, 4, 2);
    auto plain = encode(spec, {});
    EncodeOptions clever;
    clever.feasibility_filter = FeasibilityFilter::CleverWR;
    EncodeOptions pareto;
    pareto.pareto = true;
    CHECK(encode(spec, clever).num_vars <= plain.num_vars);
    CHECK(encode(spec, pareto).num_vars <= plain.num_vars);
}

TEST_CASE("symmetry breaking changes only the designated profile") {
    auto spec = DomainSpec::sat_restricted(6, 4, 3);
    auto designated = symmetry_designated_profile();
    EncodeOptions base, sym;
    base.feasibility_filter = FeasibilityFilter::CleverWR;
    base.profile_restriction = std::vector<AnonymousProfile>{designated};
    sym = base;
    sym.symmetry_breaking = true;
    auto plain = encode(spec, base);
    auto broken = encode(spec, sym);
    CHECK(plain.map.feasible[0].size() == 12); // cf. the cleverWR example
    CHECK(broken.map.feasible[0].size() == 2);
    CHECK(broken.map.committee_of(1).to_string() == "[a,a,c]");
    CHECK(broken.map.committee_of(2).to_string() == "[a,b,c]");
    // error when the designated profile is absent
    EncodeOptions missing;
    missing.symmetry_breaking = true;
    missing.profile_restriction = std::vector<AnonymousProfile>{AnonymousProfile::make(
        4, {{Ballot::parse("a"), 4}, {Ballot::parse("d"), 2}})};
    CHECK_THROWS(encode(spec, missing));
}

TEST_CASE("wr-only encoding is satisfied by the CCAV assignment") {
    // soundness of the feasibility filter: a rule satisfying the axioms
    // induces one true variable per profile inside the feasible set
    auto spec = DomainSpec::plain(4, 3, 2);
    auto inst = encode(spec, {});
    auto ccav = make_rule("ccav", TieBreakOrder::identity(3));
    for (size_t i = 0; i < inst.map.profiles.size(); ++i) {
        Committee w = ccav(inst.map.profiles[i], spec.k);
        bool found = false;
        for (int ci : inst.map.feasible[i])
            if (inst.map.committees[ci] == w) found = true;
        CHECK(found);
    }
}

TEST_CASE("variable map decodes both directions") {
    auto spec = DomainSpec::sat_restricted(4, 3, 2);
    auto inst = encode(spec, {});
    for (int var = 1; var <= inst.num_vars; ++var) {
        auto [idx, pos] = inst.map.profile_of(var);
        CHECK(inst.map.var_of(idx, pos) == var);
    }
    CHECK_THROWS(inst.map.profile_of(0));
    CHECK_THROWS(inst.map.profile_of(inst.num_vars + 1));
    auto json = inst.map.to_json();
    CHECK(json.find("\"var\":1") != std::string::npos);
}

TEST_CASE("decode_model enforces exactly-one") {
    auto a = AnonymousProfile::make(
        4, {{Ballot::parse("a"), 4}, {Ballot::parse("d"), 2}});
    EncodeOptions opts;
    opts.profile_restriction = std::vector<AnonymousProfile>{a};
    auto inst = encode(DomainSpec::sat_restricted(6, 4, 3), opts);
    REQUIRE(inst.num_vars == 4);
    std::vector<bool> model(inst.num_vars + 1, false);
    model[2] = true;
    auto rule = decode_model(model, inst.map);
    CHECK(rule(a, 3) == inst.map.committee_of(2));
    CHECK_THROWS(rule(a, 2));          // wrong k
    auto other = AnonymousProfile::make(4, {{Ballot::parse("b"), 6}});
    CHECK_THROWS(rule(other, 3));      // outside the decoded domain
    std::vector<bool> none(inst.num_vars + 1, false);
    CHECK_THROWS(decode_model(none, inst.map));
    model[3] = true;
    CHECK_THROWS(decode_model(model, inst.map));
}

TEST_CASE("appendix table loads 106 profiles and is checksummed") {
    auto profiles = load_appendix_c_profiles(data_file("appendix_c_profiles.txt"));
    CHECK(profiles.size() == 106);
    for (const auto& a : profiles) {
        CHECK(a.n == 6);
        CHECK(a.m == 4);
    }
    CHECK(profiles.front() == symmetry_designated_profile());
    CHECK_THROWS(load_appendix_c_profiles("no_such_file.txt"));
    // tampered copy fails the checksum
    auto tampered = temp_file("papp_tampered.txt");
    std::ofstream(tampered) << slurp(data_file("appendix_c_profiles.txt")) << "a a a a a a\n";
    CHECK_THROWS(load_appendix_c_profiles(tampered.string()));
    std::filesystem::remove(tampered);
}

TEST_CASE("appendix instance has the frozen shape") {
    auto inst = encode_appendix_c(data_file("appendix_c_profiles.txt"));
    CHECK(inst.map.profiles.size() == 106);
    CHECK(inst.num_vars == 460);
    CHECK(inst.num_clauses == 3634);
    CHECK(inst.alo_clauses == 106);
    // without symmetry breaking the instance relaxes: more variables
    EncodeOptions opts;
    opts.feasibility_filter = FeasibilityFilter::CleverWR;
    opts.pareto = true;
    opts.profile_restriction = load_appendix_c_profiles(data_file("appendix_c_profiles.txt"));
    auto relaxed = encode(DomainSpec::sat_restricted(6, 4, 3), opts);
    CHECK(relaxed.num_vars > inst.num_vars);
}

TEST_CASE("external solver round-trip on a trivial instance") {
    CnfInstance inst;
    inst.num_vars = 1;
    inst.num_clauses = 1;
    inst.lits = {1, 0};
    inst.group_clause_counts = {1};
    const char* env = std::getenv("PAPP_SOLVER");
    std::string solver = env ? env : "varisat";
    auto sat = solve(inst, solver);
    REQUIRE(sat.status == SolveResult::Status::Sat);
    REQUIRE(sat.model.size() >= 2);
    CHECK(sat.model[1]);
    CnfInstance contra;
    contra.num_vars = 1;
    contra.num_clauses = 2;
    contra.lits = {1, 0, -1, 0};
    contra.group_clause_counts = {2};
    CHECK(solve(contra, solver).status == SolveResult::Status::Unsat);
    CHECK(solve_file("/nonexistent.cnf", solver).status ==
          SolveResult::Status::Unknown);
}

TEST_CASE("option tag parsing") {
    CHECK(parse_representation_axiom("wr") == RepresentationAxiom::WeakRepresentation);
    CHECK(parse_representation_axiom("wpr") ==
          RepresentationAxiom::WeakProportionalRepresentation);
    CHECK_THROWS(parse_representation_axiom("jr"));
    CHECK(parse_sp_mode("cardinal") == SpMode::Cardinal);
    CHECK(parse_sp_mode("subset") == SpMode::SubsetRestricted);
    CHECK(parse_sp_mode("subset-free") == SpMode::SubsetFree);
    CHECK_THROWS(parse_sp_mode("weak"));
}
