#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "papp/axioms.hpp"
#include "papp/constructions.hpp"
#include "papp/model.hpp"
#include "papp/rules.hpp"
#include "papp/sat.hpp"

namespace {

using namespace papp;

std::string read_input(const std::string& path) {
    if (path == "-") {
        std::ostringstream buf;
        buf << std::cin.rdbuf();
        return buf.str();
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

TieBreakOrder tie_break_for(const std::string& flag, int m) {
    if (flag.empty()) return TieBreakOrder::identity(m);
    std::vector<Party> parties;
    for (char ch : flag) parties.push_back(parse_party(std::string(1, ch)));
    if (static_cast<int>(parties.size()) != m)
        throw std::invalid_argument("tie-break order must list all " +
                                    std::to_string(m) + " parties");
    return TieBreakOrder::from_parties(parties);
}

std::string default_solver_cmd() {
    if (const char* env = std::getenv("PAPP_SOLVER")) return env;
    return "varisat";
}

std::string locate_appendix_data(const std::string& flag_value) {
    if (!flag_value.empty()) return flag_value;
    namespace fs = std::filesystem;
    for (const char* candidate :
         {"data/appendix_c_profiles.txt", "../data/appendix_c_profiles.txt"})
        if (fs::exists(candidate)) return candidate;
    throw std::runtime_error(
        "cannot locate appendix_c_profiles.txt; pass --data");
}

void guard_domain_size(const DomainSpec& spec, uint64_t cap) {
    uint64_t count = count_profiles(spec);
    if (count > cap)
        throw CLI::ValidationError(
            "domain holds " + std::to_string(count) +
            " profiles, above the cap of " + std::to_string(cap) +
            " (raise --max-profiles to proceed)");
}

int cmd_eval(const std::string& rule_name, int k, const std::string& profile_path,
             const std::string& tb_flag, bool json_out) {
    AnonymousProfile a = AnonymousProfile::from_json(read_input(profile_path));
    TieBreakOrder tb = tie_break_for(tb_flag, a.m);
    Committee w = make_rule(rule_name, tb)(a, k);
    std::optional<WeightVector> weights = rule_weight_vector(rule_name, std::max(k, 1));
    std::optional<Rational> score;
    if (weights && k > 0) score = thiele_score(*weights, w, a);
    if (json_out) {
        nlohmann::json out;
        out["committee"] = w.to_string();
        if (score) out["score"] = score->str();
        std::cout << out.dump() << "\n";
    } else {
        std::cout << w.to_string();
        if (score) std::cout << " score " << *score;
        std::cout << "\n";
    }
    return 0;
}

int cmd_check(const std::string& rule_name, const std::string& axiom_tag,
              DomainSpec spec, bool restricted, const std::string& tb_flag,
              bool collect_all, int jobs, uint64_t cap, bool json_out) {
    if (restricted)
        spec = DomainSpec::sat_restricted(spec.n, spec.m, spec.k);
    guard_domain_size(spec, cap);
    TieBreakOrder tb = tie_break_for(tb_flag, spec.m);
    RuleOracle rule = make_rule(rule_name, tb);
    Axiom axiom = parse_axiom(axiom_tag);
    CheckResult result = check_axiom(rule, axiom, spec, {collect_all, jobs});
    if (json_out) {
        nlohmann::json out;
        out["rule"] = rule_name;
        out["axiom"] = axiom_name(axiom);
        out["profiles_checked"] = result.profiles_checked;
        out["passed"] = result.passed();
        out["witnesses"] = nlohmann::json::array();
        for (const auto& wit : result.witnesses)
            out["witnesses"].push_back(nlohmann::json::parse(wit.to_json()));
        std::cout << out.dump() << "\n";
    } else if (result.passed()) {
        std::cout << "pass: " << rule_name << " satisfies " << axiom_name(axiom)
                  << " on " << result.profiles_checked << " profiles\n";
    } else {
        std::cout << "violation: " << result.witnesses.front().to_json() << "\n";
        if (collect_all)
            std::cout << result.witnesses.size() << " witnesses in total\n";
    }
    return result.passed() ? 0 : 1;
}

void print_instance_stats(std::ostream& os, const CnfInstance& inst) {
    os << "variables " << inst.num_vars << ", clauses " << inst.num_clauses
       << " (at-least-one " << inst.alo_clauses << ", at-most-one "
       << inst.amo_clauses << ", strategyproofness " << inst.sp_clauses
       << "), groups " << inst.num_groups() << "\n";
}

int cmd_encode(DomainSpec spec, bool unrestricted, bool appendix_c,
               const std::string& data_flag, EncodeOptions opts,
               const std::string& out_path, const std::string& gcnf_path,
               const std::string& varmap_path, uint64_t cap) {
    CnfInstance inst;
    if (appendix_c) {
        inst = encode_appendix_c(locate_appendix_data(data_flag));
    } else {
        if (!unrestricted) spec = DomainSpec::sat_restricted(spec.n, spec.m, spec.k);
        guard_domain_size(spec, cap);
        inst = encode(spec, opts);
    }
    bool to_stdout = out_path.empty() || out_path == "-";
    write_dimacs(inst, to_stdout ? "/dev/stdout" : out_path);
    if (!gcnf_path.empty()) write_gcnf(inst, gcnf_path);
    if (!varmap_path.empty()) {
        std::ofstream out(varmap_path);
        out << inst.map.to_json() << "\n";
    }
    print_instance_stats(to_stdout ? std::cerr : std::cout, inst);
    return 0;
}

int cmd_solve(const std::string& cnf_path, const std::string& solver_cmd,
              const std::string& expect) {
    std::string path = cnf_path;
    std::filesystem::path temp;
    if (path == "-") {
        temp = std::filesystem::temp_directory_path() /
               ("papp-stdin-" + std::to_string(getpid()) + ".cnf");
        std::ofstream out(temp, std::ios::binary);
        out << std::cin.rdbuf();
        path = temp.string();
    }
    SolveResult result = solve_file(path, solver_cmd);
    if (!temp.empty()) std::filesystem::remove(temp);
    switch (result.status) {
        case SolveResult::Status::Sat: std::cout << "SAT\n"; break;
        case SolveResult::Status::Unsat: std::cout << "UNSAT\n"; break;
        case SolveResult::Status::Unknown:
            std::cerr << "solver failed (exit " << result.exit_code << "):\n"
                      << result.output;
            return 3;
    }
    if (!expect.empty()) {
        bool sat = result.status == SolveResult::Status::Sat;
        if (sat != (expect == "sat")) {
            std::cerr << "expected " << expect << "\n";
            return 1;
        }
    }
    return 0;
}

void print_bundle(const CounterexampleBundle& bundle) {
    std::cout << "k = " << bundle.k << ", profile A = " << bundle.profile.to_string()
              << " (n = " << bundle.profile.n << ")\n";
    std::cout << "true ballot " << bundle.true_ballot.to_string()
              << " deviates; profile A' = " << bundle.deviated_profile.to_string()
              << "\n";
    if (bundle.expected_weights)
        std::cout << "portioning weights " << bundle.expected_weights->to_string()
                  << " -> " << bundle.expected_weights_deviated->to_string() << "\n";
    for (const auto& exp : bundle.expectations) {
        std::cout << "tie-break";
        for (Party p : exp.tb.order) std::cout << " " << party_name(p);
        std::cout << ": f(A) = " << exp.committee.to_string()
                  << ", f(A') = " << exp.deviated_committee.to_string();
        if (exp.violates_sp_unrepresented)
            std::cout << "  [sp-unrepresented violation]";
        std::cout << "\n";
    }
}

int cmd_demo(const std::string& which, const std::string& weights_flag,
             const std::string& method, const std::string& divisor_table) {
    CounterexampleBundle bundle;
    if (which == "thm3") {
        WeightVector w = weights_flag.empty()
                             ? WeightVector::pav(8)
                             : rule_weight_vector("thiele:" + weights_flag, 8).value();
        bundle = build_thiele_counterexample(w);
    } else if (which == "thm4-seq") {
        WeightVector w = weights_flag.empty()
                             ? WeightVector::pav(8)
                             : rule_weight_vector("thiele:" + weights_flag, 8).value();
        bundle = build_seq_thiele_counterexample(w);
    } else if (which == "thm4-divisor") {
        DivisorFunction g = DivisorFunction::jefferson();
        if (method == "table") {
            std::vector<Rational> table;
            std::stringstream ss(divisor_table);
            std::string tok;
            while (std::getline(ss, tok, ',')) table.push_back(parse_rational(tok));
            g = DivisorFunction::from_table(std::move(table));
        } else if (method != "jefferson") {
            throw CLI::ValidationError("unknown divisor method: " + method);
        }
        bundle = build_divisor_mp_counterexample(g);
    } else {
        throw CLI::ValidationError("unknown demo: " + which);
    }
    print_bundle(bundle);
    try {
        verify_bundle(bundle);
    } catch (const std::exception& e) {
        std::cerr << "verification FAILED: " << e.what() << "\n";
        return 1;
    }
    std::cout << "verified\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"party-approval committee elections: rules, axiom audits, and "
                 "the SAT impossibility pipeline"};
    app.require_subcommand(1);

    std::string rule_name, axiom_tag = "sp", tb_flag, profile_path = "-";
    DomainSpec spec;
    bool restricted = false, unrestricted = false, collect_all = false;
    bool json_out = false, appendix_c = false;
    int jobs = 1;
    uint64_t cap = 10'000'000;

    auto* eval = app.add_subcommand("eval", "evaluate a rule on a profile");
    eval->add_option("--rule", rule_name)->required();
    eval->add_option("--k", spec.k)->required();
    eval->add_option("--tie-break", tb_flag, "party letters, best first");
    eval->add_option("profile", profile_path, "profile JSON file, - for stdin");
    eval->add_flag("--json", json_out);

    auto* check = app.add_subcommand("check", "exhaustively audit an axiom");
    check->add_option("--rule", rule_name)->required();
    check->add_option("--axiom", axiom_tag)->required();
    check->add_option("--n", spec.n)->required();
    check->add_option("--m", spec.m)->required();
    check->add_option("--k", spec.k)->required();
    check->add_flag("--restricted", restricted,
                    "apply the SAT-instance ballot restrictions");
    check->add_option("--tie-break", tb_flag);
    check->add_flag("--all", collect_all, "collect every witness");
    check->add_option("--jobs", jobs);
    check->add_option("--max-profiles", cap);
    check->add_flag("--json", json_out);

    EncodeOptions eopts;
    std::string rep_axiom = "wr", sp_mode = "cardinal";
    std::string out_path, gcnf_path, varmap_path, data_flag;
    auto* encode_cmd = app.add_subcommand("encode", "emit the CNF encoding");
    encode_cmd->add_option("--n", spec.n);
    encode_cmd->add_option("--m", spec.m);
    encode_cmd->add_option("--k", spec.k);
    encode_cmd->add_option("--axiom", rep_axiom, "wr | wpr");
    encode_cmd->add_flag("--cleverWR", "nested-chain feasibility filter");
    encode_cmd->add_flag("--symmetry-breaking", eopts.symmetry_breaking);
    encode_cmd->add_flag("--pareto", eopts.pareto);
    encode_cmd->add_option("--sp-mode", sp_mode, "cardinal | subset | subset-free");
    encode_cmd->add_flag("--unrestricted", unrestricted,
                         "drop the SAT-instance ballot restrictions");
    encode_cmd->add_flag("--appendix-c", appendix_c,
                         "the shipped 106-profile restricted instance");
    encode_cmd->add_option("--data", data_flag, "profile table path");
    encode_cmd->add_option("-o,--output", out_path, "DIMACS path, - for stdout");
    encode_cmd->add_option("--gcnf", gcnf_path, "also write group-CNF here");
    encode_cmd->add_option("--varmap", varmap_path, "JSON variable map sidecar");
    encode_cmd->add_option("--jobs", jobs);
    encode_cmd->add_option("--max-profiles", cap);

    std::string cnf_path = "-", solver_cmd = default_solver_cmd(), expect;
    auto* solve_cmd = app.add_subcommand("solve", "run the external SAT solver");
    solve_cmd->add_option("cnf", cnf_path, "DIMACS file, - for stdin");
    solve_cmd->add_option("--solver-cmd", solver_cmd,
                          "command template, {cnf} replaced by the path");
    solve_cmd->add_option("--expect", expect)
        ->check(CLI::IsMember({"sat", "unsat"}));

    std::string demo_name, weights_flag, method = "jefferson", divisor_table;
    auto* demo = app.add_subcommand("demo", "reproduce a manipulation bundle");
    demo->add_option("name", demo_name, "thm3 | thm4-seq | thm4-divisor")->required();
    demo->add_option("--weights", weights_flag, "comma-separated rationals");
    demo->add_option("--method", method, "jefferson | table");
    demo->add_option("--divisor-table", divisor_table);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*eval) return cmd_eval(rule_name, spec.k, profile_path, tb_flag, json_out);
        if (*check)
            return cmd_check(rule_name, axiom_tag, spec, restricted, tb_flag,
                             collect_all, jobs, cap, json_out);
        if (*encode_cmd) {
            eopts.representation_axiom = papp::parse_representation_axiom(rep_axiom);
            eopts.sp_mode = papp::parse_sp_mode(sp_mode);
            if (encode_cmd->count("--cleverWR"))
                eopts.feasibility_filter = papp::FeasibilityFilter::CleverWR;
            eopts.jobs = jobs;
            if (!appendix_c && (spec.n <= 0 || spec.m <= 0 || spec.k <= 0))
                throw CLI::ValidationError("--n, --m, --k required unless --appendix-c");
            return cmd_encode(spec, unrestricted, appendix_c, data_flag, eopts,
                              out_path, gcnf_path, varmap_path, cap);
        }
        if (*solve_cmd) return cmd_solve(cnf_path, solver_cmd, expect);
        if (*demo) return cmd_demo(demo_name, weights_flag, method, divisor_table);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
