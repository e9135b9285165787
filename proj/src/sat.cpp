#include "papp/sat.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <memory>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>
#include <unordered_map>

#include <sys/wait.h>
#include <unistd.h>

#include <json.hpp>

namespace papp {

RepresentationAxiom parse_representation_axiom(const std::string& tag) {
    if (tag == "wr") return RepresentationAxiom::WeakRepresentation;
    if (tag == "wpr") return RepresentationAxiom::WeakProportionalRepresentation;
    throw std::invalid_argument("unsupported representation axiom: " + tag);
}

SpMode parse_sp_mode(const std::string& tag) {
    if (tag == "cardinal") return SpMode::Cardinal;
    if (tag == "subset") return SpMode::SubsetRestricted;
    if (tag == "subset-free") return SpMode::SubsetFree;
    throw std::invalid_argument("unsupported sp mode: " + tag);
}

std::pair<int, int> CnfVariableMap::profile_of(int var) const {
    if (var < 1 || var > num_vars) throw std::out_of_range("variable out of range");
    auto it = std::upper_bound(var_base.begin(), var_base.end(), var);
    int idx = static_cast<int>(it - var_base.begin()) - 1;
    return {idx, var - var_base[idx]};
}

const Committee& CnfVariableMap::committee_of(int var) const {
    auto [idx, pos] = profile_of(var);
    return committees[feasible[idx][pos]];
}

std::string CnfVariableMap::to_json() const {
    nlohmann::json out = nlohmann::json::array();
    for (size_t i = 0; i < profiles.size(); ++i)
        for (size_t pos = 0; pos < feasible[i].size(); ++pos) {
            nlohmann::json entry;
            entry["var"] = var_base[i] + static_cast<int>(pos);
            entry["profile"] = nlohmann::json::parse(profiles[i].to_json());
            entry["committee"] = committees[feasible[i][pos]].to_string();
            out.push_back(std::move(entry));
        }
    return out.dump();
}

AnonymousProfile symmetry_designated_profile() {
    return AnonymousProfile::make(
        4, {{Ballot::of({0}), 1},
            {Ballot::of({0, 1}), 1},
            {Ballot::of({1}), 1},
            {Ballot::of({2}), 1},
            {Ballot::of({2, 3}), 1},
            {Ballot::of({3}), 1}});
}

namespace {

struct SpWorkerOut {
    std::vector<int32_t> lits;
    std::vector<uint32_t> group_counts; // clauses per emitted pair-group
    uint64_t clauses = 0;
};

} // namespace

CnfInstance encode(const DomainSpec& spec, const EncodeOptions& opts) {
    spec.validate();
    if (spec.m > 12) throw std::invalid_argument("encode supports m <= 12");

    CnfInstance inst;
    CnfVariableMap& map = inst.map;
    map.profiles = opts.profile_restriction ? *opts.profile_restriction
                                            : enumerate_profiles(spec);
    map.committees = enumerate_committees(spec.m, spec.k);
    const int num_committees = static_cast<int>(map.committees.size());
    const int num_profiles = static_cast<int>(map.profiles.size());

    // seats_tab[ci << m | ballot mask] = seats the committee gives the ballot
    const int m = spec.m;
    std::vector<int> seats_tab(static_cast<size_t>(num_committees) << m, 0);
    std::vector<uint32_t> elected(num_committees, 0);
    for (int ci = 0; ci < num_committees; ++ci) {
        const Committee& w = map.committees[ci];
        for (uint32_t mask = 1; mask < (1u << m); ++mask)
            seats_tab[(static_cast<size_t>(ci) << m) | mask] = w.seats_in(Ballot(mask));
        for (Party p = 0; p < m; ++p)
            if (w.seats[p] > 0) elected[ci] |= 1u << p;
    }

    const AnonymousProfile designated = symmetry_designated_profile();
    bool designated_seen = false;

    map.feasible.resize(num_profiles);
    map.var_base.resize(num_profiles);
    int next_var = 1;
    for (int i = 0; i < num_profiles; ++i) {
        const AnonymousProfile& a = map.profiles[i];
        std::vector<int> demand(m, 0);
        if (opts.representation_axiom == RepresentationAxiom::WeakRepresentation) {
            for (Party x : wr_required_parties(a, spec.k)) demand[x] = 1;
        } else {
            for (Party x = 0; x < m; ++x)
                demand[x] = static_cast<int>(
                    static_cast<long long>(a.count(Ballot(1u << x))) * spec.k / a.n);
        }
        std::vector<std::pair<Ballot, int>> chain_bounds;
        if (opts.feasibility_filter == FeasibilityFilter::CleverWR)
            chain_bounds = clever_wr_context(a, spec.k).ballot_lower_bounds;
        uint32_t dominated = 0;
        if (opts.pareto)
            for (Party y : pareto_dominated_parties(a)) dominated |= 1u << y;

        std::vector<int>& feas = map.feasible[i];
        if (opts.symmetry_breaking && a == designated) {
            designated_seen = true;
            for (const char* text : {"[a,a,c]", "[a,b,c]"}) {
                Committee w = Committee::parse(text, m);
                auto it = std::find(map.committees.begin(), map.committees.end(), w);
                feas.push_back(static_cast<int>(it - map.committees.begin()));
            }
            std::sort(feas.begin(), feas.end());
        } else {
            for (int ci = 0; ci < num_committees; ++ci) {
                const Committee& w = map.committees[ci];
                bool ok = (elected[ci] & dominated) == 0;
                for (Party x = 0; x < m && ok; ++x) ok = w.seats[x] >= demand[x];
                for (const auto& [b, bound] : chain_bounds) {
                    if (!ok) break;
                    ok = seats_tab[(static_cast<size_t>(ci) << m) | b.mask] >= bound;
                }
                if (ok) feas.push_back(ci);
            }
        }
        if (feas.empty())
            throw std::runtime_error("empty feasible committee set for profile " +
                                     a.to_string());
        map.var_base[i] = next_var;
        next_var += static_cast<int>(feas.size());
    }
    if (opts.symmetry_breaking && !designated_seen)
        throw std::invalid_argument(
            "symmetry breaking requires the designated profile in the domain");
    map.num_vars = next_var - 1;
    inst.num_vars = map.num_vars;

    // structural clauses: at-least-one, then pairwise at-most-one, per profile
    for (int i = 0; i < num_profiles; ++i) {
        const auto& feas = map.feasible[i];
        const int t = static_cast<int>(feas.size());
        for (int pos = 0; pos < t; ++pos)
            inst.lits.push_back(map.var_of(i, pos));
        inst.lits.push_back(0);
        ++inst.alo_clauses;
        for (int p = 0; p < t; ++p)
            for (int q = p + 1; q < t; ++q) {
                inst.lits.push_back(-map.var_of(i, p));
                inst.lits.push_back(-map.var_of(i, q));
                inst.lits.push_back(0);
                ++inst.amo_clauses;
            }
    }

    // strategyproofness clauses, one group per ordered profile pair
    std::unordered_map<std::string, int> index;
    index.reserve(num_profiles * 2);
    for (int i = 0; i < num_profiles; ++i) index.emplace(map.profiles[i].key(), i);
    const std::vector<Ballot> all_ballots = enumerate_ballots(spec);
    const bool restricted = opts.profile_restriction.has_value();

    auto run_chunk = [&](int lo, int hi, SpWorkerOut& out) {
        for (int i = lo; i < hi; ++i) {
            const AnonymousProfile& a = map.profiles[i];
            for (const auto& [b, c] : a.counts) {
                for (Ballot b2 : all_ballots) {
                    if (b2 == b) continue;
                    AnonymousProfile a2 = a.with_moved_ballot(b, b2);
                    if (!restricted && !spec.admits(a2)) continue;
                    auto it = index.find(a2.key());
                    if (it == index.end()) continue;
                    const int j = it->second;
                    const auto& feas_a = map.feasible[i];
                    const auto& feas_b = map.feasible[j];
                    uint32_t emitted = 0;
                    // multiset inclusion of the seats the deviator's true
                    // ballot holds: V|_B <= W|_B per party, strict somewhere
                    auto multiset_gain = [&](int vci, int wci) {
                        const Committee& v = map.committees[vci];
                        const Committee& w = map.committees[wci];
                        bool strict = false;
                        for (Party p = 0; p < m; ++p) {
                            if (!b.contains(p)) continue;
                            if (v.seats[p] > w.seats[p]) return false;
                            if (v.seats[p] < w.seats[p]) strict = true;
                        }
                        return strict;
                    };
                    for (size_t vp = 0; vp < feas_a.size(); ++vp) {
                        const int vci = feas_a[vp];
                        const int v_seats =
                            seats_tab[(static_cast<size_t>(vci) << m) | b.mask];
                        for (size_t wp = 0; wp < feas_b.size(); ++wp) {
                            const int wci = feas_b[wp];
                            bool gain;
                            switch (opts.sp_mode) {
                                case SpMode::Cardinal:
                                    gain = seats_tab[(static_cast<size_t>(wci) << m) |
                                                     b.mask] > v_seats;
                                    break;
                                case SpMode::SubsetRestricted:
                                    gain = b2.subset_of(b) && multiset_gain(vci, wci);
                                    break;
                                case SpMode::SubsetFree:
                                    gain = multiset_gain(vci, wci);
                                    break;
                            }
                            if (!gain) continue;
                            out.lits.push_back(-map.var_of(i, static_cast<int>(vp)));
                            out.lits.push_back(-map.var_of(j, static_cast<int>(wp)));
                            out.lits.push_back(0);
                            ++emitted;
                        }
                    }
                    if (emitted > 0) {
                        out.group_counts.push_back(emitted);
                        out.clauses += emitted;
                    }
                }
            }
        }
    };

    const int jobs = std::clamp(opts.jobs, 1, std::max(1, num_profiles));
    std::vector<SpWorkerOut> parts(jobs);
    if (jobs == 1) {
        run_chunk(0, num_profiles, parts[0]);
    } else {
        std::vector<std::thread> threads;
        const int chunk = (num_profiles + jobs - 1) / jobs;
        for (int t = 0; t < jobs; ++t)
            threads.emplace_back([&, t] {
                run_chunk(t * chunk, std::min(num_profiles, (t + 1) * chunk), parts[t]);
            });
        for (auto& th : threads) th.join();
    }

    inst.group_clause_counts.push_back(
        static_cast<uint32_t>(inst.alo_clauses + inst.amo_clauses));
    for (auto& part : parts) {
        inst.lits.insert(inst.lits.end(), part.lits.begin(), part.lits.end());
        inst.group_clause_counts.insert(inst.group_clause_counts.end(),
                                        part.group_counts.begin(),
                                        part.group_counts.end());
        inst.sp_clauses += part.clauses;
        part = SpWorkerOut{};
    }
    inst.num_clauses = inst.alo_clauses + inst.amo_clauses + inst.sp_clauses;
    return inst;
}

std::vector<AnonymousProfile> load_appendix_c_profiles(const std::string& path) {
    // pinned FNV-1a-64 of the shipped table
    constexpr uint64_t kChecksum = 0x634375635dc9e328ULL;
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open profile table: " + path);
    std::string content((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : content) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    if (h != kChecksum)
        throw std::runtime_error("profile table checksum mismatch: " + path);

    std::vector<AnonymousProfile> out;
    std::istringstream lines(content);
    std::string line;
    while (std::getline(lines, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream fields(line);
        std::vector<Ballot> ballots;
        std::string tok;
        while (fields >> tok) ballots.push_back(Ballot::parse(tok));
        out.push_back(AnonymousProfile::from_ballot_list(4, ballots));
    }
    if (out.size() != 106)
        throw std::runtime_error("profile table holds " + std::to_string(out.size()) +
                                 " profiles, expected 106");
    return out;
}

CnfInstance encode_appendix_c(const std::string& data_path) {
    EncodeOptions opts;
    opts.representation_axiom = RepresentationAxiom::WeakRepresentation;
    opts.feasibility_filter = FeasibilityFilter::CleverWR;
    opts.symmetry_breaking = true;
    opts.pareto = true;
    opts.profile_restriction = load_appendix_c_profiles(data_path);
    return encode(DomainSpec::sat_restricted(6, 4, 3), opts);
}

namespace {

class BufferedWriter {
public:
    explicit BufferedWriter(const std::string& path) : file_(fopen(path.c_str(), "wb")) {
        if (!file_) throw std::runtime_error("cannot open for writing: " + path);
        buf_.reserve(1 << 20);
    }
    ~BufferedWriter() {
        if (file_) {
            flush();
            fclose(file_);
        }
    }
    void text(const char* s) { buf_.append(s); maybe_flush(); }
    void text(const std::string& s) { buf_.append(s); maybe_flush(); }
    void number(long long v) {
        char tmp[24];
        auto [p, ec] = std::to_chars(tmp, tmp + sizeof tmp, v);
        buf_.append(tmp, p - tmp);
        maybe_flush();
    }
    void flush() {
        if (!buf_.empty()) {
            if (fwrite(buf_.data(), 1, buf_.size(), file_) != buf_.size())
                throw std::runtime_error("write failure");
            buf_.clear();
        }
    }

private:
    void maybe_flush() {
        if (buf_.size() > (1 << 20) - 64) flush();
    }
    FILE* file_;
    std::string buf_;
};

void write_clauses(BufferedWriter& out, const CnfInstance& inst,
                   const uint32_t* group_of) {
    size_t clause = 0;
    bool at_start = true;
    for (int32_t lit : inst.lits) {
        if (at_start && group_of) {
            out.text("{");
            out.number(group_of[clause]);
            out.text("} ");
        }
        at_start = false;
        if (lit == 0) {
            out.text("0\n");
            ++clause;
            at_start = true;
        } else {
            out.number(lit);
            out.text(" ");
        }
    }
}

} // namespace

void write_dimacs(const CnfInstance& inst, const std::string& path) {
    BufferedWriter out(path);
    out.text("p cnf ");
    out.number(inst.num_vars);
    out.text(" ");
    out.number(static_cast<long long>(inst.num_clauses));
    out.text("\n");
    write_clauses(out, inst, nullptr);
    out.flush();
}

void write_gcnf(const CnfInstance& inst, const std::string& path) {
    std::vector<uint32_t> group_of;
    group_of.reserve(inst.num_clauses);
    for (size_t g = 0; g < inst.group_clause_counts.size(); ++g)
        group_of.insert(group_of.end(), inst.group_clause_counts[g],
                        static_cast<uint32_t>(g));
    if (group_of.size() != inst.num_clauses)
        throw std::logic_error("group labels inconsistent with clause count");

    BufferedWriter out(path);
    out.text("p gcnf ");
    out.number(inst.num_vars);
    out.text(" ");
    out.number(static_cast<long long>(inst.num_clauses));
    out.text(" ");
    out.number(inst.num_groups());
    out.text("\n");
    write_clauses(out, inst, group_of.data());
    out.flush();
}

SolveResult solve_file(const std::string& cnf_path, const std::string& solver_cmd,
                       int expect_vars) {
    std::string cmd = solver_cmd;
    if (auto pos = cmd.find("{cnf}"); pos != std::string::npos)
        cmd.replace(pos, 5, cnf_path);
    else
        cmd += " " + cnf_path;
    cmd = "( " + cmd + " ) 2>&1";

    SolveResult result;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) throw std::runtime_error("cannot spawn solver: " + cmd);
    char buf[4096];
    std::string output;
    size_t got;
    while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) output.append(buf, got);
    int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    result.output = output;

    if (result.exit_code == 20) {
        result.status = SolveResult::Status::Unsat;
        return result;
    }
    if (result.exit_code != 10) {
        result.status = SolveResult::Status::Unknown;
        return result;
    }
    result.status = SolveResult::Status::Sat;
    result.model.assign(static_cast<size_t>(std::max(0, expect_vars)) + 1, false);
    std::istringstream lines(output);
    std::string line;
    while (std::getline(lines, line)) {
        if (line.size() < 2 || line[0] != 'v' || !isspace(line[1])) continue;
        std::istringstream fields(line.substr(1));
        long long lit;
        while (fields >> lit) {
            if (lit == 0) continue;
            size_t var = static_cast<size_t>(lit < 0 ? -lit : lit);
            if (var >= result.model.size()) result.model.resize(var + 1, false);
            result.model[var] = lit > 0;
        }
    }
    return result;
}

SolveResult solve(const CnfInstance& inst, const std::string& solver_cmd) {
    namespace fs = std::filesystem;
    fs::path path = fs::temp_directory_path() /
                    ("papp-" + std::to_string(getpid()) + "-" +
                     std::to_string(reinterpret_cast<uintptr_t>(&inst) & 0xffff) +
                     ".cnf");
    write_dimacs(inst, path.string());
    SolveResult result = solve_file(path.string(), solver_cmd, inst.num_vars);
    std::error_code ec;
    fs::remove(path, ec);
    return result;
}

RuleOracle decode_model(const std::vector<bool>& model, const CnfVariableMap& map) {
    auto table = std::make_shared<std::unordered_map<std::string, Committee>>();
    table->reserve(map.profiles.size());
    int k = -1;
    for (size_t i = 0; i < map.profiles.size(); ++i) {
        int chosen = -1;
        for (size_t pos = 0; pos < map.feasible[i].size(); ++pos) {
            int var = map.var_base[i] + static_cast<int>(pos);
            if (var < static_cast<int>(model.size()) && model[var]) {
                if (chosen >= 0)
                    throw std::runtime_error("model selects several committees for " +
                                             map.profiles[i].to_string());
                chosen = map.feasible[i][pos];
            }
        }
        if (chosen < 0)
            throw std::runtime_error("model selects no committee for " +
                                     map.profiles[i].to_string());
        const Committee& w = map.committees[chosen];
        k = w.k();
        table->emplace(map.profiles[i].key(), w);
    }
    return [table, k](const AnonymousProfile& a, int want_k) {
        if (want_k != k) throw std::invalid_argument("decoded rule is fixed to k");
        auto it = table->find(a.key());
        if (it == table->end())
            throw std::invalid_argument("profile outside the decoded domain: " +
                                        a.to_string());
        return it->second;
    };
}

} // namespace papp
