#include "sqz/cli.hpp"

#include "sqz/io.hpp"
#include "sqz/oracle.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

namespace sqz {

namespace {

using json = nlohmann::json;

std::string fmt6(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string join6(const Vector& v) {
    std::string s;
    for (Index k = 0; k < v.size(); ++k) {
        if (k) s += ' ';
        s += fmt6(v[k]);
    }
    return s;
}

std::vector<Index> one_based(const std::vector<Index>& zero) {
    std::vector<Index> out = zero;
    for (Index& i : out) ++i;
    return out;
}

int exit_code(const Outcome& o) {
    if (std::holds_alternative<Optimal>(o)) return 0;
    if (std::holds_alternative<Infeasible>(o)) return 2;
    return 3;
}

struct SolveFlags {
    std::optional<double> delta_high, delta_low, epsilon;
    std::optional<Index> delta_switch, max_iter;
    std::string select = "chronological";

    void add_to(CLI::App* app) {
        app->add_option("--delta-high", delta_high, "Squeeze strength delta for early iterations (default 100)");
        app->add_option("--delta-low", delta_low, "Squeeze strength delta for later iterations (default 5)");
        app->add_option("--delta-switch", delta_switch, "Last iteration using --delta-high (default r)");
        app->add_option("--epsilon", epsilon, "Decision threshold epsilon (default 1/sqrt(16 r))");
        app->add_option("--max-iter", max_iter, "Iteration cap (default 8 r)");
        app->add_option("--select", select, "Selection rule")
            ->check(CLI::IsMember({"chronological", "limit-count"}));
    }

    SolverConfig config() const {
        SolverConfig cfg;
        if (delta_high) cfg.delta_high = *delta_high;
        if (delta_low) cfg.delta_low = *delta_low;
        cfg.delta_switch_iteration = delta_switch;
        cfg.epsilon = epsilon;
        cfg.max_iterations = max_iter;
        cfg.select_rule = select == "limit-count" ? SelectRule::LimitCount : SelectRule::Chronological;
        return cfg;
    }
};

int cmd_solve(const std::string& path, const SolveFlags& flags, const std::string& trace_out, bool as_json,
              std::ostream& out) {
    const LpInstance inst = read_instance(path);
    const SolveResult res = solve(inst, flags.config());
    if (!trace_out.empty()) write_file(trace_out, trace_csv(res.trace, inst.r()));
    if (as_json) {
        out << summary_json(res) << '\n';
        return exit_code(res.outcome);
    }
    out << "status: " << status_name(res.outcome) << '\n';
    if (const auto* opt = std::get_if<Optimal>(&res.outcome)) {
        out << "alpha: " << format_indices(opt->alpha.one_based()) << '\n';
        out << "objective: " << fmt6(opt->objective) << '\n';
        out << "z: " << join6(opt->z) << '\n';
    } else if (const auto* fl = std::get_if<Flagged>(&res.outcome)) {
        out << "reason: " << fl->reason << '\n';
    }
    out << "iterations: " << res.iterations << '\n';
    for (const auto& e : res.events) out << "note: " << e << '\n';
    return exit_code(res.outcome);
}

struct Verdict {
    enum Kind { Agree, Skipped, NonSilent, Silent } kind;
    std::string detail;
};

Verdict compare(const SolveResult& res, const std::optional<OracleResult>& truth,
                bool truth_infeasible) {
    const Outcome& o = res.outcome;
    if (std::holds_alternative<Flagged>(o))
        return {Verdict::NonSilent, "solver flagged: " + std::get<Flagged>(o).reason};
    if (truth_infeasible) {
        if (std::holds_alternative<Infeasible>(o)) return {Verdict::Agree, ""};
        return {Verdict::Silent, "solver reported Optimal on an infeasible instance"};
    }
    if (!truth->unique) return {Verdict::Skipped, "oracle optimum not unique"};
    const auto* opt = std::get_if<Optimal>(&o);
    if (!opt) return {Verdict::Silent, "solver reported Infeasible; oracle alpha " +
                                           format_indices(truth->alpha.one_based())};
    const double tol = 1e-6 * (1.0 + std::abs(truth->objective));
    if (opt->alpha != truth->alpha || std::abs(opt->objective - truth->objective) > tol) {
        return {Verdict::Silent, "alpha " + format_indices(opt->alpha.one_based()) + " vs oracle " +
                                     format_indices(truth->alpha.one_based()) + ", objective " +
                                     fmt6(opt->objective) + " vs " + fmt6(truth->objective)};
    }
    return {Verdict::Agree, ""};
}

// Oracle verdict for an instance: either a result or an infeasible marker.
std::pair<std::optional<OracleResult>, bool> oracle_truth(const LpInstance& inst) {
    const OracleOutcome oc = enumerate_optimal(inst);
    if (oc.status == OracleStatus::Optimal) return {oc.result, false};
    return {std::nullopt, true};
}

std::pair<long, long> parse_seed_range(const std::string& text) {
    const auto dots = text.find("..");
    try {
        if (dots == std::string::npos) {
            const long v = std::stol(text);
            return {v, v};
        }
        return {std::stol(text.substr(0, dots)), std::stol(text.substr(dots + 2))};
    } catch (const std::exception&) {
        throw CLI::ValidationError("--seeds", "expected A..B, got '" + text + "'");
    }
}

int cmd_verify(const std::string& path, const std::string& seeds, Index n, Index m, double threshold,
               const SolveFlags& flags, std::ostream& out) {
    const SolverConfig cfg = flags.config();
    long agree = 0, evaluated = 0, silent = 0, flagged = 0, skipped = 0;

    auto tally = [&](const std::string& label, const Verdict& v) {
        switch (v.kind) {
            case Verdict::Agree:
                ++agree;
                ++evaluated;
                break;
            case Verdict::Skipped:
                ++skipped;
                out << label << ": skipped (" << v.detail << ")\n";
                break;
            case Verdict::NonSilent:
                ++flagged;
                ++evaluated;
                out << label << ": " << v.detail << '\n';
                break;
            case Verdict::Silent:
                ++silent;
                ++evaluated;
                out << label << ": MISMATCH " << v.detail << '\n';
                break;
        }
    };

    if (!path.empty()) {
        const LpInstance inst = read_instance(path);
        std::optional<OracleResult> truth;
        bool infeasible = false;
        const std::string sidecar = path + ".truth";
        if (std::filesystem::exists(sidecar)) {
            const Truth t = parse_truth(read_file(sidecar), inst.r());
            OracleResult res;
            res.z_star = t.z;
            res.alpha = t.alpha;
            res.objective = inst.c.dot(x_part(inst, t.z));
            res.unique = res.nondegenerate = true;
            truth = res;
        } else {
            std::tie(truth, infeasible) = oracle_truth(inst);
        }
        tally(path, compare(solve(inst, cfg), truth, infeasible));
    } else {
        const auto [lo, hi] = parse_seed_range(seeds);
        if (lo > hi) throw CLI::ValidationError("--seeds", "empty seed range");
        for (long seed = lo; seed <= hi; ++seed) {
            const PlantedInstance p = generate_instance(n, m, static_cast<std::uint64_t>(seed));
            std::optional<OracleResult> truth = p.truth;
            bool infeasible = false;
            if (p.inst.r() <= kOracleMaxR) std::tie(truth, infeasible) = oracle_truth(p.inst);
            tally("seed " + std::to_string(seed), compare(solve(p.inst, cfg), truth, infeasible));
        }
    }

    const double rate = evaluated ? static_cast<double>(agree) / static_cast<double>(evaluated) : 1.0;
    out << "agreement: " << agree << "/" << evaluated << " (" << fmt6(rate) << "), flagged " << flagged
        << ", silent mismatches " << silent << ", skipped " << skipped << '\n';
    return rate >= threshold && silent == 0 ? 0 : 3;
}

int cmd_gen(Index n, Index m, std::uint64_t seed, std::optional<Index> support, const std::string& path,
            std::ostream& out) {
    GeneratorOptions opt;
    opt.support_size = support;
    const PlantedInstance p = generate_instance(n, m, seed, opt);
    write_file(path, "# generated n=" + std::to_string(n) + " m=" + std::to_string(m) +
                         " seed=" + std::to_string(seed) + "\n" + format_instance(p.inst));
    write_file(path + ".truth", format_truth(p.truth.alpha, p.truth.z_star));
    out << "wrote " << path << " and " << path << ".truth\n";
    return 0;
}

std::string csv_row(const std::string& label, const Vector& v) {
    std::string s = label;
    for (Index k = 0; k < v.size(); ++k) s += "," + fmt_full(v[k]);
    return s + '\n';
}

std::string sigma_label(double s) {
    if (std::isinf(s)) return s > 0 ? "inf" : "-inf";
    return fmt_full(s);
}

int cmd_locus(const std::string& path, Index j1, double smin, double smax, int samples, bool negative,
              bool with_path, const SolveFlags& flags, const std::string& out_path, std::ostream& out) {
    const LpInstance inst = read_instance(path);
    const Index r = inst.r();
    if (j1 < 1 || j1 > 2 * r) throw CLI::ValidationError("--j", "index must lie in 1..2r");
    if (!(smin > 0.0) || !(smax > smin) || samples < 2)
        throw CLI::ValidationError("--sigma-min/--sigma-max/--samples", "need 0 < min < max and at least 2 samples");
    const Index j = j1 - 1;
    const ProjectionCore core = base_projection(inst);

    std::vector<double> sigmas;
    const double lmin = std::log(smin), lmax = std::log(smax);
    for (int k = 0; k < samples; ++k) sigmas.push_back(std::exp(lmin + (lmax - lmin) * k / (samples - 1)));
    if (negative) {
        const std::size_t count = sigmas.size();
        for (std::size_t k = 0; k < count; ++k) sigmas.push_back(-sigmas[k]);
    }
    sigmas.push_back(0.0);
    sigmas.push_back(sigma_low(core, j));
    sigmas.push_back(1.0);
    sigmas.push_back(sigma_high(core, j));
    sigmas.push_back(kInfinity);

    std::ostringstream csv;
    csv << "sigma";
    for (Index k = 1; k <= 2 * r; ++k) csv << ",comp_" << k;
    csv << '\n';
    for (const auto& pt : locus_sample(core, j, sigmas)) {
        if (pt.point)
            csv << csv_row(sigma_label(pt.sigma), *pt.point);
        else
            csv << "# skipped sigma=" << sigma_label(pt.sigma) << '\n';
    }
    if (with_path) {
        const SolveResult res = solve(inst, flags.config());
        const Vector e = Vector::Ones(2 * r);
        for (const auto& rec : res.trace) csv << csv_row("k=" + std::to_string(rec.k), e - rec.phi);
    }
    if (out_path.empty())
        out << csv.str();
    else
        write_file(out_path, csv.str());
    return 0;
}

int cmd_identities(const std::string& path, std::uint64_t seed, int steps, std::ostream& out) {
    const LpInstance inst = read_instance(path);
    validate(inst);
    ProjectionCore core = base_projection(inst);
    const Index dim = 2 * inst.r();

    auto report = [&](const char* label, const IdentityReport& rep) {
        out << label << ": max " << fmt6(rep.max()) << " (symmetry " << fmt6(rep.symmetry) << ", idempotence "
            << fmt6(rep.idempotence) << ", trace " << fmt6(rep.trace) << ", block " << fmt6(rep.block)
            << ", antisymmetry " << fmt6(rep.antisymmetry) << ", pair_zero " << fmt6(rep.pair_zero)
            << ", omega_sum " << fmt6(rep.omega_sum) << ", phi_sum " << fmt6(rep.phi_sum) << ", cross "
            << fmt6(rep.cross) << ", sphere " << fmt6(rep.sphere) << ")\n";
        return rep.max();
    };

    const double before = report("base", verify_identities(core));
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<Index> pick(0, dim - 1);
    std::uniform_real_distribution<double> logs(std::log(0.1), std::log(10.0));
    for (int k = 0; k < steps; ++k) unidim_update_inplace(core, pick(rng), std::exp(logs(rng)));
    const double after = report("squeezed", verify_identities(core));
    const bool ok = before <= 1e-8 && after <= 1e-8;
    out << (ok ? "identities hold within 1e-8\n" : "identity violation above 1e-8\n");
    return ok ? 0 : 3;
}

}  // namespace

std::string trace_csv(const std::vector<IterationRecord>& trace, Index r) {
    std::ostringstream os;
    os << "k,j,sigma_j,delta,peak_shaving,sum_omega_gamma,gamma";
    for (Index k = 1; k <= 2 * r; ++k) os << ",phi_" << k;
    for (Index k = 1; k <= 2 * r; ++k) os << ",omega_" << k;
    os << '\n';
    for (const auto& rec : trace) {
        os << rec.k << ',';
        if (rec.j) os << *rec.j + 1;
        os << ',' << fmt_full(rec.sigma_j) << ',';
        if (rec.j) os << fmt_full(rec.delta);
        os << ',' << (rec.peak_shaving ? 1 : 0) << ',' << fmt_full(rec.sum_omega_gamma) << ','
           << format_indices(one_based(rec.gamma), "|");
        for (Index k = 0; k < rec.phi.size(); ++k) os << ',' << fmt_full(rec.phi[k]);
        for (Index k = 0; k < rec.omega.size(); ++k) os << ',' << fmt_full(rec.omega[k]);
        os << '\n';
    }
    return os.str();
}

std::string summary_json(const SolveResult& res) {
    json j;
    j["status"] = status_name(res.outcome);
    j["iterations"] = res.iterations;
    json flags = json::array();
    if (const auto* opt = std::get_if<Optimal>(&res.outcome)) {
        j["alpha"] = opt->alpha.one_based();
        j["objective"] = opt->objective;
        j["z"] = std::vector<double>(opt->z.data(), opt->z.data() + opt->z.size());
    } else {
        j["alpha"] = nullptr;
        j["objective"] = nullptr;
        j["z"] = nullptr;
        if (const auto* fl = std::get_if<Flagged>(&res.outcome)) flags.push_back(fl->reason);
    }
    for (const auto& rec : res.trace)
        if (rec.peak_shaving) flags.push_back("peak shaving at k=" + std::to_string(rec.k));
    for (const auto& e : res.events) flags.push_back(e);
    j["flags"] = flags;
    return j.dump();
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Squeeze-mapping LP solver"};
    app.name("sqzlp");
    app.require_subcommand(1, 1);

    std::string path, trace_out, seeds, out_path;
    bool as_json = false, negative = false, with_path = false;
    Index n = 6, m = 3, j = 0;
    std::optional<Index> support;
    std::uint64_t seed = 1;
    double threshold = 0.95, smin = 1e-3, smax = 1e3;
    int samples = 200, steps = 20;
    SolveFlags flags;

    auto* solve_cmd = app.add_subcommand("solve", "Solve an instance file");
    solve_cmd->add_option("instance", path, "Instance file")->required();
    flags.add_to(solve_cmd);
    solve_cmd->add_option("--trace-out", trace_out, "Write the iteration trace CSV here");
    solve_cmd->add_flag("--json", as_json, "Print a JSON summary");

    auto* verify_cmd = app.add_subcommand("verify", "Compare the solver with the brute-force oracle");
    verify_cmd->add_option("instance", path, "Instance file (uses <path>.truth when present)");
    verify_cmd->add_option("--seeds", seeds, "Seed range A..B for generated instances");
    verify_cmd->add_option("--n", n, "Variables per generated instance");
    verify_cmd->add_option("--m", m, "Constraints per generated instance");
    verify_cmd->add_option("--threshold", threshold, "Minimum agreement rate");
    flags.add_to(verify_cmd);

    auto* gen_cmd = app.add_subcommand("gen", "Generate an instance with a planted optimum");
    gen_cmd->add_option("--n", n, "Variables")->required();
    gen_cmd->add_option("--m", m, "Constraints")->required();
    gen_cmd->add_option("--seed", seed, "Random seed")->required();
    gen_cmd->add_option("--support", support, "Number of positive x entries");
    gen_cmd->add_option("--out", out_path, "Output instance path")->required();

    auto* locus_cmd = app.add_subcommand("locus", "Sample the phi circle of one squeeze index");
    locus_cmd->add_option("instance", path, "Instance file")->required();
    locus_cmd->add_option("--j", j, "Squeeze index (1-based)")->required();
    locus_cmd->add_option("--sigma-min", smin, "Smallest sampled sigma");
    locus_cmd->add_option("--sigma-max", smax, "Largest sampled sigma");
    locus_cmd->add_option("--samples", samples, "Number of log-spaced samples");
    locus_cmd->add_flag("--negative", negative, "Also sample negative sigma");
    locus_cmd->add_flag("--path", with_path, "Append the solver path e - phi^k");
    locus_cmd->add_option("--out", out_path, "Write CSV here instead of stdout");
    flags.add_to(locus_cmd);

    auto* id_cmd = app.add_subcommand("identities", "Check projection identities before and after random squeezes");
    id_cmd->add_option("instance", path, "Instance file")->required();
    id_cmd->add_option("--seed", seed, "Seed for the squeeze sequence");
    id_cmd->add_option("--steps", steps, "Number of random squeezes");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    try {
        if (solve_cmd->parsed()) return cmd_solve(path, flags, trace_out, as_json, out);
        if (verify_cmd->parsed()) {
            if (path.empty() == seeds.empty()) {
                err << "error: verify needs exactly one of an instance path or --seeds\n";
                return 1;
            }
            return cmd_verify(path, seeds, n, m, threshold, flags, out);
        }
        if (gen_cmd->parsed()) return cmd_gen(n, m, seed, support, out_path, out);
        if (locus_cmd->parsed())
            return cmd_locus(path, j, smin, smax, samples, negative, with_path, flags, out_path, out);
        if (id_cmd->parsed()) return cmd_identities(path, seed, steps, out);
    } catch (const ParseError& e) {
        err << "error: " << path << ": " << e.what() << '\n';
        return 1;
    } catch (const DegenerateInput& e) {
        err << "error: instance violates nondegeneracy: " << e.what() << '\n';
        return 1;
    } catch (const CLI::ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}

}  // namespace sqz
