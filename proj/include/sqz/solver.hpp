#pragma once

#include "sqz/model.hpp"
#include "sqz/projection.hpp"
#include "sqz/squeeze.hpp"

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace sqz {

enum class SelectRule {
    // Oldest negative entry of the chronology, ties by most negative phi.
    Chronological,
    // Index whose limit squeeze leaves the most chronology entries nonnegative.
    LimitCount,
};

struct SolverConfig {
    double delta_high = 100.0;
    double delta_low = 5.0;
    std::optional<Index> delta_switch_iteration;  // default r
    std::optional<double> epsilon;                // default 1/sqrt(16 r)
    std::optional<Index> max_iterations;          // default 8 r
    SelectRule select_rule = SelectRule::Chronological;
    Index drift_interval = 10;  // 0 disables the periodic recompute
    double drift_tolerance = 1e-9;
    double sign_tolerance = 1e-10;
    double sigma_min = 1e-8;
    double sigma_max = 1e8;

    Index switch_for(Index r) const { return delta_switch_iteration.value_or(r); }
    double epsilon_for(Index r) const;
    Index max_iterations_for(Index r) const { return max_iterations.value_or(8 * r); }
    void validate(Index r) const;
};

struct IterationRecord {
    Index k = 0;
    std::optional<Index> j;  // squeeze index (0-based); empty for the initial row
    double sigma_j = 1.0;
    double delta = 0.0;
    bool peak_shaving = false;
    double sum_omega_gamma = 0.0;
    std::vector<Index> gamma;  // 0-based
    bool tie = false;
    Vector phi;
    Vector omega;
};

struct SolverState {
    LpInstance inst;
    ProjectionCore core;
    SqueezeVector sigma;
    Vector chronology;
    std::vector<Index> step2_count;  // per pair
    Index k = 0;
    Index updates_since_refresh = 0;
    std::vector<IterationRecord> trace;
    std::vector<std::string> events;
};

struct Optimal {
    Vector z;
    ComplementarySet alpha;
    double objective = 0.0;
};
struct Infeasible {};
struct Flagged {
    std::string reason;
};
using Outcome = std::variant<Optimal, Infeasible, Flagged>;

struct SolveResult {
    Outcome outcome;
    Index iterations = 0;
    std::vector<IterationRecord> trace;
    std::vector<std::string> events;
};

std::string status_name(const Outcome& o);

SolverState init(const LpInstance& inst, const SolverConfig& cfg);
// Chronology after a squeeze of lambda on pair j, evaluated on the state
// before the squeeze is applied.
Vector update_chronology(const SolverState& state, Index j, double lambda, const SolverConfig& cfg = {});
std::optional<Index> select_index(SolverState& state, const SolverConfig& cfg);
// One squeeze on j. sigma overrides kappa (and the magnitude floors).
void iterate(SolverState& state, const SolverConfig& cfg, Index j, std::optional<double> sigma = std::nullopt);

struct TerminationResult {
    std::vector<Index> gamma;
    double sum_omega_gamma = 0.0;
    bool tie = false;
    bool from_gamma = false;  // candidate came from the gamma test
    std::vector<ComplementarySet> candidates;
};

// gamma = {i : phi_i > omega_i}. With decide_eta, the omega-majority set
// and its neighbours are added when the gamma test fails.
TerminationResult termination_check(const SolverState& state, const SolverConfig& cfg, bool decide_eta = false);
std::vector<ComplementarySet> eta_candidates(const ProjectionCore& core, double epsilon, double sign_tol);

Outcome finalize(const LpInstance& inst, const std::vector<ComplementarySet>& candidates);

// Looks for a Farkas ray by solving a bounded auxiliary LP. Returns a
// description of the verified ray, or nothing when none was found.
std::optional<std::string> certify_infeasible(const LpInstance& inst);

SolveResult solve(const LpInstance& inst, const SolverConfig& cfg = {});

}  // namespace sqz
