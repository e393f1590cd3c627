#include "sqz/solver.hpp"

#include "sqz/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sqz {

double SolverConfig::epsilon_for(Index r) const {
    return epsilon.value_or(1.0 / std::sqrt(16.0 * static_cast<double>(r)));
}

void SolverConfig::validate(Index r) const {
    if (!(delta_high > 1.0) || !(delta_low > 1.0)) throw ContractError("delta values must exceed 1");
    const double eps = epsilon_for(r);
    if (!(eps > 0.0) || eps > 1.0 / std::sqrt(10.0 * static_cast<double>(r)) + 1e-15)
        throw ContractError("epsilon must lie in (0, 1/sqrt(10 r)]");
    if (max_iterations_for(r) < 0) throw ContractError("max_iterations must be nonnegative");
    if (!(sigma_min > 0.0) || !(sigma_max > sigma_min)) throw ContractError("invalid squeeze cap");
}

std::string status_name(const Outcome& o) {
    if (std::holds_alternative<Optimal>(o)) return "Optimal";
    if (std::holds_alternative<Infeasible>(o)) return "Infeasible";
    return "Flagged";
}

namespace {

IterationRecord make_record(const SolverState& state, const SolverConfig& cfg) {
    const TerminationResult tc = termination_check(state, cfg);
    IterationRecord rec;
    rec.k = state.k;
    rec.gamma = tc.gamma;
    rec.sum_omega_gamma = tc.sum_omega_gamma;
    rec.tie = tc.tie;
    rec.phi = state.core.phi;
    rec.omega = state.core.omega;
    return rec;
}

void refresh_projection(SolverState& state, const SolverConfig& cfg) {
    state.updates_since_refresh = 0;
    std::ostringstream msg;
    msg << "k=" << state.k << ": ";
    try {
        ProjectionCore fresh = base_projection(scaled_instance(state.inst, state.sigma));
        const double diff = (fresh.P - state.core.P).cwiseAbs().maxCoeff();
        if (diff <= cfg.drift_tolerance) return;
        const double fresh_err = verify_identities(fresh).max();
        const double inc_err = verify_identities(state.core).max();
        if (fresh_err <= inc_err) {
            state.core = std::move(fresh);
            msg << "recomputed projection replaced incremental state (drift " << diff << ")";
        } else {
            msg << "kept incremental projection (drift " << diff << ", recompute less accurate)";
        }
    } catch (const std::exception& e) {
        msg << "projection recompute failed: " << e.what();
    }
    state.events.push_back(msg.str());
}

// Member of pair k that goes into a set built from a tie: larger omega.
Index tie_member(const ProjectionCore& core, Index k) {
    const Index kp = k + core.r();
    return core.omega[kp] > core.omega[k] ? kp : k;
}

}  // namespace

SolverState init(const LpInstance& inst, const SolverConfig& cfg) {
    validate(inst);
    const Index r = inst.r();
    cfg.validate(r);
    SolverState state;
    state.inst = inst;
    state.core = base_projection(inst);
    state.sigma = SqueezeVector::ones(r);
    state.chronology.resize(2 * r);
    for (Index i = 0; i < 2 * r; ++i) state.chronology[i] = state.core.phi[i] < -cfg.sign_tolerance ? 1.0 : -1.0;
    state.step2_count.assign(r, 0);
    state.trace.push_back(make_record(state, cfg));
    return state;
}

Vector update_chronology(const SolverState& state, Index j, double lambda, const SolverConfig& cfg) {
    const ProjectionCore& core = state.core;
    const Index dim = core.P.rows();
    const Index jp = pair_index(core.r(), j);
    const double tol = cfg.sign_tolerance;
    const Vector& prev = state.chronology;
    const double top = std::max(prev.maxCoeff(), 0.0);
    const Vector al = a_of_lambda(core, j, lambda, tol);
    const Vector phil = phi_unidim(core, j, lambda);

    auto still_negative = [&](Index i) { return prev[i] >= 1.0 ? prev[i] : top + 1.0; };

    Vector next = prev;
    for (Index i = 0; i < dim; ++i) {
        if (i == j || i == jp) continue;
        if (al[i] >= 1.0)
            next[i] = top + al[i];
        else if (al[i] == -1.0)
            next[i] = -1.0;
        else
            next[i] = still_negative(i);
    }
    if (phil[j] > 0.0 && phil[j] < 1.0) {
        next[j] = next[jp] = -1.0;
    } else {
        for (Index i : {j, jp}) next[i] = phil[i] >= -tol ? -1.0 : still_negative(i);
    }
    return next;
}

std::optional<Index> select_index(SolverState& state, const SolverConfig& cfg) {
    const ProjectionCore& core = state.core;
    const Index dim = core.P.rows();
    const double tol = cfg.sign_tolerance;
    const Vector& a = state.chronology;

    std::vector<Index> cands;
    for (Index i = 0; i < dim; ++i)
        if (a[i] >= 1.0) cands.push_back(i);

    if (cands.empty()) {
        Index best = -1;
        for (Index i = 0; i < dim; ++i)
            if (core.phi[i] < -tol && (best < 0 || core.phi[i] < core.phi[best])) best = i;
        if (best < 0) return std::nullopt;
        state.events.push_back("k=" + std::to_string(state.k) + ": chronology empty while phi_" +
                               std::to_string(best + 1) + " < 0; selecting it directly");
        return best;
    }

    if (cfg.select_rule == SelectRule::Chronological) {
        Index best = cands[0];
        for (Index i : cands) {
            if (a[i] < a[best] || (a[i] == a[best] && core.phi[i] < core.phi[best])) best = i;
        }
        return best;
    }

    std::vector<Index> count(dim, -1);
    for (Index i : cands) {
        Vector lp;
        try {
            lp = limit_phi(core, i);
        } catch (const NumericalError&) {
            continue;
        }
        Index c = 0;
        for (Index l : cands)
            if (l != i && lp[l] >= -tol) ++c;
        count[i] = c;
    }
    const bool early = state.k + 1 <= core.r();
    Index best = cands[0];
    for (Index i : cands) {
        if (count[i] > count[best]) {
            best = i;
        } else if (count[i] == count[best]) {
            const bool better = early ? core.omega[i] < core.omega[best] : a[i] < a[best];
            if (better) best = i;
        }
    }
    return best;
}

void iterate(SolverState& state, const SolverConfig& cfg, Index j, std::optional<double> sigma) {
    const Index r = state.inst.r();
    const Index jp = pair_index(r, j);
    const Index k = state.k + 1;
    const bool step2 = k > cfg.switch_for(r);
    const double delta = step2 ? cfg.delta_low : cfg.delta_high;

    double s = 0.0;
    if (sigma) {
        s = *sigma;
    } else {
        s = kappa(delta, state.core.omega[j], r);
        if (step2) {
            const Index c = ++state.step2_count[j % r];
            if (c == 1)
                s = std::max(s, std::sqrt(2.0 * r));
            else if (c == 2)
                s = std::max(s, std::pow(4.0 * r, 0.25));
        }
    }

    const bool peak = state.sigma[jp] > 1.0;
    const double cumulative = std::abs(state.sigma[j] * s);
    if (cumulative < cfg.sigma_min || cumulative > cfg.sigma_max)
        throw NumericalError("cumulative squeeze on index " + std::to_string(j + 1) + " left [" +
                             std::to_string(cfg.sigma_min) + ", " + std::to_string(cfg.sigma_max) + "]");

    if (s > 1.0) state.chronology = update_chronology(state, j, s, cfg);
    unidim_update_inplace(state.core, j, s);
    state.sigma.apply(j, s);
    state.k = k;
    if (cfg.drift_interval > 0 && ++state.updates_since_refresh >= cfg.drift_interval) refresh_projection(state, cfg);

    IterationRecord rec = make_record(state, cfg);
    rec.j = j;
    rec.sigma_j = s;
    rec.delta = delta;
    rec.peak_shaving = peak;
    state.trace.push_back(std::move(rec));
}

std::vector<ComplementarySet> eta_candidates(const ProjectionCore& core, double epsilon, double sign_tol) {
    const Index r = core.r();
    const double eps2 = epsilon * epsilon;
    std::vector<Index> eta;
    for (Index k = 0; k < r; ++k) {
        const Index kp = k + r;
        Index pick;
        if (core.omega[k] - 0.5 > eps2)
            pick = k;
        else if (core.omega[kp] - 0.5 > eps2)
            pick = kp;
        else if (core.phi[k] < core.omega[k] - sign_tol)
            pick = k;
        else if (core.phi[kp] < core.omega[kp] - sign_tol)
            pick = kp;
        else
            pick = tie_member(core, k);
        eta.push_back(pick);
    }
    ComplementarySet base(r, eta);

    std::vector<ComplementarySet> out{base};
    std::vector<char> used(r, 0);
    const double cap = 1.0 - (2.0 * r + 1.0) * eps2;
    for (Index i : base.members()) {
        if (core.phi[i] > core.omega[i] + sign_tol && core.omega[i] <= cap) {
            out.push_back(base.flipped(i % r));
            used[i % r] = 1;
        }
    }
    for (Index k = 0; k < r; ++k)
        if (!used[k]) out.push_back(base.flipped(k));
    return out;
}

TerminationResult termination_check(const SolverState& state, const SolverConfig& cfg, bool decide_eta) {
    const ProjectionCore& core = state.core;
    const Index r = core.r();
    const double tol = cfg.sign_tolerance;
    const double eps = cfg.epsilon_for(r);
    TerminationResult out;
    for (Index i = 0; i < 2 * r; ++i) {
        const double d = core.phi[i] - core.omega[i];
        if (d > tol) {
            out.gamma.push_back(i);
            out.sum_omega_gamma += core.omega[i];
        } else if (std::abs(d) <= tol) {
            out.tie = true;
        }
    }
    if (out.sum_omega_gamma <= 1.0 + r * eps * eps) {
        std::vector<Index> alpha;
        for (Index k = 0; k < r; ++k) {
            const bool k_in = std::binary_search(out.gamma.begin(), out.gamma.end(), k);
            const bool kp_in = std::binary_search(out.gamma.begin(), out.gamma.end(), k + r);
            if (k_in)
                alpha.push_back(k + r);
            else if (kp_in)
                alpha.push_back(k);
            else
                alpha.push_back(tie_member(core, k));
        }
        out.from_gamma = true;
        out.candidates.emplace_back(r, std::move(alpha));
    } else if (decide_eta) {
        out.candidates = eta_candidates(core, eps, tol);
    }
    return out;
}

Outcome finalize(const LpInstance& inst, const std::vector<ComplementarySet>& candidates) {
    if (candidates.empty()) throw ContractError("finalize needs at least one candidate");
    bool any_solvable = false;
    for (const auto& cand : candidates) {
        const auto z = assemble_candidate_solution(inst, cand);
        if (!z) continue;
        any_solvable = true;
        if (z->minCoeff() < -1e-8) continue;
        Vector zc = z->cwiseMax(0.0);
        if (!kkt_check(inst, zc, 1e-6).pass) continue;
        const double objective = inst.c.dot(x_part(inst, zc));
        return Optimal{std::move(zc), cand, objective};
    }
    if (any_solvable) return Infeasible{};
    return Flagged{"degenerate: every candidate system is singular"};
}

namespace {

std::vector<ComplementarySet> merge(std::vector<ComplementarySet> first, const std::vector<ComplementarySet>& rest) {
    for (const auto& c : rest)
        if (std::find(first.begin(), first.end(), c) == first.end()) first.push_back(c);
    return first;
}

SolveResult r2_shortcut(const SolverState& state, const SolverConfig& cfg) {
    const ProjectionCore& core = state.core;
    std::vector<Index> alpha;
    for (Index k = 0; k < 2; ++k) {
        if (core.phi[k] < core.omega[k] - cfg.sign_tolerance)
            alpha.push_back(k);
        else if (core.phi[k + 2] < core.omega[k + 2] - cfg.sign_tolerance)
            alpha.push_back(k + 2);
        else
            alpha.push_back(tie_member(core, k));
    }
    ComplementarySet set(2, alpha);
    std::vector<ComplementarySet> cands{set};
    for (auto& nb : set.neighbors()) cands.push_back(nb);
    return SolveResult{finalize(state.inst, cands), 0, state.trace, state.events};
}

SolveResult solve_impl(const LpInstance& inst, const SolverConfig& cfg, bool certify);

double max_entry(const Matrix& M) { return M.size() == 0 ? 0.0 : M.cwiseAbs().maxCoeff(); }

// y >= 0, A'y >= 0, b'y < 0: the primal feasible set is empty.
bool primal_ray(const LpInstance& inst, const Vector& y) {
    const double norm = y.lpNorm<1>();
    if (norm <= 0.0 || y.minCoeff() < -1e-12 * norm) return false;
    const Vector yc = y.cwiseMax(0.0);
    return (inst.A.transpose() * yc).minCoeff() >= -1e-9 * norm * max_entry(inst.A) &&
           inst.b.dot(yc) < -1e-7 * norm * max_entry(inst.b);
}

// x >= 0, Ax <= 0, c'x > 0: the dual feasible set is empty.
bool dual_ray(const LpInstance& inst, const Vector& x) {
    const double norm = x.lpNorm<1>();
    if (norm <= 0.0 || x.minCoeff() < -1e-12 * norm) return false;
    const Vector xc = x.cwiseMax(0.0);
    return (inst.A * xc).maxCoeff() <= 1e-9 * norm * max_entry(inst.A) &&
           inst.c.dot(xc) > 1e-7 * norm * max_entry(inst.c);
}

const Optimal* aux_optimum(const SolveResult& res) { return std::get_if<Optimal>(&res.outcome); }

}  // namespace

std::optional<std::string> certify_infeasible(const LpInstance& inst) {
    const Index n = inst.n(), m = inst.m();
    const Vector ones_m = Vector::Ones(m);
    try {
        // max -w  s.t.  Ax - w e <= b: its multipliers form a primal ray when w* > 0.
        if (!(inst.b.array() >= 0.0).all()) {
            Matrix A(m, n + 1);
            A << inst.A, -ones_m;
            Vector c = Vector::Zero(n + 1);
            c[n] = -1.0;
            const LpInstance aux{A, inst.b, c};
            const auto res = solve_impl(aux, SolverConfig{}, false);
            if (const auto* opt = aux_optimum(res); opt && primal_ray(inst, y_part(aux, opt->z)))
                return "primal infeasible: ray y >= 0 with A'y >= 0, b'y < 0";
        }
        if (!(inst.c.array() <= 0.0).all()) {
            Vector x;
            if (n > m) {
                // max c'x  s.t.  Ax <= 0, e'x <= 1.
                Matrix A(m + 1, n);
                A << inst.A, Vector::Ones(n).transpose();
                Vector b = Vector::Zero(m + 1);
                b[m] = 1.0;
                const LpInstance aux{A, b, inst.c};
                const auto res = solve_impl(aux, SolverConfig{}, false);
                if (const auto* opt = aux_optimum(res)) x = x_part(aux, opt->z);
            } else {
                // max -v  s.t.  -A'y - v e <= -c: its multipliers are the candidate ray.
                Matrix A(n, m + 1);
                A << -inst.A.transpose(), -Vector::Ones(n);
                Vector c = Vector::Zero(m + 1);
                c[m] = -1.0;
                const LpInstance aux{A, -inst.c, c};
                const auto res = solve_impl(aux, SolverConfig{}, false);
                if (const auto* opt = aux_optimum(res)) x = y_part(aux, opt->z);
            }
            if (x.size() == n && dual_ray(inst, x)) return "dual infeasible: ray x >= 0 with Ax <= 0, c'x > 0";
        }
    } catch (const ContractError&) {
    } catch (const DegenerateInput&) {
    }
    return std::nullopt;
}

SolveResult solve(const LpInstance& inst, const SolverConfig& cfg) { return solve_impl(inst, cfg, true); }

namespace {

SolveResult solve_impl(const LpInstance& inst, const SolverConfig& cfg, bool certify) {
    validate(inst);
    cfg.validate(inst.r());
    SolverState state;
    auto finish = [&](Outcome o) { return SolveResult{std::move(o), state.k, state.trace, state.events}; };
    // Infeasible is only reported with a verified ray behind it.
    auto certified = [&]() -> bool {
        if (!certify) return false;
        const auto why = certify_infeasible(inst);
        if (why) state.events.push_back("k=" + std::to_string(state.k) + ": " + *why);
        return why.has_value();
    };
    try {
        state = init(inst, cfg);
        const Index r = inst.r();
        if (r == 2) {
            SolveResult res = r2_shortcut(state, cfg);
            if (std::holds_alternative<Infeasible>(res.outcome) && !certified())
                res.outcome = Flagged{"sign test failed without an infeasibility certificate"};
            res.events = state.events;
            return res;
        }

        const double eps = cfg.epsilon_for(r);
        const Index max_it = cfg.max_iterations_for(r);
        std::string cap_hit;
        for (;;) {
            const TerminationResult tc = termination_check(state, cfg);
            if (tc.from_gamma) {
                Outcome o = finalize(inst, tc.candidates);
                if (std::holds_alternative<Optimal>(o)) return finish(std::move(o));
                if (std::holds_alternative<Infeasible>(o) && certified()) return finish(Infeasible{});
            }
            if (state.k >= max_it) break;
            const auto j = select_index(state, cfg);
            if (!j) {
                auto cands = merge(tc.candidates, eta_candidates(state.core, eps, cfg.sign_tolerance));
                Outcome o = finalize(inst, cands);
                if (std::holds_alternative<Infeasible>(o) && !certified())
                    o = Flagged{"sign test failed without an infeasibility certificate"};
                return finish(std::move(o));
            }
            try {
                iterate(state, cfg, *j);
            } catch (const NumericalError& e) {
                // A rejected squeeze leaves the projection untouched, so it can still be decided.
                cap_hit = e.what();
                break;
            }
        }

        const TerminationResult tc = termination_check(state, cfg);
        auto cands = merge(tc.candidates, eta_candidates(state.core, eps, cfg.sign_tolerance));
        Outcome o = finalize(inst, cands);
        const std::string why = cap_hit.empty() ? "iteration limit " + std::to_string(max_it) + " reached"
                                                : "k=" + std::to_string(state.k) + ": " + cap_hit;
        state.events.push_back(why + "; last-resort candidates tried");
        if (std::holds_alternative<Optimal>(o)) return finish(std::move(o));
        if (certified()) return finish(Infeasible{});
        return finish(Flagged{cap_hit.empty() ? "iteration limit reached without an optimal candidate"
                                              : "numerical: " + cap_hit});
    } catch (const NumericalError& e) {
        return finish(Flagged{std::string("numerical: ") + e.what()});
    } catch (const DegenerateInput& e) {
        return finish(Flagged{std::string("degenerate: ") + e.what()});
    }
}

}  // namespace

}  // namespace sqz
