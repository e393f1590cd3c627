#include "sqz/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <random>

namespace sqz {

namespace {

bool nonnegative(const Vector& z) { return z.minCoeff() >= -1e-9 * (1.0 + z.cwiseAbs().maxCoeff()); }

// Is {x >= 0 : Mx = rhs} nonempty? Tries every square basis of M.
bool has_basic_feasible(const Matrix& M, const Vector& rhs) {
    const Index rows = M.rows(), cols = M.cols();
    const std::uint64_t limit = std::uint64_t{1} << cols;
    for (std::uint64_t mask = 0; mask < limit; ++mask) {
        if (std::popcount(mask) != rows) continue;
        Matrix B(rows, rows);
        Index k = 0;
        for (Index j = 0; j < cols; ++j)
            if (mask >> j & 1) B.col(k++) = M.col(j);
        Eigen::FullPivLU<Matrix> lu(B);
        const double scale = B.cwiseAbs().maxCoeff();
        if (lu.matrixLU().diagonal().cwiseAbs().minCoeff() < 1e-10 * scale) continue;
        if (nonnegative(lu.solve(rhs))) return true;
    }
    return false;
}

}  // namespace

OracleOutcome enumerate_optimal(const LpInstance& inst) {
    validate(inst);
    const Index n = inst.n(), m = inst.m(), r = n + m;
    if (r > kOracleMaxR) throw ContractError("oracle enumeration budget exceeded (r > 16)");
    const Matrix G = build_G(inst);

    std::vector<std::pair<Vector, ComplementarySet>> feasible;
    std::vector<Index> members(r);
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << r); ++mask) {
        for (Index k = 0; k < r; ++k) members[k] = (mask >> k & 1) ? k + r : k;
        ComplementarySet set(r, members);
        auto z = assemble_candidate_solution(G, set);
        if (z && nonnegative(*z)) feasible.emplace_back(z->cwiseMax(0.0), std::move(set));
    }

    OracleOutcome out;
    if (feasible.empty()) {
        Matrix primal(m, r);
        primal << inst.A, Matrix::Identity(m, m);
        Matrix dual(n, r);
        dual << inst.A.transpose(), -Matrix::Identity(n, n);
        const bool p = has_basic_feasible(primal, inst.b);
        const bool d = has_basic_feasible(dual, inst.c);
        if (p && d) throw NumericalError("oracle found feasible primal and dual but no complementary basis");
        out.status = p ? OracleStatus::Unbounded : OracleStatus::Infeasible;
        return out;
    }

    auto objective = [&](const Vector& z) { return inst.c.dot(x_part(inst, z)); };
    std::size_t best = 0;
    for (std::size_t k = 1; k < feasible.size(); ++k)
        if (objective(feasible[k].first) > objective(feasible[best].first)) best = k;

    OracleResult res;
    res.z_star = feasible[best].first;
    res.alpha = feasible[best].second;
    res.objective = objective(res.z_star);
    const double scale = 1.0 + res.z_star.cwiseAbs().maxCoeff();
    res.unique = std::all_of(feasible.begin(), feasible.end(), [&](const auto& f) {
        return (f.first - res.z_star).cwiseAbs().maxCoeff() <= 1e-7 * scale;
    });
    const Index positive = (res.z_star.array() > 1e-9 * scale).count();
    res.nondegenerate = positive == r;
    out.status = OracleStatus::Optimal;
    out.result = std::move(res);
    return out;
}

double KktReport::max() const { return std::max({dual, primal, negativity, complementarity, gap}); }

KktReport kkt_check(const LpInstance& inst, const Vector& z, double tol) {
    const Index n = inst.n(), m = inst.m(), r = n + m;
    if (z.size() != 2 * r) throw ContractError("z must have 2r entries");
    const Vector u = z.head(n), v = z.segment(n, m), x = z.segment(r, n), y = z.segment(r + n, m);
    KktReport rep;
    rep.dual = (u - (inst.A.transpose() * y - inst.c)).cwiseAbs().maxCoeff();
    rep.primal = (v - (inst.b - inst.A * x)).cwiseAbs().maxCoeff();
    rep.negativity = std::max(0.0, -z.minCoeff());
    rep.complementarity = z.head(r).cwiseProduct(z.tail(r)).cwiseAbs().maxCoeff();
    rep.gap = std::abs(inst.c.dot(x) - inst.b.dot(y));
    rep.pass = rep.max() <= tol;
    return rep;
}

namespace {

using Rng = std::mt19937_64;

Matrix random_A(Index m, Index n, Rng& rng) {
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (;;) {
        Matrix A(m, n);
        for (Index i = 0; i < m; ++i)
            for (Index j = 0; j < n; ++j) A(i, j) = unit(rng);
        const bool rows_ok = (A.rowwise().lpNorm<Eigen::Infinity>().array() > 0.0).all();
        const bool cols_ok = (A.colwise().lpNorm<Eigen::Infinity>().array() > 0.0).all();
        if (rows_ok && cols_ok) return A;
    }
}

std::vector<Index> random_subset(Index size, Index count, Rng& rng) {
    std::vector<Index> all(size);
    std::iota(all.begin(), all.end(), Index{0});
    std::shuffle(all.begin(), all.end(), rng);
    all.resize(count);
    std::sort(all.begin(), all.end());
    return all;
}

}  // namespace

PlantedInstance generate_instance(Index n, Index m, std::uint64_t seed, const GeneratorOptions& opt) {
    if (m < 1 || n < m) throw ContractError("generator needs n >= m >= 1");
    if (opt.support_size && (*opt.support_size < 0 || *opt.support_size > m))
        throw ContractError("support size must lie in [0, m]");
    if (!(opt.low > 0.0) || !(opt.high >= opt.low)) throw ContractError("invalid value range");
    const Index r = n + m;
    Rng rng(seed);
    std::uniform_real_distribution<double> val(opt.low, opt.high);

    for (int attempt = 0; attempt < opt.max_attempts; ++attempt) {
        const Matrix A = random_A(m, n, rng);
        Index k = opt.support_size ? *opt.support_size : std::uniform_int_distribution<Index>(0, m)(rng);
        const auto basic = random_subset(n, k, rng);
        const auto active = random_subset(m, k, rng);

        Vector x = Vector::Zero(n), y = Vector::Zero(m), u(n), v(m);
        for (Index j = 0; j < n; ++j) u[j] = val(rng);
        for (Index i = 0; i < m; ++i) v[i] = val(rng);
        for (Index j : basic) {
            x[j] = val(rng);
            u[j] = 0.0;
        }
        for (Index i : active) {
            y[i] = val(rng);
            v[i] = 0.0;
        }

        LpInstance inst{A, A * x + v, A.transpose() * y - u};
        Vector z(2 * r);
        z << u, v, x, y;
        std::vector<Index> alpha;
        for (Index i = 0; i < r; ++i) alpha.push_back(z[i] > 0.0 ? i : i + r);
        ComplementarySet set(r, alpha);

        const auto check = assemble_candidate_solution(inst, set);
        if (!check || (*check - z).cwiseAbs().maxCoeff() > 1e-8 * (1.0 + z.cwiseAbs().maxCoeff())) continue;

        OracleResult truth;
        truth.z_star = z;
        truth.alpha = set;
        truth.objective = inst.c.dot(x);
        truth.unique = true;
        truth.nondegenerate = true;
        return PlantedInstance{std::move(inst), std::move(truth)};
    }
    throw std::runtime_error("generator rejection limit reached; try another seed");
}

LpInstance generate_infeasible(Index n, Index m, std::uint64_t seed) {
    if (m < 1 || n < m) throw ContractError("generator needs n >= m >= 1");
    Rng rng(seed);
    std::uniform_real_distribution<double> data(-10.0, 10.0);
    std::uniform_real_distribution<double> mag(0.1, 1.0);
    std::uniform_real_distribution<double> val(0.1, 10.0);
    LpInstance inst;
    inst.A = random_A(m, n, rng);
    inst.b.resize(m);
    inst.c.resize(n);
    for (Index i = 0; i < m; ++i) inst.b[i] = data(rng);
    for (Index j = 0; j < n; ++j) inst.c[j] = data(rng);
    if (seed % 2 == 0) {
        const Index row = std::uniform_int_distribution<Index>(0, m - 1)(rng);
        for (Index j = 0; j < n; ++j) inst.A(row, j) = mag(rng);
        inst.b[row] = -val(rng);
    } else {
        const Index col = std::uniform_int_distribution<Index>(0, n - 1)(rng);
        for (Index i = 0; i < m; ++i) inst.A(i, col) = -mag(rng);
        inst.c[col] = val(rng);
    }
    validate(inst);
    return inst;
}

DecouplingDiagnostics decoupling_diagnostics(const ProjectionCore& core, const OracleResult& truth) {
    if (!truth.unique) throw ContractError("decoupling diagnostics need a unique optimum");
    const Index r = core.r();
    const ComplementarySet& alpha = truth.alpha;
    if (alpha.r() != r || truth.z_star.size() != 2 * r) throw ContractError("truth does not match projection");

    DecouplingDiagnostics d;
    const Vector& z = truth.z_star;
    d.z_dot = Vector::Zero(2 * r);
    for (Index i : alpha.members()) d.z_dot[i] = z[i];
    d.z_dot *= z.sum() / d.z_dot.squaredNorm();
    const double zz = d.z_dot.squaredNorm();

    d.P_hat = Matrix::Zero(2 * r, 2 * r);
    for (Index i : alpha.members()) {
        const Index ip = pair_index(r, i);
        for (Index k : alpha.members()) {
            const Index kp = pair_index(r, k);
            const double w = d.z_dot[i] * d.z_dot[k] / zz;
            d.P_hat(i, k) = (i == k ? 1.0 : 0.0) - w;
            d.P_hat(ip, kp) = w;
        }
    }
    d.omega_hat = d.P_hat.diagonal();
    d.phi_hat = d.P_hat.rowwise().sum();
    d.alpha_prime = alpha.complement().members();
    d.f.resize(static_cast<Index>(d.alpha_prime.size()));
    for (std::size_t q = 0; q < d.alpha_prime.size(); ++q) {
        bool ok = true;
        d.f[static_cast<Index>(q)] = f_value(core.P, d, alpha, d.alpha_prime[q], &ok);
        d.reliable.push_back(ok);
    }
    return d;
}

double f_value(const Matrix& P, const DecouplingDiagnostics& diag, const ComplementarySet& alpha, Index i,
               bool* reliable) {
    const Index r = alpha.r();
    const Index ip = pair_index(r, i);
    if (!alpha.contains(ip)) throw ContractError("f_i is defined for i in alpha'");
    std::vector<Index> pi;
    for (Index k : alpha.members())
        if (k != ip) pi.push_back(k);
    const Index q = static_cast<Index>(pi.size());

    Vector mu = -diag.P_hat.col(i);
    mu[i] += 1.0;
    Matrix Ppp(q, q), Pp(q, P.cols());
    for (Index a = 0; a < q; ++a) {
        Pp.row(a) = P.row(pi[a]);
        for (Index b = 0; b < q; ++b) Ppp(a, b) = P(pi[a], pi[b]);
    }
    Eigen::JacobiSVD<Matrix> svd(Ppp);
    const auto sv = svd.singularValues();
    const double smin = sv[q - 1];
    if (!(smin > 0.0)) throw NumericalError("P restricted to alpha minus i' is singular");
    if (reliable) *reliable = sv[0] / smin <= 1e12;
    const Vector w = Ppp.fullPivLu().solve(Pp * mu);
    return w.norm() / mu.norm();
}

ProjectionCore decoupling_path(const HFactor& h, const ComplementarySet& alpha, double t) {
    return p_sigma_full(h, SqueezeVector::on_set(alpha, t));
}

constexpr double kFZero = 1e-10;

FScalingReport f_scaling_check(const ProjectionCore& base, const OracleResult& truth, double t) {
    if (!(t > 0.0)) throw ContractError("t must be positive");
    const DecouplingDiagnostics diag = decoupling_diagnostics(base, truth);
    const ProjectionCore Pt = decoupling_path(choose_H(base), truth.alpha, t);
    const Index r = base.r();
    FScalingReport rep;
    for (std::size_t q = 0; q < diag.alpha_prime.size(); ++q) {
        const Index i = diag.alpha_prime[q];
        const double f0 = diag.f[static_cast<Index>(q)];
        const double ft = f_value(Pt.P, diag, truth.alpha, i);
        rep.f_base.push_back(f0);
        rep.f_t.push_back(ft);
        // f_i at roundoff level has no meaningful relative error; it must stay there.
        if (f0 >= kFZero)
            rep.max_relative_error = std::max(rep.max_relative_error, std::abs(ft * t * t - f0) / f0);
        else if (ft >= kFZero)
            rep.max_relative_error = kInfinity;

        bool bound = f0 < std::sqrt(static_cast<double>(r));
        const Index ip = pair_index(r, i);
        for (Index j : truth.alpha.members())
            if (j != ip && f0 < std::sqrt(r / base.omega[j])) bound = true;
        rep.bound_holds = rep.bound_holds && bound;
    }
    return rep;
}

bool epsilon_decoupling_check(const ProjectionCore& core, const DecouplingDiagnostics& diag, double eps) {
    for (Index i : diag.alpha_prime) {
        const double gap = core.omega[i] - diag.omega_hat[i];
        if (gap < -1e-12 || gap >= (1.0 - diag.omega_hat[i]) * eps * eps) return false;
    }
    return true;
}

}  // namespace sqz
