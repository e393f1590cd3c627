#include <doctest.h>

#include "helpers.hpp"

using namespace sqz;
using sqz::test::example_lp;
using sqz::test::max_abs;

namespace {

// Best vertex of {x >= 0 : Ax <= b} by brute force over n-subsets of the
// n + m constraint hyperplanes. Returns -inf when no vertex is feasible.
double primal_vertex_optimum(const LpInstance& inst) {
    const Index n = inst.n(), m = inst.m();
    Matrix rows(n + m, n);
    Vector rhs(n + m);
    rows << inst.A, -Matrix::Identity(n, n);
    rhs << inst.b, Vector::Zero(n);
    double best = -std::numeric_limits<double>::infinity();
    const std::uint64_t limit = std::uint64_t{1} << (n + m);
    for (std::uint64_t mask = 0; mask < limit; ++mask) {
        if (std::popcount(mask) != n) continue;
        Matrix B(n, n);
        Vector h(n);
        Index k = 0;
        for (Index i = 0; i < n + m; ++i)
            if (mask >> i & 1) {
                B.row(k) = rows.row(i);
                h[k++] = rhs[i];
            }
        Eigen::FullPivLU<Matrix> lu(B);
        if (lu.rank() < n) continue;
        const Vector x = lu.solve(h);
        if (((rows * x - rhs).array() > 1e-9).any()) continue;
        best = std::max(best, inst.c.dot(x));
    }
    return best;
}

}  // namespace

TEST_CASE("enumerate_optimal on example") {
    const auto out = enumerate_optimal(example_lp());
    REQUIRE(out.status == OracleStatus::Optimal);
    const auto& res = *out.result;
    CHECK(res.alpha == ComplementarySet::from_one_based(3, {1, 5, 6}));
    CHECK(res.objective == doctest::Approx(1.0));
    CHECK(res.unique);
    CHECK(res.nondegenerate);
}

TEST_CASE("enumerate_optimal separates unbounded from infeasible") {
    CHECK(enumerate_optimal(test::unit_instance(-1, -1, 1)).status == OracleStatus::Unbounded);
    // x <= -1 with x >= 0 is empty.
    CHECK(enumerate_optimal(test::unit_instance(1, -1, 1)).status == OracleStatus::Infeasible);
}

TEST_CASE("enumerate_optimal recovers planted optima") {
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        const auto p = test::random_planted(seed);
        const auto out = enumerate_optimal(p.inst);
        REQUIRE(out.status == OracleStatus::Optimal);
        CHECK(out.result->alpha == p.truth.alpha);
        CHECK(max_abs(out.result->z_star - p.truth.z_star) < 1e-7);
    }
}

TEST_CASE("enumerate_optimal agrees with primal vertex search") {
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        const auto p = test::random_planted(seed, 6, 4);
        const auto out = enumerate_optimal(p.inst);
        REQUIRE(out.status == OracleStatus::Optimal);
        CHECK(out.result->objective == doctest::Approx(primal_vertex_optimum(p.inst)).epsilon(1e-8));
    }
}

TEST_CASE("kkt_check") {
    Vector z(6);
    z << 50, 0, 0, 0, 0.5, 0.5;
    const auto good = kkt_check(example_lp(), z, 1e-9);
    CHECK(good.pass);
    CHECK(good.max() < 1e-12);

    z[4] = 0.6;
    const auto bad = kkt_check(example_lp(), z, 1e-9);
    CHECK_FALSE(bad.pass);
    CHECK(bad.primal > 0.1);

    Vector neg = Vector::Zero(6);
    neg[0] = -1.0;
    CHECK(kkt_check(example_lp(), neg, 1e-9).negativity == 1.0);
    CHECK_THROWS_AS(kkt_check(example_lp(), Vector::Zero(5), 1e-9), ContractError);
}

TEST_CASE("generated instances are valid and reproducible") {
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        const auto p = generate_instance(6, 3, seed);
        CHECK_NOTHROW(validate(p.inst));
        CHECK(kkt_check(p.inst, p.truth.z_star, 1e-9).pass);
        CHECK((p.truth.z_star.array() >= 0.0).all());
        for (Index i : p.truth.alpha.members()) CHECK(p.truth.z_star[i] > 0.0);
        const auto again = generate_instance(6, 3, seed);
        CHECK(again.inst.A == p.inst.A);
        CHECK(again.truth.z_star == p.truth.z_star);
    }
    GeneratorOptions opt;
    opt.support_size = 2;
    const auto p = generate_instance(5, 3, 4, opt);
    CHECK((p.truth.z_star.segment(5 + 3, 5).array() > 0.0).count() == 2);
    CHECK_THROWS_AS(generate_instance(2, 3, 1), ContractError);
}

TEST_CASE("generated infeasible instances are never optimal") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto inst = generate_infeasible(4, 3, seed);
        const auto oracle = enumerate_optimal(inst);
        CHECK(oracle.status != OracleStatus::Optimal);
        CHECK(oracle.status == (seed % 2 == 0 ? OracleStatus::Infeasible : OracleStatus::Unbounded));
        const auto res = solve(inst);
        CHECK_FALSE(std::holds_alternative<Optimal>(res.outcome));
    }
}

TEST_CASE("decoupled limit structure") {
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        const auto p = test::random_planted(seed);
        const Index r = p.inst.r();
        const auto core = base_projection(p.inst);
        const auto d = decoupling_diagnostics(core, p.truth);
        const auto& alpha = p.truth.alpha;
        double sa = 0.0, sap = 0.0;
        for (Index i : alpha.members()) sa += d.omega_hat[i];
        for (Index i : d.alpha_prime) sap += d.omega_hat[i];
        CHECK(std::abs(sa - (r - 1)) < 1e-10);
        CHECK(std::abs(sap - 1.0) < 1e-10);
        for (Index i = 0; i < 2 * r; ++i) {
            if (alpha.contains(i)) {
                CHECK(d.phi_hat[i] < d.omega_hat[i]);
                CHECK(std::abs(1.0 - d.phi_hat[i] - d.z_dot[i]) < 1e-10);
            } else {
                CHECK(d.phi_hat[i] > d.omega_hat[i]);
            }
            const double rho = beam(d.phi_hat[i], d.omega_hat[i]);
            CHECK(rho >= 1.0 - 1e-9);
            CHECK(rho <= r - 1 + 1e-9);
        }
        // The decoupled projection is a genuine projection with the same structure.
        CHECK(verify_identities(core_from_P(d.P_hat)).max() < 1e-10);
    }
}

TEST_CASE("example dot q lies on the small sphere") {
    const auto core = base_projection(example_lp());
    const auto truth = *enumerate_optimal(example_lp()).result;
    const auto d = decoupling_diagnostics(core, truth);
    const Vector nu = truth.alpha.indicator();
    Vector phidot = Vector::Zero(6);
    for (Index i : truth.alpha.members()) phidot[i] = core.phi[i];
    const Vector qdot = nu - phidot;
    CHECK(std::abs((d.z_dot - qdot).dot(qdot - nu)) < 1e-10);
    const double caption[3] = {1.019, 0.301, -0.164};
    const auto members = truth.alpha.members();
    for (int k = 0; k < 3; ++k) CHECK(std::abs(qdot[members[k]] - caption[k]) <= 0.0005);
    // dot z is the projection of nu* on z*.
    CHECK(std::abs(d.z_dot.dot(nu - d.z_dot)) < 1e-10);
}

TEST_CASE("omega-majority set is at most one flip from alpha") {
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        const auto p = test::random_planted(seed);
        const Index r = p.inst.r();
        const auto d = decoupling_diagnostics(base_projection(p.inst), p.truth);
        ProjectionCore hat = core_from_P(d.P_hat);
        const auto cands = eta_candidates(hat, 1.0 / std::sqrt(16.0 * r), 1e-12);
        const auto& eta = cands.front();
        Index outside = 0;
        for (Index i : eta.members()) {
            if (!p.truth.alpha.contains(i)) ++outside;
            if (hat.phi[i] > hat.omega[i] + 1e-12) CHECK_FALSE(p.truth.alpha.contains(i));
        }
        CHECK(outside <= 1);
        CHECK(std::find(cands.begin(), cands.end(), p.truth.alpha) != cands.end());
    }
}

TEST_CASE("f scales as 1/t^2 along the decoupling path") {
    int reliable = 0;
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        const auto p = test::random_planted(seed, 6, 4);
        const auto base = base_projection(p.inst);
        const auto d = decoupling_diagnostics(base, p.truth);
        if (!std::all_of(d.reliable.begin(), d.reliable.end(), [](bool b) { return b; })) continue;
        ++reliable;
        const auto rep = f_scaling_check(base, p.truth, 10.0);
        CAPTURE(seed);
        CHECK(rep.max_relative_error < 1e-6);
        for (std::size_t q = 0; q < rep.f_base.size(); ++q)
            if (rep.f_base[q] > 1e-10) CHECK(rep.f_base[q] / rep.f_t[q] == doctest::Approx(100.0).epsilon(1e-6));
    }
    CHECK(reliable > 20);
}

TEST_CASE("f is the length of a vector of L built from the decoupled projection") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto p = test::random_planted(seed, 6, 4);
        const Index r = p.inst.r();
        const auto core = base_projection(p.inst);
        const auto d = decoupling_diagnostics(core, p.truth);
        for (std::size_t q = 0; q < d.alpha_prime.size(); ++q) {
            const Index i = d.alpha_prime[q];
            const Index ip = pair_index(r, i);
            Vector mu = -d.P_hat.col(i);
            mu[i] += 1.0;
            CHECK(std::abs(mu.squaredNorm() - (1.0 - d.omega_hat[i])) < 1e-10);
            std::vector<Index> pi;
            for (Index k : p.truth.alpha.members())
                if (k != ip) pi.push_back(k);
            const Index np = static_cast<Index>(pi.size());
            Matrix Ppp(np, np);
            Vector rhs(np);
            for (Index a = 0; a < np; ++a) {
                rhs[a] = core.P.row(pi[a]).dot(mu);
                for (Index b = 0; b < np; ++b) Ppp(a, b) = core.P(pi[a], pi[b]);
            }
            const Vector zpi = -Ppp.lu().solve(rhs);
            Vector zt = mu;
            for (Index a = 0; a < np; ++a) zt[pi[a]] = zpi[a];
            CHECK((core.P * zt).cwiseAbs().maxCoeff() < 1e-8 * (1.0 + zt.norm()));
            CHECK(zpi.norm() / mu.norm() == doctest::Approx(d.f[static_cast<Index>(q)]).epsilon(1e-8));
        }
    }
}

// The stated bound (f_i < sqrt(r), or f_i < sqrt(r / omega_j) for some j in
// alpha minus i') does not hold on every instance. Seed 4 is a small witness.
TEST_CASE("f bound has a counterexample") {
    const auto p = test::random_planted(4, 6, 4);
    const Index r = p.inst.r();
    REQUIRE(r == 4);
    const auto core = base_projection(p.inst);
    const auto d = decoupling_diagnostics(core, p.truth);
    bool witness = false;
    for (std::size_t q = 0; q < d.alpha_prime.size(); ++q) {
        const Index i = d.alpha_prime[q];
        const double f = d.f[static_cast<Index>(q)];
        double min_omega = 1.0;
        for (Index k : p.truth.alpha.members())
            if (k != pair_index(r, i)) min_omega = std::min(min_omega, core.omega[k]);
        if (f >= std::sqrt(static_cast<double>(r)) && f >= std::sqrt(r / min_omega)) witness = true;
    }
    CHECK(witness);
    CHECK_FALSE(f_scaling_check(core, p.truth, 10.0).bound_holds);
}

TEST_CASE("the decoupling path converges to the decoupled projection") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto p = test::random_planted(seed, 6, 4);
        const Index r = p.inst.r();
        const auto base = base_projection(p.inst);
        const auto h = choose_H(base);
        const auto d = decoupling_diagnostics(base, p.truth);
        double prev = std::numeric_limits<double>::infinity();
        bool reached = false;
        for (double t : {1.0, 3.0, 10.0, 30.0, 100.0, 300.0, 1000.0}) {
            const auto Pt = decoupling_path(h, p.truth.alpha, t);
            const double dist = max_abs(Pt.P - d.P_hat);
            CHECK(dist < prev * (1.0 + 1e-9));
            prev = dist;

            const double eps = 1.0 / std::sqrt(10.0 * r);
            if (!epsilon_decoupling_check(Pt, d, eps)) continue;
            reached = true;
            Vector phidot = Vector::Zero(2 * r);
            for (Index i : p.truth.alpha.members()) phidot[i] = Pt.phi[i];
            const Vector nu = p.truth.alpha.indicator();
            CHECK((nu - phidot - d.z_dot).norm() < std::sqrt(2.0) * r * eps);
            TerminationResult tc;
            double sum = 0.0;
            for (Index i = 0; i < 2 * r; ++i)
                if (Pt.phi[i] > Pt.omega[i]) sum += Pt.omega[i];
            CHECK(sum < 1.0 + r * eps * eps);
            const auto cands = eta_candidates(Pt, eps, 1e-12);
            Index outside = 0;
            for (Index i : cands.front().members())
                if (!p.truth.alpha.contains(i)) ++outside;
            CHECK(outside <= 1);
        }
        CHECK(reached);
    }
}
