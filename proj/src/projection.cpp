#include "sqz/projection.hpp"

#include <algorithm>
#include <cmath>

namespace sqz {

namespace {

constexpr double kIdentityTol = 1e-8;

Matrix orthonormal_range(const Matrix& cols, Index rank, const char* what) {
    Eigen::ColPivHouseholderQR<Matrix> qr(cols);
    const auto diag = qr.matrixR().diagonal().cwiseAbs();
    const double top = diag.size() ? diag[0] : 0.0;
    if (qr.rank() < rank || top == 0.0 || diag[rank - 1] < 1e-12 * top)
        throw NumericalError(std::string(what) + " is rank deficient");
    Matrix Q = qr.householderQ() * Matrix::Identity(cols.rows(), rank);
    return Q;
}

Matrix symmetric_projector(const Matrix& Q) {
    Matrix P = Q * Q.transpose();
    return 0.5 * (P + P.transpose());
}

void check_core(const ProjectionCore& core) {
    const IdentityReport rep = verify_identities(core);
    if (rep.max() > kIdentityTol)
        throw NumericalError("projection identities violated by " + std::to_string(rep.max()));
    for (Index i = 0; i < core.omega.size(); ++i)
        if (!(core.omega[i] > 0.0 && core.omega[i] < 1.0))
            throw NumericalError("diagonal entry " + std::to_string(i + 1) + " of P outside (0,1)");
}

}  // namespace

Matrix compute_Pbar(const Matrix& G) {
    if (G.cols() != 2 * (G.rows() - 1) + 1) throw ContractError("G must be (r+1) x (2r+1)");
    try {
        return symmetric_projector(orthonormal_range(G.transpose(), G.rows(), "G"));
    } catch (const NumericalError&) {
        throw DegenerateInput("G does not have full row rank");
    }
}

ProjectionCore core_from_P(Matrix P) {
    ProjectionCore core;
    core.phi = P.rowwise().sum();
    core.omega = P.diagonal();
    core.P = std::move(P);
    return core;
}

ProjectionCore compute_P(const Matrix& Pbar) {
    const Index s = Pbar.rows() - 1;
    if (Pbar.cols() != s + 1 || s % 2 != 0) throw ContractError("Pbar must be s x s with s odd");
    const double pss = Pbar(s, s);
    if (pss <= 1e-12) throw DegenerateInput("pbar_ss vanishes (b = c = 0)");
    Matrix P = Pbar.topLeftCorner(s, s) - Pbar.topRightCorner(s, 1) * Pbar.bottomLeftCorner(1, s) / pss;
    ProjectionCore core = core_from_P(0.5 * (P + P.transpose()));
    core.Pbar = Pbar;
    check_core(core);
    return core;
}

ProjectionCore compute_P_block(const LpInstance& inst) {
    validate(inst);
    const Index n = inst.n(), m = inst.m(), r = n + m;
    const Matrix& A = inst.A;

    Matrix Minv = Matrix::Zero(r, r);
    Minv.topLeftCorner(n, n) = (Matrix::Identity(n, n) + A.transpose() * A).llt().solve(Matrix::Identity(n, n));
    Minv.bottomRightCorner(m, m) = (Matrix::Identity(m, m) + A * A.transpose()).llt().solve(Matrix::Identity(m, m));

    Vector gdot(r);
    gdot << inst.c, -inst.b;
    Vector ghat(r);
    ghat << A.transpose() * inst.b, A * inst.c;
    const double tail = inst.c.squaredNorm() + inst.b.squaredNorm();

    const Vector Mg = Minv * gdot;
    const double omega_dot = gdot.dot(Mg);
    if (omega_dot <= 1e-12) throw DegenerateInput("omega_s vanishes (b = c = 0)");
    const Matrix K = Minv - Mg * Mg.transpose() / omega_dot;
    const Vector Kg = K * ghat;
    const double d = tail - ghat.dot(Kg);
    if (d <= 1e-12) throw NumericalError("limit Schur complement vanishes");

    Matrix Minf(r + 1, r + 1);
    Minf.topLeftCorner(r, r) = K + Kg * Kg.transpose() / d;
    Minf.topRightCorner(r, 1) = -Kg / d;
    Minf.bottomLeftCorner(1, r) = -Kg.transpose() / d;
    Minf(r, r) = 1.0 / d;

    const Matrix Gc = build_G(inst).leftCols(2 * r);
    Matrix P = Gc.transpose() * Minf * Gc;
    ProjectionCore core = core_from_P(0.5 * (P + P.transpose()));
    check_core(core);
    return core;
}

ProjectionCore base_projection(const LpInstance& inst) { return compute_P(compute_Pbar(build_G(inst))); }

HFactor choose_H(const ProjectionCore& core) {
    const Matrix& P = core.P;
    const Index dim = P.rows(), r = dim / 2;
    // Pivoted Cholesky of P = P P': the residual diagonal is the squared
    // distance of each row from the span of rows already taken.
    Matrix L = Matrix::Zero(dim, r);
    Vector d = P.diagonal();
    const double top = d.maxCoeff();
    HFactor h;
    for (Index k = 0; k < r; ++k) {
        Index piv = 0;
        const double best = d.maxCoeff(&piv);
        if (!(best > 1e-10 * top)) throw NumericalError("P has fewer than r independent rows");
        h.rows.push_back(piv);
        const double root = std::sqrt(best);
        Vector col = P.col(piv);
        if (k > 0) col -= L.leftCols(k) * L.row(piv).transpose();
        L.col(k) = col / root;
        d -= L.col(k).cwiseAbs2();
        for (Index q : h.rows) d[q] = 0.0;
    }
    h.H.resize(r, dim);
    for (Index k = 0; k < r; ++k) h.H.row(k) = P.row(h.rows[k]);
    return h;
}

Matrix projector_from_H(const Matrix& H) { return symmetric_projector(orthonormal_range(H.transpose(), H.rows(), "H")); }

double t_component(const Vector& z, const Matrix& Pbar) {
    const Index s = Pbar.rows() - 1;
    if (z.size() != s) throw ContractError("z must have 2r entries");
    return -Pbar.row(s).head(s).dot(z) / Pbar(s, s);
}

double IdentityReport::max() const {
    return std::max({symmetry, idempotence, trace, block, antisymmetry, pair_zero, omega_sum, phi_sum, cross, sphere,
                     membership});
}

IdentityReport verify_identities(const ProjectionCore& core) {
    const Matrix& P = core.P;
    const Index dim = P.rows(), r = dim / 2;
    if (P.cols() != dim || dim % 2 != 0) throw ContractError("P must be square of even order");
    IdentityReport rep;
    const double scale = std::max(P.cwiseAbs().maxCoeff(), 1e-300);
    rep.symmetry = (P - P.transpose()).cwiseAbs().maxCoeff();
    rep.idempotence = (P * P - P).cwiseAbs().maxCoeff() / scale;
    rep.trace = std::abs(P.trace() - static_cast<double>(r));

    const auto Pbb = P.topLeftCorner(r, r);
    const auto Ppp = P.bottomRightCorner(r, r);
    rep.block = (Pbb + Ppp - Matrix::Identity(r, r)).cwiseAbs().maxCoeff();
    rep.antisymmetry = (P.topRightCorner(r, r) + P.bottomLeftCorner(r, r)).cwiseAbs().maxCoeff();
    rep.pair_zero = P.topRightCorner(r, r).diagonal().cwiseAbs().maxCoeff();

    const Vector omega = P.diagonal();
    const Vector phi = P.rowwise().sum();
    rep.omega_sum = ((omega.head(r) + omega.tail(r)).array() - 1.0).abs().maxCoeff();
    rep.phi_sum = ((phi.head(r) + phi.tail(r)).array() - 1.0).abs().maxCoeff();
    rep.cross = (P.leftCols(r).cwiseProduct(P.rightCols(r))).rowwise().sum().cwiseAbs().maxCoeff();

    const Vector q = Vector::Ones(dim) - phi;
    rep.sphere = std::abs(q.squaredNorm() - static_cast<double>(r));
    rep.membership = (P * q).norm() / std::sqrt(static_cast<double>(dim));
    if (core.phi.size() == dim)
        rep.phi_sum = std::max(rep.phi_sum, (core.phi - phi).cwiseAbs().maxCoeff());
    if (core.omega.size() == dim)
        rep.omega_sum = std::max(rep.omega_sum, (core.omega - omega).cwiseAbs().maxCoeff());
    return rep;
}

}  // namespace sqz
