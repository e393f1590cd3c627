#include "sqz/squeeze.hpp"

#include <cmath>

namespace sqz {

SqueezeVector::SqueezeVector(Vector sigma) : sigma_(std::move(sigma)) {
    const Index dim = sigma_.size();
    if (dim % 2 != 0 || dim == 0) throw ContractError("squeeze vector needs even positive length");
    const Index r = dim / 2;
    for (Index i = 0; i < r; ++i) {
        if (sigma_[i] == 0.0 || !std::isfinite(sigma_[i]))
            throw ContractError("squeeze entries must be finite and nonzero");
        if (std::abs(sigma_[i] * sigma_[i + r] - 1.0) > 1e-12)
            throw ContractError("squeeze vector violates sigma_i sigma_i' = 1");
    }
}

SqueezeVector SqueezeVector::ones(Index r) { return SqueezeVector(Vector::Ones(2 * r)); }

SqueezeVector SqueezeVector::unidim(Index r, Index j, double s) {
    SqueezeVector v = ones(r);
    v.apply(j, s);
    return v;
}

SqueezeVector SqueezeVector::on_set(const ComplementarySet& set, double t) {
    if (!(t > 0.0)) throw ContractError("scale t must be positive");
    Vector sigma = Vector::Constant(2 * set.r(), 1.0 / t);
    for (Index i : set.members()) sigma[i] = t;
    return SqueezeVector(std::move(sigma));
}

void SqueezeVector::apply(Index j, double s) {
    if (s == 0.0 || !std::isfinite(s)) throw ContractError("squeeze factor must be finite and nonzero");
    const Index jp = pair_index(r(), j);
    sigma_[j] *= s;
    sigma_[jp] = 1.0 / sigma_[j];
}

ProjectionCore p_sigma_full(const HFactor& h, const SqueezeVector& sigma) {
    if (sigma.values().size() != h.H.cols()) throw ContractError("squeeze vector does not match H");
    const Matrix scaled = h.H * sigma.values().asDiagonal();
    return core_from_P(projector_from_H(scaled));
}

double squeeze_denominator(double omega_j, double s) { return 1.0 + (s * s - 1.0) * omega_j; }

double omega_unidim(double omega_j, double s) {
    const double den = squeeze_denominator(omega_j, s);
    if (!(den > 1e-300)) throw NumericalError("singular unidimensional squeeze");
    return s * s * omega_j / den;
}

namespace {

void check_index(const ProjectionCore& core, Index j) {
    if (j < 0 || j >= core.P.rows()) throw ContractError("squeeze index out of range");
}

double checked_denominator(const ProjectionCore& core, Index j, double s, bool allow_zero = false) {
    if ((s == 0.0 && !allow_zero) || !std::isfinite(s)) throw ContractError("squeeze factor must be finite and nonzero");
    const double den = squeeze_denominator(core.P(j, j), s);
    if (!(den > 1e-14) || !std::isfinite(den)) throw NumericalError("singular unidimensional squeeze");
    return den;
}

}  // namespace

Vector phi_unidim(const ProjectionCore& core, Index j, double s) {
    check_index(core, j);
    const Index jp = pair_index(core.r(), j);
    // s = 0 is the singular squeeze; phi still has a finite limit there.
    const double den = checked_denominator(core, j, s, true);
    const double w = core.P(j, j);
    const double phij = core.phi[j];
    const double coef = ((s * s - 1.0) * phij - (s - 1.0)) / den;
    Vector out = core.phi - coef * (core.P.col(j) + core.P.col(jp));
    out[j] = (s * s * w + s * (phij - w)) / den;
    out[jp] = 1.0 - out[j];
    return out;
}

void unidim_update_inplace(ProjectionCore& core, Index j, double s) {
    check_index(core, j);
    if (s == 1.0) return;
    const Index jp = pair_index(core.r(), j);
    const double den = checked_denominator(core, j, s);
    Matrix& P = core.P;
    const Index dim = P.rows();
    const double w = P(j, j);
    const double wp = P(jp, jp);
    const double phij = core.phi[j];
    const double f = (s * s - 1.0) / den;

    // Columns j and j' before the update; reused across calls to stay allocation free.
    thread_local Vector u0v, u1v;
    u0v = P.col(j);
    u1v = P.col(jp);
    const double* u0 = u0v.data();
    const double* u1 = u1v.data();

    // One pass: rank-2 update, rows/columns j and j' scaled by s/den, phi and omega.
    const double coef = ((s * s - 1.0) * phij - (s - 1.0)) / den;
    const double g = s / den;
    double* phi = core.phi.data();
    double* omega = core.omega.data();
    double* p = P.data();
    for (Index c = 0; c < dim; ++c, p += dim) {
        const double a = u0[c], b = u1[c];
        phi[c] -= coef * (a + b);
        if (c == j || c == jp) {
            const double* u = c == j ? u0 : u1;
            for (Index i = 0; i < dim; ++i) p[i] = g * u[i];
        } else {
            const double fa = f * a, fb = f * b;
            for (Index i = 0; i < dim; ++i) p[i] -= fa * u0[i] - fb * u1[i];
            p[j] = g * a;
            p[jp] = g * b;
            omega[c] = p[c];
        }
    }
    P(j, j) = s * s * w / den;
    P(jp, jp) = wp / den;
    P(j, jp) = 0.0;
    P(jp, j) = 0.0;
    omega[j] = P(j, j);
    omega[jp] = P(jp, jp);
    phi[j] = (s * s * w + s * (phij - w)) / den;
    phi[jp] = 1.0 - phi[j];
    core.Pbar.resize(0, 0);
}

ProjectionCore unidim_update(const ProjectionCore& core, Index j, double s) {
    ProjectionCore out = core;
    unidim_update_inplace(out, j, s);
    return out;
}

Vector limit_phi(const ProjectionCore& core, Index j) {
    check_index(core, j);
    const Index jp = pair_index(core.r(), j);
    const double w = core.P(j, j);
    if (!(w > 1e-14)) throw NumericalError("omega_j vanishes; limit undefined");
    Vector out = core.phi - (core.P.col(j) + core.P.col(jp)) * (core.phi[j] / w);
    out[j] = 1.0;
    out[jp] = 0.0;
    return out;
}

double kappa(double delta, double omega_j, Index r) {
    if (!(omega_j > 0.0 && omega_j < 1.0)) throw ContractError("kappa needs 0 < omega_j < 1");
    if (!(delta > 1.0)) throw ContractError("kappa needs delta > 1");
    return std::sqrt((1.0 - omega_j) / omega_j) * std::sqrt(delta * static_cast<double>(r) - 1.0);
}

double beam(double phi_j, double omega_j) {
    if (!(omega_j > 0.0 && omega_j < 1.0)) throw ContractError("beam needs 0 < omega_j < 1");
    const double d = phi_j - omega_j;
    return d * d / (omega_j * (1.0 - omega_j));
}

double sigma_low(const ProjectionCore& core, Index j) {
    check_index(core, j);
    const double w = core.P(j, j);
    return -(core.phi[j] - w) / w;
}

double sigma_high(const ProjectionCore& core, Index j) {
    check_index(core, j);
    const double w = core.P(j, j);
    const double d = core.phi[j] - w;
    if (d == 0.0) return kInfinity;
    return (1.0 - w) / d;
}

SignChangeRoots sign_change_roots(const ProjectionCore& core, Index i, Index j, double tol) {
    check_index(core, i);
    check_index(core, j);
    const Index jp = pair_index(core.r(), j);
    if (i == j || i == jp) throw ContractError("sign_change_roots needs i outside {j, j'}");
    const double w = core.P(j, j);
    const double p = core.P(i, j) + core.P(i, jp);
    SignChangeRoots out;
    out.slope = p;
    out.lambda0 = core.phi[i] * w - core.phi[j] * p;
    out.lambda1 = core.phi[i] * (1.0 - w) - (1.0 - core.phi[j]) * p;
    if (std::abs(out.lambda0) <= tol) {
        if (std::abs(p) > tol) out.lo = out.hi = -out.lambda1 / p;
        return out;
    }
    const double disc = p * p - 4.0 * out.lambda0 * out.lambda1;
    if (disc < 0.0) return out;
    const double root = std::sqrt(disc);
    // Stable form: q avoids cancellation between -p and the root.
    const double q = -0.5 * (p + std::copysign(root, p));
    double a = q / out.lambda0;
    double b = q != 0.0 ? out.lambda1 / q : a;
    if (a > b) std::swap(a, b);
    out.lo = a;
    out.hi = b;
    return out;
}

Vector a_of_lambda(const ProjectionCore& core, Index j, double lambda, double sign_tol) {
    if (!(lambda > 1.0)) throw ContractError("a_of_lambda needs lambda > 1");
    const Index dim = core.P.rows();
    const Index jp = pair_index(core.r(), j);
    const Vector phil = phi_unidim(core, j, lambda);
    Vector a = Vector::Zero(dim);
    for (Index i = 0; i < dim; ++i) {
        if (i == j || i == jp) continue;
        if (phil[i] >= -sign_tol) {
            a[i] = -1.0;
            continue;
        }
        const SignChangeRoots roots = sign_change_roots(core, i, j);
        if (roots.hi && *roots.hi > 1.0 && *roots.hi <= lambda)
            a[i] = *roots.hi;
        else if (roots.lo && *roots.lo > 1.0 && *roots.lo <= lambda && *roots.hi > lambda)
            a[i] = *roots.lo;
    }
    return a;
}

std::vector<LocusPoint> locus_sample(const ProjectionCore& core, Index j, const std::vector<double>& sigmas) {
    check_index(core, j);
    const Vector e = Vector::Ones(core.P.rows());
    std::vector<LocusPoint> out;
    out.reserve(sigmas.size());
    for (double s : sigmas) {
        LocusPoint pt{s, std::nullopt};
        try {
            if (std::isinf(s))
                pt.point = e - limit_phi(core, j);
            else if (s == 1.0)
                pt.point = e - core.phi;
            else
                pt.point = e - phi_unidim(core, j, s);
        } catch (const std::exception&) {
        }
        out.push_back(std::move(pt));
    }
    return out;
}

LpInstance scaled_instance(const LpInstance& inst, const SqueezeVector& sigma) {
    const Index n = inst.n(), m = inst.m();
    if (sigma.r() != inst.r()) throw ContractError("squeeze vector does not match instance");
    const Vector dn = sigma.values().head(n);
    const Vector dm = sigma.values().segment(n, m);
    LpInstance out;
    out.A = dm.cwiseInverse().asDiagonal() * inst.A * dn.cwiseInverse().asDiagonal();
    out.b = inst.b.cwiseQuotient(dm);
    out.c = inst.c.cwiseQuotient(dn);
    return out;
}

}  // namespace sqz
