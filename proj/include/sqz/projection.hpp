#pragma once

#include "sqz/model.hpp"

#include <vector>

namespace sqz {

// P: 2r x 2r projection, phi = P e, omega = diag(P). Pbar is the s x s
// projection onto the row space of G (left empty when P came from an update).
struct ProjectionCore {
    Matrix P;
    Vector phi;
    Vector omega;
    Matrix Pbar;

    Index r() const { return P.rows() / 2; }
};

Matrix compute_Pbar(const Matrix& G);
// Limit formula p_ij = pbar_ij - pbar_is pbar_sj / pbar_ss. Checks the
// structural invariants and throws NumericalError when they fail.
ProjectionCore compute_P(const Matrix& Pbar);
// Same P from (I + A'A)^-1 and (I + AA')^-1 blocks, without forming Pbar.
ProjectionCore compute_P_block(const LpInstance& inst);
ProjectionCore base_projection(const LpInstance& inst);
// Wraps a projection matrix, deriving phi and omega.
ProjectionCore core_from_P(Matrix P);

struct HFactor {
    Matrix H;  // r x 2r
    std::vector<Index> rows;
};

HFactor choose_H(const ProjectionCore& core);
Matrix projector_from_H(const Matrix& H);

// t = -Pbar[s, 0:2r] z / pbar_ss
double t_component(const Vector& z, const Matrix& Pbar);

struct IdentityReport {
    double symmetry = 0;
    double idempotence = 0;  // relative to max |p_ij|
    double trace = 0;        // |trace(P) - r|
    double block = 0;        // P_bb = I - P_b'b'
    double antisymmetry = 0; // p_ij' = -p_i'j
    double pair_zero = 0;    // p_ii' = 0
    double omega_sum = 0;    // omega_i + omega_i' = 1
    double phi_sum = 0;      // phi_i + phi_i' = 1
    double cross = 0;        // sum_j p_ij p_ij' = 0
    double sphere = 0;       // |e - phi|^2 = r
    double membership = 0;   // |P (e - phi)| / |e|

    double max() const;
};

IdentityReport verify_identities(const ProjectionCore& core);

}  // namespace sqz
