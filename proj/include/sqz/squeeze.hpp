#pragma once

#include "sqz/model.hpp"
#include "sqz/projection.hpp"

#include <limits>
#include <optional>
#include <vector>

namespace sqz {

// sigma_i * sigma_i' = 1 for every pair.
class SqueezeVector {
public:
    SqueezeVector() = default;
    explicit SqueezeVector(Vector sigma);

    static SqueezeVector ones(Index r);
    // Squeeze on a single pair: sigma_j = s, sigma_j' = 1/s, others 1.
    static SqueezeVector unidim(Index r, Index j, double s);
    // sigma_i = t on the set, 1/t on its complement.
    static SqueezeVector on_set(const ComplementarySet& set, double t);

    const Vector& values() const { return sigma_; }
    double operator[](Index i) const { return sigma_[i]; }
    Index r() const { return sigma_.size() / 2; }
    // Compose a further squeeze of s on pair j.
    void apply(Index j, double s);

private:
    Vector sigma_;
};

// P(sigma) = D H'(H D^2 H')^-1 H D, evaluated as the projector onto range(D H').
ProjectionCore p_sigma_full(const HFactor& h, const SqueezeVector& sigma);

double squeeze_denominator(double omega_j, double s);
double omega_unidim(double omega_j, double s);
// O(r^2) double rank-1 update of P for a squeeze of s on pair j.
ProjectionCore unidim_update(const ProjectionCore& core, Index j, double s);
void unidim_update_inplace(ProjectionCore& core, Index j, double s);
// phi after a squeeze of s on pair j, from the closed forms in O(r).
Vector phi_unidim(const ProjectionCore& core, Index j, double s);
// phi as s -> infinity.
Vector limit_phi(const ProjectionCore& core, Index j);

// Squeeze that drives omega_j to 1 - 1/(delta r).
double kappa(double delta, double omega_j, Index r);
double beam(double phi_j, double omega_j);
// Roots of phi_j(s) = 0 and of phi_j(s) = 1 (the two ends of the diameter
// through e^j - e^j').
double sigma_low(const ProjectionCore& core, Index j);
double sigma_high(const ProjectionCore& core, Index j);

struct SignChangeRoots {
    std::optional<double> lo;
    std::optional<double> hi;
    double lambda0 = 0;
    double lambda1 = 0;
    double slope = 0;  // p_ij + p_ij'
};

// Values of s where phi_i changes sign under a squeeze of pair j.
SignChangeRoots sign_change_roots(const ProjectionCore& core, Index i, Index j, double tol = 1e-14);

// Per-index chronology markers for a squeeze of lambda on pair j:
// -1 when phi_i stays nonnegative, the crossing point when phi_i turns
// negative inside (1, lambda], else 0. Entries j and j' are left at 0.
Vector a_of_lambda(const ProjectionCore& core, Index j, double lambda, double sign_tol = 1e-10);

struct LocusPoint {
    double sigma;
    std::optional<Vector> point;  // e - phi(sigma); empty when the squeeze is singular
};

constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Points e - phi(sigma) on the circle traced by squeezes of pair j.
// sigma = +infinity is allowed and uses limit_phi.
std::vector<LocusPoint> locus_sample(const ProjectionCore& core, Index j, const std::vector<double>& sigmas);

// A(s) = Dm^-1 A Dn^-1, b(s) = Dm^-1 b, c(s) = Dn^-1 c with Dn, Dm the
// sigma entries of the u and v coordinates.
LpInstance scaled_instance(const LpInstance& inst, const SqueezeVector& sigma);

}  // namespace sqz
