#pragma once

#include "sqz/model.hpp"
#include "sqz/projection.hpp"
#include "sqz/squeeze.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace sqz {

struct OracleResult {
    Vector z_star;
    ComplementarySet alpha;
    double objective = 0.0;
    bool unique = false;
    bool nondegenerate = false;
};

enum class OracleStatus { Optimal, Infeasible, Unbounded };

struct OracleOutcome {
    OracleStatus status = OracleStatus::Infeasible;
    std::optional<OracleResult> result;
};

constexpr Index kOracleMaxR = 16;

// Exhaustive search over all 2^r complementary sets.
OracleOutcome enumerate_optimal(const LpInstance& inst);

struct KktReport {
    double dual = 0;         // |u - (A'y - c)|
    double primal = 0;       // |v - (b - Ax)|
    double negativity = 0;   // max(-z_i, 0)
    double complementarity = 0;  // max |z_i z_i'|
    double gap = 0;          // |c'x - b'y|
    bool pass = false;

    double max() const;
};

KktReport kkt_check(const LpInstance& inst, const Vector& z, double tol);

struct GeneratorOptions {
    // Number of positive x entries (= active constraints); random when empty.
    std::optional<Index> support_size;
    double low = 0.1;
    double high = 10.0;
    int max_attempts = 1000;
};

struct PlantedInstance {
    LpInstance inst;
    OracleResult truth;
};

PlantedInstance generate_instance(Index n, Index m, std::uint64_t seed, const GeneratorOptions& opt = {});
// Alternates on the seed between an empty primal (a positive row of A with
// b_i < 0) and an empty dual (a negative column of A with c_j > 0).
LpInstance generate_infeasible(Index n, Index m, std::uint64_t seed);

struct DecouplingDiagnostics {
    Vector z_dot;  // 2r, zero off alpha
    Matrix P_hat;
    Vector omega_hat;
    Vector phi_hat;
    std::vector<Index> alpha_prime;  // 0-based, ascending
    Vector f;                        // f_i for i in alpha_prime, same order
    std::vector<bool> reliable;
};

DecouplingDiagnostics decoupling_diagnostics(const ProjectionCore& core, const OracleResult& truth);
// f_i = |P_pp^-1 P_p. mu_i| / |mu_i| with p = alpha minus i'.
double f_value(const Matrix& P, const DecouplingDiagnostics& diag, const ComplementarySet& alpha, Index i,
               bool* reliable = nullptr);

// P with sigma = t on alpha and 1/t on alpha'.
ProjectionCore decoupling_path(const HFactor& h, const ComplementarySet& alpha, double t);

struct FScalingReport {
    std::vector<double> f_base;
    std::vector<double> f_t;
    double max_relative_error = 0;  // over |f(t) t^2 - f| / f, for f >= 1e-10
    bool bound_holds = true;        // f_i < sqrt(r) or f_i < sqrt(r / omega_j) for some j in pi
};

FScalingReport f_scaling_check(const ProjectionCore& base, const OracleResult& truth, double t);

bool epsilon_decoupling_check(const ProjectionCore& core, const DecouplingDiagnostics& diag, double eps);

}  // namespace sqz
