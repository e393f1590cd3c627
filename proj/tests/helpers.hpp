#pragma once

#include "sqz/oracle.hpp"
#include "sqz/solver.hpp"

#include <cstdint>
#include <random>

namespace sqz::test {

// max 50 x1 + 2 x2  s.t.  200 x1 + 4 x2 <= 2
inline LpInstance example_lp() {
    Matrix A(1, 2);
    A << 200, 4;
    Vector b(1), c(2);
    b << 2;
    c << 50, 2;
    return make_instance(A, b, c);
}

inline LpInstance unit_instance(double a, double b, double c) {
    return make_instance(Matrix::Constant(1, 1, a), Vector::Constant(1, b), Vector::Constant(1, c));
}

// Seeded draw of shapes with 1 <= m <= 6, m <= n <= 8.
inline PlantedInstance random_planted(std::uint64_t seed, Index max_n = 8, Index max_m = 6) {
    std::mt19937_64 rng(seed * 7919 + 17);
    const Index m = std::uniform_int_distribution<Index>(1, max_m)(rng);
    const Index n = std::uniform_int_distribution<Index>(m, std::max(m, max_n))(rng);
    return generate_instance(n, m, seed);
}

inline double max_abs(const Matrix& M) { return M.cwiseAbs().maxCoeff(); }

inline SolverConfig reference_config() {
    SolverConfig cfg;
    cfg.delta_switch_iteration = 2;
    return cfg;
}

}  // namespace sqz::test
