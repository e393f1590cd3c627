#pragma once

#include "sqz/solver.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace sqz {

// Exit codes: 0 Optimal / success, 1 usage or IO error, 2 Infeasible, 3 Flagged.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// k,j,sigma_j,delta,peak_shaving,sum_omega_gamma,gamma,phi_1..phi_2r,omega_1..omega_2r
std::string trace_csv(const std::vector<IterationRecord>& trace, Index r);
// Single JSON object: status, alpha, objective, z, iterations, flags.
std::string summary_json(const SolveResult& result);

}  // namespace sqz
