#include "sqz/io.hpp"
#include "sqz/oracle.hpp"
#include "sqz/solver.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace sqz;

namespace {

py::dict core_dict(const ProjectionCore& core) {
    py::dict d;
    d["P"] = core.P;
    d["phi"] = core.phi;
    d["omega"] = core.omega;
    return d;
}

ProjectionCore core_from_dict(const Matrix& P) { return core_from_P(P); }

py::dict solve_py(const Matrix& A, const Vector& b, const Vector& c, double delta_high, double delta_low,
                  std::optional<Index> delta_switch, std::optional<double> epsilon,
                  std::optional<Index> max_iterations, const std::string& select) {
    SolverConfig cfg;
    cfg.delta_high = delta_high;
    cfg.delta_low = delta_low;
    cfg.delta_switch_iteration = delta_switch;
    cfg.epsilon = epsilon;
    cfg.max_iterations = max_iterations;
    if (select == "limit-count")
        cfg.select_rule = SelectRule::LimitCount;
    else if (select != "chronological")
        throw ContractError("select must be 'chronological' or 'limit-count'");

    const SolveResult res = solve(make_instance(A, b, c), cfg);
    py::dict d;
    d["status"] = status_name(res.outcome);
    d["iterations"] = res.iterations;
    d["alpha"] = py::none();
    d["objective"] = py::none();
    d["z"] = py::none();
    d["reason"] = py::none();
    if (const auto* opt = std::get_if<Optimal>(&res.outcome)) {
        d["alpha"] = opt->alpha.one_based();
        d["objective"] = opt->objective;
        d["z"] = opt->z;
    } else if (const auto* fl = std::get_if<Flagged>(&res.outcome)) {
        d["reason"] = fl->reason;
    }
    py::list squeezes;
    for (const auto& rec : res.trace)
        if (rec.j) squeezes.append(py::make_tuple(rec.k, *rec.j + 1, rec.sigma_j, rec.delta));
    d["squeezes"] = squeezes;
    d["events"] = res.events;
    return d;
}

}  // namespace

PYBIND11_MODULE(_sqzlp, m) {
    m.doc() = "Squeeze-mapping LP solver";

    py::register_exception<ContractError>(m, "ContractError", PyExc_ValueError);
    py::register_exception<DegenerateInput>(m, "DegenerateInput", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

    m.def(
        "solve", &solve_py, py::arg("A"), py::arg("b"), py::arg("c"), py::arg("delta_high") = 100.0,
        py::arg("delta_low") = 5.0, py::arg("delta_switch") = py::none(), py::arg("epsilon") = py::none(),
        py::arg("max_iterations") = py::none(), py::arg("select") = "chronological",
        "Solve max c'x s.t. Ax <= b, x >= 0. Indices in the result are 1-based.");

    m.def(
        "read_instance",
        [](const std::string& path) {
            const LpInstance inst = read_instance(path);
            return py::make_tuple(inst.A, inst.b, inst.c);
        },
        py::arg("path"), "Read an instance file, returning (A, b, c).");

    m.def(
        "base_projection",
        [](const Matrix& A, const Vector& b, const Vector& c) {
            return core_dict(base_projection(make_instance(A, b, c)));
        },
        py::arg("A"), py::arg("b"), py::arg("c"), "P, phi = Pe and omega = diag(P) of an instance.");

    m.def(
        "unidim_update",
        [](const Matrix& P, Index j, double sigma) {
            if (j < 1 || j > P.rows()) throw ContractError("j must lie in 1..2r");
            return core_dict(unidim_update(core_from_dict(P), j - 1, sigma));
        },
        py::arg("P"), py::arg("j"), py::arg("sigma"), "Squeeze pair j (1-based) of P by sigma.");

    m.def(
        "verify_identities", [](const Matrix& P) { return verify_identities(core_from_P(P)).max(); },
        py::arg("P"), "Largest violation of the projection identities.");

    m.def(
        "generate_instance",
        [](Index n, Index m_, std::uint64_t seed) {
            const PlantedInstance p = generate_instance(n, m_, seed);
            return py::make_tuple(p.inst.A, p.inst.b, p.inst.c, p.truth.alpha.one_based(), p.truth.z_star);
        },
        py::arg("n"), py::arg("m"), py::arg("seed"),
        "Random instance with a planted optimum: (A, b, c, alpha, z).");

    m.def(
        "enumerate_optimal",
        [](const Matrix& A, const Vector& b, const Vector& c) {
            const OracleOutcome oc = enumerate_optimal(make_instance(A, b, c));
            py::dict d;
            d["status"] = oc.status == OracleStatus::Optimal     ? "Optimal"
                          : oc.status == OracleStatus::Unbounded ? "Unbounded"
                                                                 : "Infeasible";
            d["alpha"] = py::none();
            d["objective"] = py::none();
            d["z"] = py::none();
            if (oc.result) {
                d["alpha"] = oc.result->alpha.one_based();
                d["objective"] = oc.result->objective;
                d["z"] = oc.result->z_star;
            }
            return d;
        },
        py::arg("A"), py::arg("b"), py::arg("c"), "Brute-force optimum over all complementary sets (r <= 16).");

    m.def(
        "kkt_residual",
        [](const Matrix& A, const Vector& b, const Vector& c, const Vector& z) {
            return kkt_check(make_instance(A, b, c), z, 0.0).max();
        },
        py::arg("A"), py::arg("b"), py::arg("c"), py::arg("z"), "Largest KKT residual of z = (u, v, x, y).");
}
