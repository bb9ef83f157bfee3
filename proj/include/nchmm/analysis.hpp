#ifndef NCHMM_ANALYSIS_HPP
#define NCHMM_ANALYSIS_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nchmm/fem.hpp"
#include "nchmm/macro.hpp"

namespace nchmm {

struct ExactSolution {
    std::function<double(Point)> value;
    std::function<Vec2(Point)> gradient;
};

/// Broken H1 (energy) error sqrt(sum_K int_K |grad u_H - grad u0|^2), each
/// element integral by 3x3 Gauss-Legendre (one order above assembly).
double broken_h1_error(const Field& u, const ExactSolution& exact);

/// L2 error by the same element-wise 3x3 rule.
double l2_error(const Field& u, const ExactSolution& exact);

/// Inter-mesh errors between a coarse field and a reference field on a finer
/// nested mesh (same domain, fine counts divisible by coarse counts): the
/// coarse field is evaluated element-locally at the fine mesh's quadrature
/// points / cells. Throws std::invalid_argument for non-nested meshes.
double broken_h1_between(const Field& coarse, const Field& fine);
double l2_between(const Field& coarse, const Field& fine);

/// Plain nonconforming Galerkin solve with the tensor evaluated directly at
/// quadrature points; used for homogenized reference solutions and for fine
/// multiscale reference solves.
Field reference_solver(const UniformQuadMesh& mesh, const TensorField& tensor,
                       const std::function<double(Point)>& source, const BoundarySpec& bc,
                       double tol = 1e-12);

/// log2(e_i / e_{i+1}) for successive entries.
std::vector<double> estimate_rates(const std::vector<double>& errors);

struct ExampleProblem;  // examples.hpp

struct RunOptions {
    bool memoize = false;
    int jobs = 1;
    CgOptions micro_cg;
    double macro_tol = 1e-12;
    /// Reference field for inter-mesh error measurement (mixed-domain); when
    /// null and the example needs one, it is computed internally.
    const Field* reference = nullptr;
};

struct RunRecord {
    int H_den = 0;
    int micro_n = 0;
    double delta = 0.0;
    Coupling coupling = Coupling::Periodic;
    bool ok = false;
    std::string message;
    double err_h1 = 0.0;
    double err_l2 = 0.0;
    double tensor_err_sup = 0.0;  // sup_K ||A0(x_i) - A0_K||_F
    long micro_cg_iters_total = 0;
    int macro_cg_iters = 0;
    int micro_solves = 0;
};

struct RunOutput {
    RunRecord record;
    std::optional<Field> solution;
    std::vector<Mat2> tensors;   // per (element, quadrature point)
    std::vector<Point> centers;  // matching sampling-domain centers
};

/// One full FEHMM pipeline run of a built-in problem on the H_den x H_den
/// macro mesh of (0,1)^2. Solve failures are captured in the record rather
/// than thrown.
RunOutput run_fehmm(const ExampleProblem& example, int H_den, int micro_n, double delta,
                    const RunOptions& options = {});

struct ConvergenceReport {
    std::vector<RunRecord> records;  // sweep order: delta, then H, then n
};

/// Full sweep over the (H, n, delta) grid; failed cells are recorded and the
/// report is still emitted.
ConvergenceReport convergence_report(const ExampleProblem& example,
                                     const std::vector<int>& H_dens,
                                     const std::vector<int>& micro_ns,
                                     const std::vector<double>& deltas,
                                     const RunOptions& options = {});

}  // namespace nchmm

#endif
