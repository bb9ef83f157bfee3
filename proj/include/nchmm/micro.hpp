#ifndef NCHMM_MICRO_HPP
#define NCHMM_MICRO_HPP

#include <array>

#include "nchmm/fem.hpp"
#include "nchmm/linalg.hpp"
#include "nchmm/tensor_field.hpp"

namespace nchmm {

enum class Coupling { Periodic, Dirichlet };

/// Square sampling domain center + [-delta/2, delta/2]^2, meshed n x n.
struct SamplingDomain {
    Point center;
    double delta = 0.0;
    int n = 1;
    Coupling coupling = Coupling::Periodic;

    UniformQuadMesh make_mesh() const;
};

/// Assembled micro problem: stiffness on the coupling space, the two
/// corrector right-hand sides, and per-cell quadrature averages of the
/// coefficient (reused for tensor recovery and energy evaluations).
struct MicroSystem {
    NCSpace space;
    SparseSymMatrix matrix;
    std::array<std::vector<double>, 2> rhs;
    /// Gross accumulation sum |contributions| per RHS; an assembled norm far
    /// below this scale means the RHS is analytically zero up to roundoff.
    std::array<double, 2> rhs_gross;
    /// Per micro cell, the average of A over the 2x2 Gauss-Legendre points;
    /// cell integrals of A times constant gradients are area * this.
    std::vector<Mat2> cell_tensor;
};

/// Stiffness is sum over cells of area * (cell average of A) grad u . grad v;
/// the 2x2 Gauss-Legendre rule is exact here because P1 gradients are
/// constant. RHS_j = -sum over cells of area * (cell average of A) e_j . grad z.
MicroSystem assemble_micro_system(const SamplingDomain& domain, const TensorField& A);

struct Corrector {
    std::array<Field, 2> psi;
    std::array<CgReport, 2> reports;
};

/// Solves the two corrector problems by CG on the shared stiffness matrix.
/// Periodic coupling: asserts RHS consistency (orthogonality to the constant
/// kernel vector within 1e-12 of the gross scale) and shifts each solution to
/// zero mean afterwards. An RHS whose norm is below 1e-13 of its gross
/// accumulation is treated as exactly zero (corrector = 0).
/// Throws std::runtime_error on CG non-convergence.
Corrector solve_correctors(const SamplingDomain& domain, const MicroSystem& system,
                           const CgOptions& options = {});

/// Convenience: assemble + solve.
Corrector solve_correctors(const SamplingDomain& domain, const TensorField& A,
                           const CgOptions& options = {});

struct RecoveredTensor {
    Mat2 value;         // flux representation delta^-2 sum int A (I + J_psi^t)
    Mat2 energy_value;  // delta^-2 sum int A (e_k + grad psi^k).(e_j + grad psi^j)
    double cross_check; // max |value - energy_value| entrywise
};

/// Both representations must agree (up to solver tolerance); the energy form
/// is symmetric by construction up to the same tolerance.
RecoveredTensor recovered_tensor(const SamplingDomain& domain, const MicroSystem& system,
                                 const Corrector& corrector);

/// Energy |||v_H + sum_j xi_j psi^j|||_h^2 of the constrained micro solution
/// for the linear constraint v_H = xi . x (test support for the energy-bound
/// and identity properties).
double micro_energy(const MicroSystem& system, const Corrector& corrector, Vec2 xi);

/// Cross energy a_h(u^m, v^m) for constraints xi . x and eta . x.
double micro_cross_energy(const MicroSystem& system, const Corrector& corrector, Vec2 xi,
                          Vec2 eta);

/// Dense Lagrange-multiplier reference solve of the same micro problem on the
/// Full vertex space with explicit pairing/zero-mean (periodic) or boundary
/// edge-mean (Dirichlet) constraints. Oracle for small n.
Corrector dense_micro_reference(const SamplingDomain& domain, const TensorField& A);

/// Dimension and rank deficiency of the iterative system (dense eigenvalue
/// count below tol * largest; small n only). Informational output.
std::pair<int, int> micro_system_rank_info(const MicroSystem& system, double tol = 1e-9);

}  // namespace nchmm

#endif
