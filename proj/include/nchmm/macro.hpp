#ifndef NCHMM_MACRO_HPP
#define NCHMM_MACRO_HPP

#include <functional>

#include "nchmm/fem.hpp"
#include "nchmm/linalg.hpp"
#include "nchmm/micro.hpp"
#include "nchmm/tensor_field.hpp"

namespace nchmm {

struct QuadPoint {
    Point x;
    double weight;
};

/// 2x2 tensor-product Gauss-Legendre rule on an element: 4 points at offsets
/// (1/2 +- 1/(2 sqrt 3)) * width, weights area/4. Exact for the P1 stiffness
/// (constant gradients) by construction.
std::array<QuadPoint, 4> quadrature_points(const UniformQuadMesh& mesh, ElementId e);

enum class BcType { DirichletZero, DirichletValue, NeumannZero };

struct SideCondition {
    BcType type = BcType::DirichletZero;
    std::function<double(Point)> value;  // used by DirichletValue
};

/// Boundary conditions per domain side. At corner vertices a Dirichlet side
/// wins over a Neumann one; if both adjacent sides are Dirichlet they must
/// agree at the corner.
struct BoundarySpec {
    SideCondition left, right, bottom, top;

    static BoundarySpec all_dirichlet_zero() { return {}; }
};

struct MacroProblem {
    UniformQuadMesh mesh;
    TensorField tensor;                     // A^eps
    std::function<double(Point)> source;    // f
    BoundarySpec bc;
    double delta = 0.0;                     // sampling-domain width
    int micro_n = 1;                        // micro elements per axis
    Coupling coupling = Coupling::Periodic;
    CgOptions micro_cg;
    /// Reuse micro solves between sampling domains whose tensor restriction
    /// is identical, keyed by TensorField::sampling_key. Off by default.
    bool memoize = false;
    int jobs = 1;
};

struct MacroSystem {
    NCSpace space;
    std::vector<double> fixed_values;  // per vertex, Dirichlet lift
    SparseSymMatrix matrix;
    std::vector<double> rhs;
    /// Recovered tensor per (element, quadrature point), index 4*e + q;
    /// empty for assemble_with_tensor_field (tensor evaluated directly).
    std::vector<Mat2> tensors;
    long micro_cg_iters_total = 0;
    int micro_solves = 0;            // distinct micro problems solved
    double max_tensor_cross_check = 0.0;
    double max_tensor_asymmetry = 0.0;
};

/// FEHMM assembly: one micro problem per (element, quadrature point), macro
/// stiffness built from the recovered tensors, RHS (f, w_H) by the same 2x2
/// Gauss-Legendre rule, Dirichlet DOFs eliminated with the lift moved to the
/// RHS. Micro failures propagate with the sampling domain identified.
MacroSystem assemble_fehmm(const MacroProblem& problem);

/// Same macro assembly but with a tensor evaluated directly at quadrature
/// points (no micro solves): the quadrature homogenized form, also used for
/// plain nonconforming Galerkin reference solves.
MacroSystem assemble_with_tensor_field(const UniformQuadMesh& mesh, const TensorField& A0,
                                       const std::function<double(Point)>& source,
                                       const BoundarySpec& bc);

/// CG solve of the (SPD after elimination) macro system, returning the field
/// including Dirichlet vertex values. Throws std::runtime_error on
/// non-convergence.
std::pair<Field, CgReport> solve_macro(const MacroSystem& system, double tol = 1e-12);

}  // namespace nchmm

#endif
