#ifndef NCHMM_FEM_HPP
#define NCHMM_FEM_HPP

#include <span>
#include <vector>

#include "nchmm/mat2.hpp"
#include "nchmm/mesh.hpp"

namespace nchmm {

/// Local basis of the P1-nonconforming quadrilateral element.
///
/// One basis function per element corner, ordered like element_vertices():
/// corner c has grid offsets (cx, cy) = (c & 1, c >> 1). On the reference cell
/// [0,1]^2 the corner-(0,0) function is 3/4 - (s+t)/2; its edge-midpoint
/// values are 1/2 on the two edges incident to the corner and 0 on the
/// opposite ones, which satisfies the P1 compatibility m1+m3 = m2+m4.
double shape_value(int corner, double s, double t);

/// Physical gradient; constant over the element.
Vec2 shape_gradient(int corner, double cell_width_x, double cell_width_y);

enum class SpaceVariant { Full, ZeroBoundaryMean, PeriodicZeroMean };

/// Global P1-nonconforming space with vertex-associated degrees of freedom.
///
/// Full: one DOF per mesh vertex. ZeroBoundaryMean: boundary vertices are
/// constrained to zero. PeriodicZeroMean: vertices are identified modulo the
/// mesh period (torus), nx*ny DOFs; the zero-integral condition is not
/// encoded here, callers impose it by post-processing. The vertex basis may
/// carry global linear relations (checkerboard type); assembled systems can
/// be rank-deficient and solvers must accept consistent singular systems.
class NCSpace {
  public:
    NCSpace(UniformQuadMesh mesh, SpaceVariant variant);

    /// Full-type space with an arbitrary subset of vertices constrained to a
    /// prescribed (Dirichlet) value; used for mixed boundary conditions.
    static NCSpace with_fixed_vertices(UniformQuadMesh mesh, std::vector<char> vertex_fixed);

    const UniformQuadMesh& mesh() const { return mesh_; }
    SpaceVariant variant() const { return variant_; }
    int dof_count() const { return dof_count_; }

    /// Global DOF of a vertex, or -1 if the vertex is constrained.
    int vertex_dof(VertexId v) const { return vertex_dof_[static_cast<std::size_t>(v)]; }

    /// DOFs of the four corners of an element, corner order as in
    /// element_vertices(); entries are -1 for constrained vertices.
    std::array<int, 4> element_dofs(ElementId e) const;

  private:
    NCSpace(UniformQuadMesh mesh, SpaceVariant variant, std::vector<int> vertex_dof,
            int dof_count);

    UniformQuadMesh mesh_;
    SpaceVariant variant_;
    std::vector<int> vertex_dof_;
    int dof_count_;
};

/// Piecewise linear field, stored as one value per geometric vertex. The
/// element-local polynomial is the span of the four corner basis functions
/// with these values as coefficients; vertex values equal to a linear
/// function reproduce that linear function exactly.
struct Field {
    UniformQuadMesh mesh;
    std::vector<double> vertex_values;

    /// Value of the element-local polynomial. Throws std::invalid_argument
    /// if x lies outside the element.
    double evaluate(ElementId e, Point x) const;

    /// Locates the containing element (clamped to the mesh) and evaluates.
    double evaluate_at(Point x) const;

    /// Constant gradient of the element-local polynomial.
    Vec2 gradient(ElementId e) const;

    /// Mean of the field over a face, seen from element e (analytic: the
    /// midpoint value of the local linear polynomial).
    double edge_mean(ElementId e, FaceId f) const;

    /// Mean over the whole mesh domain (exact: centroid value times area).
    double domain_mean() const;
};

/// Expands a DOF coefficient vector into a Field. Constrained vertices take
/// values from fixed_vertex_values (indexed by vertex) or 0 if empty.
Field make_field(const NCSpace& space, std::span<const double> dof_coeffs,
                 std::span<const double> fixed_vertex_values = {});

/// Field whose element-local polynomials all equal a + b.x (exact).
/// Throws std::invalid_argument on ZeroBoundaryMean when the linear function
/// has a nonzero mean on some boundary face.
Field interpolate_linear(const NCSpace& space, double a, Vec2 b);

}  // namespace nchmm

#endif
