#include "nchmm/fem.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nchmm {

double shape_value(int corner, double s, double t) {
    const double ss = (corner & 1) ? 1.0 - s : s;
    const double tt = (corner & 2) ? 1.0 - t : t;
    return 0.75 - 0.5 * (ss + tt);
}

Vec2 shape_gradient(int corner, double cell_width_x, double cell_width_y) {
    return {((corner & 1) ? 1.0 : -1.0) / (2.0 * cell_width_x),
            ((corner & 2) ? 1.0 : -1.0) / (2.0 * cell_width_y)};
}

NCSpace::NCSpace(UniformQuadMesh mesh, SpaceVariant variant, std::vector<int> vertex_dof,
                 int dof_count)
    : mesh_(mesh), variant_(variant), vertex_dof_(std::move(vertex_dof)), dof_count_(dof_count) {}

NCSpace::NCSpace(UniformQuadMesh mesh, SpaceVariant variant)
    : mesh_(mesh), variant_(variant), dof_count_(0) {
    const int nv = mesh_.vertex_count();
    vertex_dof_.assign(static_cast<std::size_t>(nv), -1);
    switch (variant) {
        case SpaceVariant::Full:
            for (int v = 0; v < nv; ++v) vertex_dof_[v] = v;
            dof_count_ = nv;
            break;
        case SpaceVariant::ZeroBoundaryMean:
            for (int v = 0; v < nv; ++v)
                if (!mesh_.is_boundary_vertex(v)) vertex_dof_[v] = dof_count_++;
            break;
        case SpaceVariant::PeriodicZeroMean: {
            const int nx = mesh_.nx(), ny = mesh_.ny();
            for (int v = 0; v < nv; ++v) {
                const auto [i, j] = mesh_.vertex_grid(v);
                vertex_dof_[v] = (i % nx) + nx * (j % ny);
            }
            dof_count_ = nx * ny;
            break;
        }
    }
}

NCSpace NCSpace::with_fixed_vertices(UniformQuadMesh mesh, std::vector<char> vertex_fixed) {
    const int nv = mesh.vertex_count();
    if (vertex_fixed.size() != static_cast<std::size_t>(nv))
        throw std::invalid_argument("with_fixed_vertices: mask size mismatch");
    std::vector<int> dof(static_cast<std::size_t>(nv), -1);
    int count = 0;
    for (int v = 0; v < nv; ++v)
        if (!vertex_fixed[v]) dof[v] = count++;
    return NCSpace(mesh, SpaceVariant::Full, std::move(dof), count);
}

std::array<int, 4> NCSpace::element_dofs(ElementId e) const {
    const auto verts = mesh_.element_vertices(e);
    return {vertex_dof_[verts[0]], vertex_dof_[verts[1]], vertex_dof_[verts[2]],
            vertex_dof_[verts[3]]};
}

double Field::evaluate(ElementId e, Point x) const {
    const Point o = mesh.element_origin(e);
    const double s = (x.x - o.x) / mesh.cell_width_x();
    const double t = (x.y - o.y) / mesh.cell_width_y();
    const double tol = 1e-12;
    if (s < -tol || s > 1.0 + tol || t < -tol || t > 1.0 + tol)
        throw std::invalid_argument("Field::evaluate: point outside element");
    const auto verts = mesh.element_vertices(e);
    double val = 0.0;
    for (int c = 0; c < 4; ++c) val += vertex_values[verts[c]] * shape_value(c, s, t);
    return val;
}

double Field::evaluate_at(Point x) const {
    const Point o = mesh.origin();
    int i = static_cast<int>(std::floor((x.x - o.x) / mesh.cell_width_x()));
    int j = static_cast<int>(std::floor((x.y - o.y) / mesh.cell_width_y()));
    i = std::clamp(i, 0, mesh.nx() - 1);
    j = std::clamp(j, 0, mesh.ny() - 1);
    return evaluate(mesh.element_id(i, j), x);
}

Vec2 Field::gradient(ElementId e) const {
    const auto verts = mesh.element_vertices(e);
    Vec2 g = {0.0, 0.0};
    for (int c = 0; c < 4; ++c) {
        const Vec2 sg = shape_gradient(c, mesh.cell_width_x(), mesh.cell_width_y());
        g[0] += vertex_values[verts[c]] * sg[0];
        g[1] += vertex_values[verts[c]] * sg[1];
    }
    return g;
}

double Field::edge_mean(ElementId e, FaceId f) const { return evaluate(e, mesh.face_midpoint(f)); }

double Field::domain_mean() const {
    double sum = 0.0;
    for (ElementId e = 0; e < mesh.element_count(); ++e) {
        const auto verts = mesh.element_vertices(e);
        const double centroid = 0.25 * (vertex_values[verts[0]] + vertex_values[verts[1]] +
                                        vertex_values[verts[2]] + vertex_values[verts[3]]);
        sum += centroid;
    }
    return sum / mesh.element_count();
}

Field make_field(const NCSpace& space, std::span<const double> dof_coeffs,
                 std::span<const double> fixed_vertex_values) {
    if (dof_coeffs.size() != static_cast<std::size_t>(space.dof_count()))
        throw std::invalid_argument("make_field: coefficient count mismatch");
    const auto& mesh = space.mesh();
    Field field{mesh, std::vector<double>(static_cast<std::size_t>(mesh.vertex_count()), 0.0)};
    for (int v = 0; v < mesh.vertex_count(); ++v) {
        const int d = space.vertex_dof(v);
        if (d >= 0)
            field.vertex_values[v] = dof_coeffs[d];
        else if (!fixed_vertex_values.empty())
            field.vertex_values[v] = fixed_vertex_values[v];
    }
    return field;
}

Field interpolate_linear(const NCSpace& space, double a, Vec2 b) {
    const auto& mesh = space.mesh();
    if (space.variant() == SpaceVariant::ZeroBoundaryMean) {
        // The interpolant of a linear function has boundary edge means equal
        // to the function's midpoint values; they must all vanish.
        for (FaceId f = 0; f < mesh.face_count(); ++f) {
            if (!mesh.is_boundary_face(f)) continue;
            const Point m = mesh.face_midpoint(f);
            if (std::abs(a + b[0] * m.x + b[1] * m.y) > 1e-12)
                throw std::invalid_argument(
                    "interpolate_linear: linear function violates zero boundary means");
        }
    }
    if (space.variant() == SpaceVariant::PeriodicZeroMean && (b[0] != 0.0 || b[1] != 0.0))
        throw std::invalid_argument(
            "interpolate_linear: nonconstant linear function is not periodic");
    Field field{mesh, std::vector<double>(static_cast<std::size_t>(mesh.vertex_count()), 0.0)};
    for (int v = 0; v < mesh.vertex_count(); ++v) {
        const Point p = mesh.vertex(v);
        field.vertex_values[v] = a + b[0] * p.x + b[1] * p.y;
    }
    return field;
}

}  // namespace nchmm
