#include "nchmm/mesh.hpp"

#include <stdexcept>
#include <string>

namespace nchmm {

UniformQuadMesh::UniformQuadMesh(Point origin, double extent_x, double extent_y, int nx, int ny)
    : origin_(origin), nx_(nx), ny_(ny) {
    if (nx < 1 || ny < 1)
        throw std::invalid_argument("UniformQuadMesh: element counts must be >= 1");
    if (!(extent_x > 0.0) || !(extent_y > 0.0))
        throw std::invalid_argument("UniformQuadMesh: extents must be positive");
    wx_ = extent_x / nx;
    wy_ = extent_y / ny;
}

Point UniformQuadMesh::vertex(VertexId v) const {
    const auto [i, j] = vertex_grid(v);
    return {origin_.x + i * wx_, origin_.y + j * wy_};
}

bool UniformQuadMesh::is_boundary_vertex(VertexId v) const {
    const auto [i, j] = vertex_grid(v);
    return i == 0 || i == nx_ || j == 0 || j == ny_;
}

Point UniformQuadMesh::element_origin(ElementId e) const {
    const auto [i, j] = element_grid(e);
    return {origin_.x + i * wx_, origin_.y + j * wy_};
}

Point UniformQuadMesh::element_center(ElementId e) const {
    const Point p = element_origin(e);
    return {p.x + 0.5 * wx_, p.y + 0.5 * wy_};
}

std::array<VertexId, 4> UniformQuadMesh::element_vertices(ElementId e) const {
    const auto [i, j] = element_grid(e);
    return {vertex_id(i, j), vertex_id(i + 1, j), vertex_id(i, j + 1), vertex_id(i + 1, j + 1)};
}

std::array<FaceId, 4> UniformQuadMesh::element_faces(ElementId e) const {
    const auto [i, j] = element_grid(e);
    return {horizontal_face_id(i, j), vertical_face_id(i + 1, j), horizontal_face_id(i, j + 1),
            vertical_face_id(i, j)};
}

void UniformQuadMesh::check_face(FaceId f) const {
    if (f < 0 || f >= face_count())
        throw std::out_of_range("UniformQuadMesh: face id " + std::to_string(f) +
                                " out of range");
}

bool UniformQuadMesh::is_boundary_face(FaceId f) const {
    check_face(f);
    if (is_horizontal_face(f)) {
        const int j = f / nx_;
        return j == 0 || j == ny_;
    }
    const int i = (f - nx_ * (ny_ + 1)) % (nx_ + 1);
    return i == 0 || i == nx_;
}

Point UniformQuadMesh::face_midpoint(FaceId f) const {
    check_face(f);
    if (is_horizontal_face(f)) {
        const int i = f % nx_, j = f / nx_;
        return {origin_.x + (i + 0.5) * wx_, origin_.y + j * wy_};
    }
    const int k = f - nx_ * (ny_ + 1);
    const int i = k % (nx_ + 1), j = k / (nx_ + 1);
    return {origin_.x + i * wx_, origin_.y + (j + 0.5) * wy_};
}

std::vector<ElementId> UniformQuadMesh::face_elements(FaceId f) const {
    check_face(f);
    std::vector<ElementId> out;
    if (is_horizontal_face(f)) {
        const int i = f % nx_, j = f / nx_;
        if (j > 0) out.push_back(element_id(i, j - 1));
        if (j < ny_) out.push_back(element_id(i, j));
    } else {
        const int k = f - nx_ * (ny_ + 1);
        const int i = k % (nx_ + 1), j = k / (nx_ + 1);
        if (i > 0) out.push_back(element_id(i - 1, j));
        if (i < nx_) out.push_back(element_id(i, j));
    }
    return out;
}

std::array<VertexId, 2> UniformQuadMesh::face_vertices(FaceId f) const {
    check_face(f);
    if (is_horizontal_face(f)) {
        const int i = f % nx_, j = f / nx_;
        return {vertex_id(i, j), vertex_id(i + 1, j)};
    }
    const int k = f - nx_ * (ny_ + 1);
    const int i = k % (nx_ + 1), j = k / (nx_ + 1);
    return {vertex_id(i, j), vertex_id(i, j + 1)};
}

OppositeFacePairs UniformQuadMesh::opposite_face_pairs() const {
    OppositeFacePairs pairs;
    pairs.left_right.reserve(ny_);
    for (int j = 0; j < ny_; ++j)
        pairs.left_right.emplace_back(vertical_face_id(0, j), vertical_face_id(nx_, j));
    pairs.bottom_top.reserve(nx_);
    for (int i = 0; i < nx_; ++i)
        pairs.bottom_top.emplace_back(horizontal_face_id(i, 0), horizontal_face_id(i, ny_));
    return pairs;
}

}  // namespace nchmm
