#ifndef NCHMM_MESH_HPP
#define NCHMM_MESH_HPP

#include <array>
#include <utility>
#include <vector>

namespace nchmm {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

using ElementId = int;
using VertexId = int;
using FaceId = int;

/// Pairs of boundary faces on opposite sides of the domain, used for the
/// periodic vertex identification. `left_right[j]` pairs the j-th face of the
/// left side with the j-th face of the right side; likewise `bottom_top`.
struct OppositeFacePairs {
    std::vector<std::pair<FaceId, FaceId>> left_right;
    std::vector<std::pair<FaceId, FaceId>> bottom_top;

    std::size_t count() const { return left_right.size() + bottom_top.size(); }
};

/// Uniform axis-aligned rectangle mesh of nx*ny congruent cells.
///
/// Index layout (frozen, x-fastest):
///   element (i,j)  -> i + nx*j            i in [0,nx), j in [0,ny)
///   vertex  (i,j)  -> i + (nx+1)*j        i in [0,nx], j in [0,ny]
///   horizontal face (i,j), the edge y = origin.y + j*wy over cell column i:
///                  -> i + nx*j            i in [0,nx), j in [0,ny]
///   vertical face (i,j), the edge x = origin.x + i*wx over cell row j:
///                  -> nx*(ny+1) + i + (nx+1)*j   i in [0,nx], j in [0,ny)
class UniformQuadMesh {
  public:
    /// Throws std::invalid_argument for non-positive counts or extents.
    UniformQuadMesh(Point origin, double extent_x, double extent_y, int nx, int ny);

    int nx() const { return nx_; }
    int ny() const { return ny_; }
    Point origin() const { return origin_; }
    double cell_width_x() const { return wx_; }
    double cell_width_y() const { return wy_; }
    double extent_x() const { return wx_ * nx_; }
    double extent_y() const { return wy_ * ny_; }
    double cell_area() const { return wx_ * wy_; }

    int element_count() const { return nx_ * ny_; }
    int vertex_count() const { return (nx_ + 1) * (ny_ + 1); }
    int face_count() const { return nx_ * (ny_ + 1) + ny_ * (nx_ + 1); }
    int interior_face_count() const { return nx_ * (ny_ - 1) + (nx_ - 1) * ny_; }

    ElementId element_id(int i, int j) const { return i + nx_ * j; }
    std::array<int, 2> element_grid(ElementId e) const { return {e % nx_, e / nx_}; }

    VertexId vertex_id(int i, int j) const { return i + (nx_ + 1) * j; }
    std::array<int, 2> vertex_grid(VertexId v) const { return {v % (nx_ + 1), v / (nx_ + 1)}; }
    Point vertex(VertexId v) const;
    bool is_boundary_vertex(VertexId v) const;

    /// Lower-left corner of an element.
    Point element_origin(ElementId e) const;
    Point element_center(ElementId e) const;

    /// Corner vertices in the order (0,0), (1,0), (0,1), (1,1) relative to the
    /// element's lower-left corner.
    std::array<VertexId, 4> element_vertices(ElementId e) const;

    /// Faces in the order bottom, right, top, left.
    std::array<FaceId, 4> element_faces(ElementId e) const;

    FaceId horizontal_face_id(int i, int j) const { return i + nx_ * j; }
    FaceId vertical_face_id(int i, int j) const { return nx_ * (ny_ + 1) + i + (nx_ + 1) * j; }
    bool is_horizontal_face(FaceId f) const { return f < nx_ * (ny_ + 1); }

    bool is_boundary_face(FaceId f) const;

    /// Throws std::out_of_range for an invalid id.
    Point face_midpoint(FaceId f) const;

    /// The one or two elements incident to a face.
    std::vector<ElementId> face_elements(FaceId f) const;

    /// End vertices of a face.
    std::array<VertexId, 2> face_vertices(FaceId f) const;

    OppositeFacePairs opposite_face_pairs() const;

  private:
    void check_face(FaceId f) const;

    Point origin_;
    double wx_, wy_;
    int nx_, ny_;
};

}  // namespace nchmm

#endif
