#pragma once

#include <array>
#include <functional>
#include <utility>
#include <vector>

#include "fundtone/spaceform.hpp"

namespace fundtone {

using Face = std::array<int, 3>;

/// Triangulated surface in a three-dimensional space form.
///
/// Construction validates the topology: faces reference distinct valid
/// vertices, every interior edge is shared by exactly two faces with opposite
/// orientation, and boundary flags are derived from edge incidence.
class TriMesh {
public:
    TriMesh(SpaceForm space, std::vector<AmbientPoint> vertices, std::vector<Face> faces);

    const SpaceForm& space() const noexcept { return space_; }
    const std::vector<AmbientPoint>& vertices() const noexcept { return vertices_; }
    const std::vector<Face>& faces() const noexcept { return faces_; }
    const std::vector<bool>& boundary_flags() const noexcept { return boundary_; }

    int num_vertices() const noexcept { return static_cast<int>(vertices_.size()); }
    int num_faces() const noexcept { return static_cast<int>(faces_.size()); }
    int num_edges() const noexcept { return static_cast<int>(edges_.size()); }
    int num_boundary_vertices() const noexcept;
    bool is_closed() const noexcept { return num_boundary_vertices() == 0; }
    int euler_characteristic() const noexcept { return num_vertices() - num_edges() + num_faces(); }

    const AmbientPoint& vertex(int i) const { return vertices_[i]; }
    /// Undirected edges (i < j), sorted.
    const std::vector<std::pair<int, int>>& edges() const noexcept { return edges_; }
    /// Vertex neighbours (1-ring), sorted.
    const std::vector<std::vector<int>>& neighbors() const noexcept { return neighbors_; }

    /// Geodesic edge length in the ambient space form.
    double edge_length(int i, int j) const;
    /// Area of the flat triangle with the geodesic edge lengths of face f.
    double face_area(int f) const;
    double total_area() const;
    /// Longest geodesic edge length.
    double max_edge_length() const;

    /// Vertices within `rings` edge hops of v, excluding v itself.
    std::vector<int> k_ring(int v, int rings) const;

    /// Mesh made of the faces satisfying `keep`, with unused vertices dropped.
    /// `vertex_map` (if given) receives, for every new vertex, its old index.
    TriMesh submesh(const std::function<bool(int face)>& keep, std::vector<int>* vertex_map = nullptr) const;

    /// Same connectivity with every coordinate multiplied by `factor` (c = 0 only).
    TriMesh scaled(double factor) const;

private:
    SpaceForm space_;
    std::vector<AmbientPoint> vertices_;
    std::vector<Face> faces_;
    std::vector<bool> boundary_;
    std::vector<std::pair<int, int>> edges_;
    std::vector<std::vector<int>> neighbors_;
};

/// Side lengths (l01, l02, l12) laid out in the plane: v0 at the origin, v1 on
/// the positive x axis and v2 in the upper half plane.
struct PlanarTriangle {
    std::array<Eigen::Vector2d, 3> p;
    double area = 0.0;
};

/// Throws AssemblyError when the lengths violate the triangle inequality.
PlanarTriangle layout_triangle(double l01, double l02, double l12);

}  // namespace fundtone
