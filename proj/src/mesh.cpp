#include "fundtone/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <unordered_map>

#include "fundtone/errors.hpp"

namespace fundtone {

namespace {

std::int64_t edge_key(int i, int j, int n) { return static_cast<std::int64_t>(i) * n + j; }

}  // namespace

TriMesh::TriMesh(SpaceForm space, std::vector<AmbientPoint> vertices, std::vector<Face> faces)
    : space_(space), vertices_(std::move(vertices)), faces_(std::move(faces)) {
    if (space_.ambient_dim() != 3) {
        throw DomainError("triangle meshes live in three-dimensional space forms");
    }
    const int nv = num_vertices();
    for (const auto& v : vertices_) {
        space_.validate(v, 1e-10);
    }

    std::unordered_map<std::int64_t, int> directed;
    directed.reserve(faces_.size() * 3);
    for (int f = 0; f < num_faces(); ++f) {
        const Face& t = faces_[f];
        for (int k = 0; k < 3; ++k) {
            if (t[k] < 0 || t[k] >= nv) {
                std::ostringstream os;
                os << "face " << f << " references vertex " << t[k] << " out of range";
                throw DomainError(os.str());
            }
        }
        if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) {
            std::ostringstream os;
            os << "face " << f << " repeats a vertex";
            throw DomainError(os.str());
        }
        for (int k = 0; k < 3; ++k) {
            const int a = t[k];
            const int b = t[(k + 1) % 3];
            if (++directed[edge_key(a, b, nv)] > 1) {
                std::ostringstream os;
                os << "edge (" << a << ", " << b << ") appears twice with the same direction; "
                   << "orientation is inconsistent or the mesh is non-manifold";
                throw DomainError(os.str());
            }
        }
    }

    boundary_.assign(nv, false);
    neighbors_.assign(nv, {});
    for (const auto& [key, count] : directed) {
        (void)count;
        const int a = static_cast<int>(key / nv);
        const int b = static_cast<int>(key % nv);
        const bool twin = directed.count(edge_key(b, a, nv)) > 0;
        if (!twin) {
            boundary_[a] = true;
            boundary_[b] = true;
        }
        if (a < b || !twin) {
            edges_.emplace_back(std::min(a, b), std::max(a, b));
        }
    }
    std::sort(edges_.begin(), edges_.end());
    for (const auto& [a, b] : edges_) {
        neighbors_[a].push_back(b);
        neighbors_[b].push_back(a);
    }
    for (auto& nb : neighbors_) {
        std::sort(nb.begin(), nb.end());
    }
}

int TriMesh::num_boundary_vertices() const noexcept {
    return static_cast<int>(std::count(boundary_.begin(), boundary_.end(), true));
}

double TriMesh::edge_length(int i, int j) const { return space_.distance(vertices_[i], vertices_[j]); }

PlanarTriangle layout_triangle(double l01, double l02, double l12) {
    if (!(l01 > 0.0) || !(l02 > 0.0) || !(l12 > 0.0)) {
        throw AssemblyError("triangle has a non-positive edge length");
    }
    if (l01 + l02 < l12 || l01 + l12 < l02 || l02 + l12 < l01) {
        throw AssemblyError("edge lengths violate the triangle inequality");
    }
    const double x = (l01 * l01 + l02 * l02 - l12 * l12) / (2.0 * l01);
    const double y = std::sqrt(std::max(0.0, l02 * l02 - x * x));
    PlanarTriangle tri;
    tri.p[0] = {0.0, 0.0};
    tri.p[1] = {l01, 0.0};
    tri.p[2] = {x, y};
    tri.area = 0.5 * l01 * y;
    return tri;
}

double TriMesh::face_area(int f) const {
    const Face& t = faces_[f];
    return layout_triangle(edge_length(t[0], t[1]), edge_length(t[0], t[2]), edge_length(t[1], t[2])).area;
}

double TriMesh::total_area() const {
    double a = 0.0;
    for (int f = 0; f < num_faces(); ++f) {
        a += face_area(f);
    }
    return a;
}

double TriMesh::max_edge_length() const {
    double h = 0.0;
    for (const auto& [a, b] : edges_) {
        h = std::max(h, edge_length(a, b));
    }
    return h;
}

std::vector<int> TriMesh::k_ring(int v, int rings) const {
    std::vector<int> frontier{v};
    std::vector<char> seen(vertices_.size(), 0);
    seen[v] = 1;
    std::vector<int> out;
    for (int r = 0; r < rings; ++r) {
        std::vector<int> next;
        for (int u : frontier) {
            for (int w : neighbors_[u]) {
                if (!seen[w]) {
                    seen[w] = 1;
                    next.push_back(w);
                    out.push_back(w);
                }
            }
        }
        frontier = std::move(next);
    }
    std::sort(out.begin(), out.end());
    return out;
}

TriMesh TriMesh::submesh(const std::function<bool(int)>& keep, std::vector<int>* vertex_map) const {
    std::vector<int> remap(vertices_.size(), -1);
    std::vector<int> old_of_new;
    std::vector<Face> faces;
    for (int f = 0; f < num_faces(); ++f) {
        if (!keep(f)) {
            continue;
        }
        Face t = faces_[f];
        for (int& v : t) {
            if (remap[v] < 0) {
                remap[v] = static_cast<int>(old_of_new.size());
                old_of_new.push_back(v);
            }
            v = remap[v];
        }
        faces.push_back(t);
    }
    std::vector<AmbientPoint> verts;
    verts.reserve(old_of_new.size());
    for (int v : old_of_new) {
        verts.push_back(vertices_[v]);
    }
    if (vertex_map) {
        *vertex_map = old_of_new;
    }
    return TriMesh(space_, std::move(verts), std::move(faces));
}

TriMesh TriMesh::scaled(double factor) const {
    if (space_.curvature() != 0) {
        throw DomainError("only Euclidean meshes can be scaled");
    }
    std::vector<AmbientPoint> verts = vertices_;
    for (auto& v : verts) {
        v.coords *= factor;
    }
    return TriMesh(space_, std::move(verts), faces_);
}

}  // namespace fundtone
