#pragma once

#include <array>
#include <iosfwd>
#include <vector>

#include "fundtone/mesh.hpp"
#include "fundtone/spaceform.hpp"

namespace fundtone {

/// Curvature data at one vertex. Vectors are embedding-space tangent vectors
/// of the model at the vertex. The normal is oriented so that a convex closed
/// surface with outward-oriented faces has positive principal curvatures,
/// i.e. kappa_i are the eigenvalues of A = -D(eta) with eta pointing inward.
struct VertexCurvature {
    Vec normal;
    double kappa1 = 0.0;  ///< smaller principal curvature
    double kappa2 = 0.0;
    Vec e1;  ///< principal direction of kappa1
    Vec e2;  ///< principal direction of kappa2
};

/// Per-vertex principal curvatures, frames and the derived S_r and Newton
/// tensor eigenvalues of a surface (n = 2).
class CurvatureField {
public:
    /// Orders each vertex so that kappa1 <= kappa2 and checks the frame invariants.
    CurvatureField(const TriMesh& mesh, std::vector<VertexCurvature> data);

    int size() const noexcept { return static_cast<int>(data_.size()); }
    const VertexCurvature& at(int v) const { return data_[v]; }
    const std::vector<VertexCurvature>& data() const noexcept { return data_; }

    /// S_r at vertex v for r in {0, 1, 2}.
    double S(int v, int r) const;
    /// Eigenvalues of P_r along (e1, e2) at vertex v, r in {0, 1}.
    std::array<double, 2> newton_eigenvalues(int v, int r) const;

    /// CSV with header "vertex_id,kappa1,kappa2,S1,S2".
    void write_csv(std::ostream& os) const;

private:
    std::vector<VertexCurvature> data_;
    std::vector<std::array<double, 3>> s_;
};

struct SpectralExtrema {
    double mu = 0.0;  ///< inf over vertices of the smallest eigenvalue of P_r
    double nu = 0.0;  ///< sup over vertices of the largest eigenvalue of P_r
};

SpectralExtrema spectral_extrema(const TriMesh& mesh, const CurvatureField& cf, int r);

struct Ellipticity {
    bool elliptic = false;
    double margin = 0.0;
};

/// L_r is elliptic on the mesh iff the smallest Newton eigenvalue is positive.
Ellipticity check_ellipticity(const TriMesh& mesh, const CurvatureField& cf, int r);

/// sup |S_{r+1}| over vertices within ambient distance R of p.
double local_curvature_sup(const TriMesh& mesh, const CurvatureField& cf, const AmbientPoint& p, double R,
                           int r);

/// inf S_r over all vertices (or over `subset` when non-empty).
double inf_symmetric_function(const CurvatureField& cf, int r, const std::vector<int>& subset = {});
/// sup S_r over all vertices.
double sup_symmetric_function(const CurvatureField& cf, int r);

struct ExtrinsicRadius {
    double radius = 0.0;
    AmbientPoint center;
};

/// Smallest ambient radius of a geodesic ball containing every vertex of a
/// closed mesh, together with its center.
ExtrinsicRadius extrinsic_radius(const TriMesh& mesh);

/// Curvature from a least-squares quadric fit over the 2-ring (falls back to
/// the 3-ring when the fit is rank deficient). Euclidean meshes only.
CurvatureField estimate_curvature(const TriMesh& mesh);

/// Unit vectors (e1, e2) completing `normal` to an orthonormal frame of T_x.
std::array<Vec, 2> tangent_frame(const SpaceForm& space, const AmbientPoint& x, const Vec& normal);

}  // namespace fundtone
