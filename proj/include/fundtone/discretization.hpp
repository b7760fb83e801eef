#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <array>
#include <iosfwd>
#include <optional>
#include <vector>

#include "fundtone/geometry.hpp"
#include "fundtone/mesh.hpp"

namespace fundtone {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Symmetric endomorphism field of the tangent bundle, sampled at vertices.
/// Each matrix is expressed in the vertex frame (e1, e2).
class PhiField {
public:
    /// The identity; needs no frames.
    static PhiField identity(int num_vertices);
    /// Newton tensor P_r, diagonal in the principal frames of `cf`.
    static PhiField newton(const CurvatureField& cf, int r);
    /// Arbitrary matrices in the frames of `cf`; each must be symmetric to 1e-12.
    static PhiField custom(const CurvatureField& cf, std::vector<Eigen::Matrix2d> matrices);

    int size() const noexcept { return static_cast<int>(matrices_.size()); }
    bool is_identity() const noexcept { return identity_; }
    const Eigen::Matrix2d& matrix(int v) const { return matrices_[v]; }
    /// Frame (e1, e2) at v; empty vectors for the identity field.
    const std::array<Vec, 2>& frame(int v) const { return frames_[v]; }

    /// Smallest and largest eigenvalue of the matrix at v.
    std::array<double, 2> eigenvalues(int v) const;

private:
    PhiField() = default;

    bool identity_ = false;
    std::vector<Eigen::Matrix2d> matrices_;
    std::vector<std::array<Vec, 2>> frames_;
};

/// Global extrema of the eigenvalues of Phi over all vertices.
struct PhiExtrema {
    double mu = 0.0;
    double nu = 0.0;
};
PhiExtrema phi_extrema(const PhiField& phi);

/// Stiffness and mass matrices of the weak form of div(Phi grad f), possibly
/// reduced to the interior vertices.
struct OperatorPair {
    SparseMatrix K;
    SparseMatrix M;
    bool lumped = false;
    /// Number of vertices of the mesh the pair was assembled on.
    int full_size = 0;
    /// For a reduced pair, the mesh vertex of every unknown; empty otherwise.
    std::vector<int> dofs;

    bool reduced() const noexcept { return !dofs.empty(); }
    int size() const noexcept { return static_cast<int>(K.rows()); }
    /// Mesh-sized vector with zeros on removed vertices.
    Eigen::VectorXd reinsert(const Eigen::VectorXd& u) const;
};

struct AssemblyOptions {
    bool lumped_mass = false;
};

/// P1 finite element assembly. Every triangle is laid out in the plane with
/// its geodesic edge lengths, and the vertex matrices of Phi are carried into
/// the triangle frame by the closest rotation and averaged.
OperatorPair assemble(const TriMesh& mesh, const PhiField& phi, const AssemblyOptions& options = {});

/// Element Phi of face f in the frame (t1, t2) of its planar layout.
Eigen::Matrix2d element_phi(const TriMesh& mesh, const PhiField& phi, int f);

/// Extrema of the eigenvalues of the element matrices over all faces.
PhiExtrema element_phi_extrema(const TriMesh& mesh, const PhiField& phi);

/// Removes boundary rows and columns (homogeneous Dirichlet condition).
OperatorPair apply_dirichlet(const OperatorPair& op, const TriMesh& mesh);

/// MatrixMarket coordinate format, general real, 1-based indices.
void write_matrix_market(std::ostream& os, const SparseMatrix& A);

}  // namespace fundtone
