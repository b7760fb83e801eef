#include "fundtone/discretization.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include "fundtone/errors.hpp"

namespace fundtone {

PhiField PhiField::identity(int num_vertices) {
    PhiField phi;
    phi.identity_ = true;
    phi.matrices_.assign(num_vertices, Eigen::Matrix2d::Identity());
    phi.frames_.assign(num_vertices, {});
    return phi;
}

PhiField PhiField::newton(const CurvatureField& cf, int r) {
    std::vector<Eigen::Matrix2d> m(cf.size());
    for (int v = 0; v < cf.size(); ++v) {
        const auto mu = cf.newton_eigenvalues(v, r);
        m[v] = Eigen::Vector2d(mu[0], mu[1]).asDiagonal();
    }
    return custom(cf, std::move(m));
}

PhiField PhiField::custom(const CurvatureField& cf, std::vector<Eigen::Matrix2d> matrices) {
    if (static_cast<int>(matrices.size()) != cf.size()) {
        throw DomainError("Phi field size does not match the curvature field");
    }
    PhiField phi;
    phi.matrices_ = std::move(matrices);
    phi.frames_.resize(cf.size());
    bool identity = true;
    for (int v = 0; v < cf.size(); ++v) {
        const Eigen::Matrix2d& a = phi.matrices_[v];
        if (!a.allFinite() || std::abs(a(0, 1) - a(1, 0)) > 1e-12) {
            std::ostringstream os;
            os << "Phi at vertex " << v << " is not a finite symmetric matrix";
            throw DomainError(os.str());
        }
        identity = identity && a == Eigen::Matrix2d::Identity();
        phi.frames_[v] = {cf.at(v).e1, cf.at(v).e2};
    }
    phi.identity_ = identity;
    return phi;
}

std::array<double, 2> PhiField::eigenvalues(int v) const {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(matrices_[v], Eigen::EigenvaluesOnly);
    return {es.eigenvalues()[0], es.eigenvalues()[1]};
}

PhiExtrema phi_extrema(const PhiField& phi) {
    PhiExtrema ex{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (int v = 0; v < phi.size(); ++v) {
        const auto e = phi.eigenvalues(v);
        ex.mu = std::min(ex.mu, e[0]);
        ex.nu = std::max(ex.nu, e[1]);
    }
    return ex;
}

Eigen::VectorXd OperatorPair::reinsert(const Eigen::VectorXd& u) const {
    if (u.size() != size()) {
        throw DomainError("vector size does not match the operator");
    }
    if (!reduced()) {
        return u;
    }
    Eigen::VectorXd full = Eigen::VectorXd::Zero(full_size);
    for (int i = 0; i < size(); ++i) {
        full[dofs[i]] = u[i];
    }
    return full;
}

namespace {

struct ElementGeometry {
    PlanarTriangle tri;
    Eigen::Matrix<double, 2, 3> grads;  // columns: gradients of the hat functions
};

ElementGeometry element_geometry(const TriMesh& mesh, int f) {
    const Face& t = mesh.faces()[f];
    ElementGeometry g;
    try {
        g.tri = layout_triangle(mesh.edge_length(t[0], t[1]), mesh.edge_length(t[0], t[2]),
                                mesh.edge_length(t[1], t[2]));
    } catch (const AssemblyError& e) {
        std::ostringstream os;
        os << "face " << f << " (" << t[0] << ", " << t[1] << ", " << t[2] << "): " << e.what();
        throw AssemblyError(os.str());
    }
    if (!(g.tri.area >= 1e-14)) {
        std::ostringstream os;
        os << "face " << f << " (" << t[0] << ", " << t[1] << ", " << t[2] << ") is degenerate, area "
           << g.tri.area;
        throw AssemblyError(os.str());
    }
    Eigen::Matrix2d J;
    J.col(0) = g.tri.p[1] - g.tri.p[0];
    J.col(1) = g.tri.p[2] - g.tri.p[0];
    const Eigen::Matrix2d Jit = J.inverse().transpose();
    g.grads.col(1) = Jit.col(0);
    g.grads.col(2) = Jit.col(1);
    g.grads.col(0) = -g.grads.col(1) - g.grads.col(2);
    return g;
}

// Orthonormal frame (t1, t2) of the triangle plane matching its planar
// layout: t1 along x1 - x0 and t2 toward x2.
std::array<Vec, 2> triangle_frame(const TriMesh& mesh, const Face& t) {
    const SpaceForm& sf = mesh.space();
    const Vec& x0 = mesh.vertex(t[0]).coords;
    Vec t1 = mesh.vertex(t[1]).coords - x0;
    t1 /= sf.norm(t1);
    Vec t2 = mesh.vertex(t[2]).coords - x0;
    t2 -= sf.inner(t2, t1) * t1;
    t2 /= sf.norm(t2);
    return {t1, t2};
}

Eigen::Matrix2d element_phi_impl(const TriMesh& mesh, const PhiField& phi, int f) {
    if (phi.is_identity()) {
        return Eigen::Matrix2d::Identity();
    }
    const SpaceForm& sf = mesh.space();
    const Face& t = mesh.faces()[f];
    const auto tf = triangle_frame(mesh, t);
    Eigen::Matrix2d sum = Eigen::Matrix2d::Zero();
    for (int v : t) {
        const auto& e = phi.frame(v);
        Eigen::Matrix2d Q;
        for (int a = 0; a < 2; ++a) {
            for (int b = 0; b < 2; ++b) {
                Q(a, b) = sf.inner(e[a], tf[b]);
            }
        }
        // Closest orthogonal map (polar factor) from triangle to vertex frame.
        Eigen::JacobiSVD<Eigen::Matrix2d> svd(Q, Eigen::ComputeFullU | Eigen::ComputeFullV);
        const Eigen::Matrix2d R = svd.matrixU() * svd.matrixV().transpose();
        sum += R.transpose() * phi.matrix(v) * R;
    }
    sum /= 3.0;
    return 0.5 * (sum + sum.transpose());
}

}  // namespace

Eigen::Matrix2d element_phi(const TriMesh& mesh, const PhiField& phi, int f) {
    return element_phi_impl(mesh, phi, f);
}

PhiExtrema element_phi_extrema(const TriMesh& mesh, const PhiField& phi) {
    PhiExtrema ex{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (int f = 0; f < mesh.num_faces(); ++f) {
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(element_phi_impl(mesh, phi, f), Eigen::EigenvaluesOnly);
        ex.mu = std::min(ex.mu, es.eigenvalues()[0]);
        ex.nu = std::max(ex.nu, es.eigenvalues()[1]);
    }
    return ex;
}

OperatorPair assemble(const TriMesh& mesh, const PhiField& phi, const AssemblyOptions& options) {
    if (phi.size() != mesh.num_vertices()) {
        throw DomainError("Phi field size does not match the mesh");
    }
    const int n = mesh.num_vertices();
    std::vector<Eigen::Triplet<double>> kt;
    std::vector<Eigen::Triplet<double>> mt;
    kt.reserve(9 * mesh.num_faces());
    mt.reserve(9 * mesh.num_faces());
    for (int f = 0; f < mesh.num_faces(); ++f) {
        const Face& t = mesh.faces()[f];
        const ElementGeometry g = element_geometry(mesh, f);
        const Eigen::Matrix2d P = element_phi_impl(mesh, phi, f);
        const Eigen::Matrix3d Ke = g.tri.area * g.grads.transpose() * P * g.grads;
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                kt.emplace_back(t[i], t[j], Ke(i, j));
                if (options.lumped_mass) {
                    if (i == j) {
                        mt.emplace_back(t[i], t[i], g.tri.area / 3.0);
                    }
                } else {
                    mt.emplace_back(t[i], t[j], g.tri.area / 12.0 * (i == j ? 2.0 : 1.0));
                }
            }
        }
    }
    OperatorPair op;
    op.K.resize(n, n);
    op.M.resize(n, n);
    op.K.setFromTriplets(kt.begin(), kt.end());
    op.M.setFromTriplets(mt.begin(), mt.end());
    // Exact symmetry regardless of summation order.
    SparseMatrix Kt = op.K.transpose();
    op.K = 0.5 * (op.K + Kt);
    op.K.makeCompressed();
    op.M.makeCompressed();
    op.lumped = options.lumped_mass;
    op.full_size = n;
    return op;
}

OperatorPair apply_dirichlet(const OperatorPair& op, const TriMesh& mesh) {
    if (op.reduced()) {
        throw DomainError("operator pair is already reduced");
    }
    if (op.full_size != mesh.num_vertices()) {
        throw DomainError("operator pair does not belong to this mesh");
    }
    if (mesh.is_closed()) {
        throw DomainError("Dirichlet condition needs a boundary; the mesh is closed");
    }
    std::vector<int> dofs;
    std::vector<int> index(mesh.num_vertices(), -1);
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        if (!mesh.boundary_flags()[v]) {
            index[v] = static_cast<int>(dofs.size());
            dofs.push_back(v);
        }
    }
    if (dofs.empty()) {
        throw DomainError("mesh has no interior vertex");
    }
    auto restrict = [&](const SparseMatrix& A) {
        std::vector<Eigen::Triplet<double>> trip;
        for (int k = 0; k < A.outerSize(); ++k) {
            for (SparseMatrix::InnerIterator it(A, k); it; ++it) {
                const int i = index[it.row()];
                const int j = index[it.col()];
                if (i >= 0 && j >= 0) {
                    trip.emplace_back(i, j, it.value());
                }
            }
        }
        SparseMatrix R(static_cast<int>(dofs.size()), static_cast<int>(dofs.size()));
        R.setFromTriplets(trip.begin(), trip.end());
        return R;
    };
    OperatorPair out;
    out.K = restrict(op.K);
    out.M = restrict(op.M);
    out.lumped = op.lumped;
    out.full_size = op.full_size;
    out.dofs = std::move(dofs);
    return out;
}

void write_matrix_market(std::ostream& os, const SparseMatrix& A) {
    os << "%%MatrixMarket matrix coordinate real general\n";
    os << A.rows() << ' ' << A.cols() << ' ' << A.nonZeros() << '\n';
    const auto old = os.precision(17);
    for (int k = 0; k < A.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(A, k); it; ++it) {
            os << it.row() + 1 << ' ' << it.col() + 1 << ' ' << it.value() << '\n';
        }
    }
    os.precision(old);
}

}  // namespace fundtone
