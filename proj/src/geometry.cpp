#include "fundtone/geometry.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include "fundtone/algebra.hpp"
#include "fundtone/errors.hpp"

namespace fundtone {

namespace {

void check_r(int r, int max_r) {
    if (r < 0 || r > max_r) {
        std::ostringstream os;
        os << "curvature index r=" << r << " out of range [0, " << max_r << "]";
        throw DomainError(os.str());
    }
}

}  // namespace

std::array<Vec, 2> tangent_frame(const SpaceForm& space, const AmbientPoint& x, const Vec& normal) {
    const int dim = space.embedding_dim();
    const double nn = space.inner(normal, normal);
    auto strip = [&](Vec v) {
        v = space.tangent_project(x, v);
        v -= (space.inner(v, normal) / nn) * normal;
        return v;
    };
    Vec best;
    double best_norm = -1.0;
    for (int k = 0; k < dim; ++k) {
        Vec v = strip(Vec::Unit(dim, k));
        const double n = space.norm(v);
        if (n > best_norm + 1e-12) {
            best_norm = n;
            best = v / n;
        }
    }
    Vec second;
    double second_norm = -1.0;
    for (int k = 0; k < dim; ++k) {
        Vec v = strip(Vec::Unit(dim, k));
        v -= space.inner(v, best) * best;
        const double n = space.norm(v);
        if (n > second_norm + 1e-12) {
            second_norm = n;
            second = v / n;
        }
    }
    return {best, second};
}

CurvatureField::CurvatureField(const TriMesh& mesh, std::vector<VertexCurvature> data) : data_(std::move(data)) {
    if (static_cast<int>(data_.size()) != mesh.num_vertices()) {
        throw DomainError("curvature field size does not match the mesh");
    }
    const SpaceForm& sf = mesh.space();
    s_.resize(data_.size());
    for (std::size_t v = 0; v < data_.size(); ++v) {
        VertexCurvature& d = data_[v];
        if (d.kappa1 > d.kappa2) {
            std::swap(d.kappa1, d.kappa2);
            std::swap(d.e1, d.e2);
        }
        const auto& x = mesh.vertex(static_cast<int>(v));
        const double tol = 1e-8;
        const bool ok = std::abs(sf.inner(d.normal, d.normal) - 1.0) <= 1e-10 &&
                        std::abs(sf.inner(d.e1, d.e1) - 1.0) <= tol && std::abs(sf.inner(d.e2, d.e2) - 1.0) <= tol &&
                        std::abs(sf.inner(d.e1, d.e2)) <= tol && std::abs(sf.inner(d.e1, d.normal)) <= tol &&
                        std::abs(sf.inner(d.e2, d.normal)) <= tol &&
                        (sf.curvature() == 0 ||
                         (std::abs(sf.inner(d.normal, x.coords)) <= tol && std::abs(sf.inner(d.e1, x.coords)) <= tol &&
                          std::abs(sf.inner(d.e2, x.coords)) <= tol));
        if (!ok || !std::isfinite(d.kappa1) || !std::isfinite(d.kappa2)) {
            std::ostringstream os;
            os << "curvature frame at vertex " << v << " is not an orthonormal tangent frame";
            throw DomainError(os.str());
        }
        const std::array<double, 2> k{d.kappa1, d.kappa2};
        const auto s = symmetric_functions<double>(std::span<const double>(k));
        s_[v] = {s[0], s[1], s[2]};
    }
}

double CurvatureField::S(int v, int r) const {
    check_r(r, 2);
    return s_[v][r];
}

std::array<double, 2> CurvatureField::newton_eigenvalues(int v, int r) const {
    check_r(r, 1);
    const std::array<double, 2> k{data_[v].kappa1, data_[v].kappa2};
    const auto mu = fundtone::newton_eigenvalues<double>(std::span<const double>(k), r);
    return {mu[0], mu[1]};
}

void CurvatureField::write_csv(std::ostream& os) const {
    os << "vertex_id,kappa1,kappa2,S1,S2\n";
    os.precision(12);
    for (int v = 0; v < size(); ++v) {
        os << v << ',' << data_[v].kappa1 << ',' << data_[v].kappa2 << ',' << s_[v][1] << ',' << s_[v][2] << '\n';
    }
}

SpectralExtrema spectral_extrema(const TriMesh& mesh, const CurvatureField& cf, int r) {
    if (mesh.num_vertices() == 0) {
        throw DomainError("spectral extrema of an empty mesh");
    }
    SpectralExtrema ex{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        const auto mu = cf.newton_eigenvalues(v, r);
        ex.mu = std::min({ex.mu, mu[0], mu[1]});
        ex.nu = std::max({ex.nu, mu[0], mu[1]});
    }
    return ex;
}

Ellipticity check_ellipticity(const TriMesh& mesh, const CurvatureField& cf, int r) {
    const double mu = spectral_extrema(mesh, cf, r).mu;
    return {mu > 0.0, mu};
}

double local_curvature_sup(const TriMesh& mesh, const CurvatureField& cf, const AmbientPoint& p, double R, int r) {
    check_r(r, 1);
    if (!(R > 0.0)) {
        throw DomainError("ball radius must be positive");
    }
    const SpaceForm& sf = mesh.space();
    double sup = -1.0;
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        if (sf.distance(p, mesh.vertex(v)) <= R * (1.0 + 1e-12)) {
            sup = std::max(sup, std::abs(cf.S(v, r + 1)));
        }
    }
    if (sup < 0.0) {
        throw DomainError("no mesh vertex lies in the ball");
    }
    return sup;
}

double inf_symmetric_function(const CurvatureField& cf, int r, const std::vector<int>& subset) {
    double inf = std::numeric_limits<double>::infinity();
    if (subset.empty()) {
        for (int v = 0; v < cf.size(); ++v) {
            inf = std::min(inf, cf.S(v, r));
        }
    } else {
        for (int v : subset) {
            inf = std::min(inf, cf.S(v, r));
        }
    }
    return inf;
}

double sup_symmetric_function(const CurvatureField& cf, int r) {
    double sup = -std::numeric_limits<double>::infinity();
    for (int v = 0; v < cf.size(); ++v) {
        sup = std::max(sup, cf.S(v, r));
    }
    return sup;
}

namespace {

// Outward (orientation-induced) area-weighted vertex normals of a Euclidean mesh.
std::vector<Eigen::Vector3d> oriented_vertex_normals(const TriMesh& mesh) {
    std::vector<Eigen::Vector3d> normals(mesh.num_vertices(), Eigen::Vector3d::Zero());
    for (const Face& f : mesh.faces()) {
        const Eigen::Vector3d a = mesh.vertex(f[0]).coords;
        const Eigen::Vector3d b = mesh.vertex(f[1]).coords;
        const Eigen::Vector3d c = mesh.vertex(f[2]).coords;
        const Eigen::Vector3d n = (b - a).cross(c - a);  // |n| = 2 * area
        for (int v : f) {
            normals[v] += n;
        }
    }
    return normals;
}

bool fit_shape_operator(const TriMesh& mesh, int v, const std::vector<int>& ring, const Eigen::Vector3d& n,
                        const Eigen::Vector3d& t1, const Eigen::Vector3d& t2, VertexCurvature& out) {
    if (ring.size() < 5) {
        return false;
    }
    const Eigen::Vector3d x0 = mesh.vertex(v).coords;
    Eigen::MatrixXd A(ring.size(), 5);
    Eigen::VectorXd w(ring.size());
    double scale = 0.0;
    for (int j : ring) {
        scale = std::max(scale, (Eigen::Vector3d(mesh.vertex(j).coords) - x0).norm());
    }
    for (std::size_t k = 0; k < ring.size(); ++k) {
        const Eigen::Vector3d d = (Eigen::Vector3d(mesh.vertex(ring[k]).coords) - x0) / scale;
        const double u = d.dot(t1);
        const double s = d.dot(t2);
        A.row(k) << u * u, u * s, s * s, u, s;
        w[k] = d.dot(n);
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    qr.setThreshold(1e-10);
    if (qr.rank() < 5) {
        return false;
    }
    const Eigen::VectorXd c = qr.solve(w);
    // Undo the coordinate scaling: second derivatives scale by 1/scale.
    const double fu = c[3];
    const double fv = c[4];
    const double fuu = 2.0 * c[0] / scale;
    const double fuv = c[1] / scale;
    const double fvv = 2.0 * c[2] / scale;
    Eigen::Matrix2d first;
    first << 1.0 + fu * fu, fu * fv, fu * fv, 1.0 + fv * fv;
    Eigen::Matrix2d second;
    second << fuu, fuv, fuv, fvv;
    second /= std::sqrt(1.0 + fu * fu + fv * fv);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::Matrix2d> es(second, first);
    if (es.info() != Eigen::Success) {
        return false;
    }
    const Eigen::Vector2d dir = es.eigenvectors().col(0).normalized();
    const Eigen::Vector3d e1 = (dir[0] * t1 + dir[1] * t2).normalized();
    const Eigen::Vector3d e2 = n.cross(e1);
    out.normal = n;
    out.kappa1 = es.eigenvalues()[0];
    out.kappa2 = es.eigenvalues()[1];
    out.e1 = e1;
    out.e2 = e2;
    return true;
}

}  // namespace

CurvatureField estimate_curvature(const TriMesh& mesh) {
    if (mesh.space().curvature() != 0) {
        throw DomainError("curvature estimation is implemented for Euclidean meshes only");
    }
    const auto normals = oriented_vertex_normals(mesh);
    std::vector<VertexCurvature> data(mesh.num_vertices());
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        if (normals[v].norm() == 0.0) {
            std::ostringstream os;
            os << "vertex " << v << " has no incident area";
            throw DomainError(os.str());
        }
        const Eigen::Vector3d n = -normals[v].normalized();
        const auto frame = tangent_frame(mesh.space(), mesh.vertex(v), n);
        const Eigen::Vector3d t1 = frame[0];
        const Eigen::Vector3d t2 = n.cross(t1);
        bool ok = fit_shape_operator(mesh, v, mesh.k_ring(v, 2), n, t1, t2, data[v]);
        if (!ok) {
            ok = fit_shape_operator(mesh, v, mesh.k_ring(v, 3), n, t1, t2, data[v]);
        }
        if (!ok) {
            std::ostringstream os;
            os << "quadric fit at vertex " << v << " is rank deficient even on the 3-ring";
            throw DomainError(os.str());
        }
    }
    return CurvatureField(mesh, std::move(data));
}

}  // namespace fundtone
