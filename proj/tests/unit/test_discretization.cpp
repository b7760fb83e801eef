#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include "doctest.h"
#include "fundtone/discretization.hpp"
#include "fundtone/errors.hpp"
#include "fundtone/surfaces.hpp"

using namespace fundtone;

namespace {

Vec p3(double x, double y, double z) {
    Vec v(3);
    v << x, y, z;
    return v;
}

Eigen::MatrixXd dense(const SparseMatrix& A) { return Eigen::MatrixXd(A); }

SurfaceParams ellipsoid(double a, double b, double c) {
    SurfaceParams p;
    p.axis_a = a;
    p.axis_b = b;
    p.axis_c = c;
    return p;
}

}  // namespace

TEST_CASE("right triangle reproduces cotangent weights") {
    const TriMesh mesh(SpaceForm::euclidean(), {{p3(0, 0, 0)}, {p3(1, 0, 0)}, {p3(0, 1, 0)}}, {{0, 1, 2}});
    const auto op = assemble(mesh, PhiField::identity(3));
    const auto K = dense(op.K);
    // Off-diagonal entry (i, j) is -cot(angle opposite the edge) / 2.
    CHECK(K(0, 1) == doctest::Approx(-0.5));
    CHECK(K(0, 2) == doctest::Approx(-0.5));
    CHECK(std::abs(K(1, 2)) < 1e-15);
    CHECK(K(0, 0) == doctest::Approx(1.0));
    CHECK(K(1, 1) == doctest::Approx(0.5));
    const auto M = dense(op.M);
    CHECK(M(0, 0) == doctest::Approx(1.0 / 12.0));
    CHECK(M(0, 1) == doctest::Approx(1.0 / 24.0));
    const auto lumped = assemble(mesh, PhiField::identity(3), {.lumped_mass = true});
    CHECK(dense(lumped.M).rowwise().sum().isApprox(Eigen::Vector3d::Constant(1.0 / 6.0)));
}

TEST_CASE("degenerate faces are rejected with the face index") {
    const TriMesh mesh(SpaceForm::euclidean(), {{p3(0, 0, 0)}, {p3(1, 0, 0)}, {p3(2, 0, 0)}}, {{0, 1, 2}});
    try {
        assemble(mesh, PhiField::identity(3));
        FAIL("expected an AssemblyError");
    } catch (const AssemblyError& e) {
        CHECK(std::string(e.what()).find("face 0") != std::string::npos);
    }
}

TEST_CASE("closed mesh: constants are in the kernel, matrices symmetric") {
    const auto s = builtin_surface(Family::RoundSphere, {}, 3);
    const auto op = assemble(s.mesh, PhiField::identity(s.mesh.num_vertices()));
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(op.size());
    CHECK((op.K * ones).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((dense(op.K) - dense(op.K).transpose()).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((op.M * ones).sum() == doctest::Approx(s.mesh.total_area()).epsilon(1e-12));
    const auto ell = builtin_surface(Family::Ellipsoid, ellipsoid(1, 1.2, 1.5), 2);
    const auto p1 = assemble(ell.mesh, PhiField::newton(ell.curvature, 1));
    CHECK((p1.K * Eigen::VectorXd::Ones(p1.size())).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("Newton tensor of the unit sphere assembles to the Laplacian") {
    const auto s = builtin_surface(Family::RoundSphere, {}, 3);
    const auto lap = assemble(s.mesh, PhiField::identity(s.mesh.num_vertices()));
    const auto p1 = assemble(s.mesh, PhiField::newton(s.curvature, 1));
    CHECK((dense(lap.K) - dense(p1.K)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("scalar Phi scales the stiffness matrix") {
    const auto s = builtin_surface(Family::Ellipsoid, ellipsoid(1, 1, 1.5), 2);
    std::vector<Eigen::Matrix2d> three(s.mesh.num_vertices(), 3.0 * Eigen::Matrix2d::Identity());
    const auto k3 = assemble(s.mesh, PhiField::custom(s.curvature, three));
    const auto k1 = assemble(s.mesh, PhiField::identity(s.mesh.num_vertices()));
    CHECK((dense(k3.K) - 3.0 * dense(k1.K)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("quadratic form sandwich on random vectors") {
    const auto s = builtin_surface(Family::Ellipsoid, ellipsoid(1, 1.3, 2), 3);
    const auto phi = PhiField::newton(s.curvature, 1);
    const auto kphi = assemble(s.mesh, phi);
    const auto kid = assemble(s.mesh, PhiField::identity(s.mesh.num_vertices()));
    const auto ex = element_phi_extrema(s.mesh, phi);
    const auto vx = phi_extrema(phi);
    CHECK(ex.mu >= vx.mu - 1e-12);
    CHECK(ex.nu <= vx.nu + 1e-12);
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g;
    for (int t = 0; t < 50; ++t) {
        Eigen::VectorXd u(kphi.size());
        for (int i = 0; i < u.size(); ++i) {
            u[i] = g(rng);
        }
        const double qp = u.dot(kphi.K * u);
        const double qi = u.dot(kid.K * u);
        CHECK(qp >= ex.mu * qi * (1 - 1e-12));
        CHECK(qp <= ex.nu * qi * (1 + 1e-12));
    }
}

TEST_CASE("assembly is invariant under relabeling and face rotation") {
    const auto s = builtin_surface(Family::Ellipsoid, ellipsoid(1, 1.3, 2), 1);
    const int n = s.mesh.num_vertices();
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) {
        perm[i] = (5 * i + 3) % n;
    }
    REQUIRE(std::gcd(5, n) == 1);
    std::vector<AmbientPoint> pts(n);
    std::vector<VertexCurvature> curv(n);
    for (int i = 0; i < n; ++i) {
        pts[perm[i]] = s.mesh.vertex(i);
        curv[perm[i]] = s.curvature.at(i);
    }
    std::vector<Face> faces;
    for (const Face& f : s.mesh.faces()) {
        faces.push_back({perm[f[1]], perm[f[2]], perm[f[0]]});
    }
    const TriMesh mesh2(s.mesh.space(), pts, faces);
    const CurvatureField cf2(mesh2, curv);
    const auto a = dense(assemble(s.mesh, PhiField::newton(s.curvature, 1)).K);
    const auto b = dense(assemble(mesh2, PhiField::newton(cf2, 1)).K);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            CHECK(std::abs(a(i, j) - b(perm[i], perm[j])) < 1e-12);
        }
    }
    // Reversed orientation gives the same matrices.
    std::vector<Face> flipped;
    for (const Face& f : s.mesh.faces()) {
        flipped.push_back({f[0], f[2], f[1]});
    }
    const TriMesh mesh3(s.mesh.space(), s.mesh.vertices(), flipped);
    const CurvatureField cf3(mesh3, s.curvature.data());
    const auto c = dense(assemble(mesh3, PhiField::newton(cf3, 1)).K);
    CHECK((a - c).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("Dirichlet reduction") {
    SurfaceParams p;
    p.rings = 2;
    const auto d = builtin_surface(Family::PlaneDisk, p, 0);
    REQUIRE(d.mesh.num_vertices() == 19);
    REQUIRE(d.mesh.num_boundary_vertices() == 12);
    const auto op = apply_dirichlet(assemble(d.mesh, PhiField::identity(19)), d.mesh);
    CHECK(op.size() == 7);
    CHECK(op.M.rows() == 7);
    const Eigen::VectorXd full = op.reinsert(Eigen::VectorXd::Ones(7));
    for (int v = 0; v < 19; ++v) {
        CHECK(full[v] == (d.mesh.boundary_flags()[v] ? 0.0 : 1.0));
    }
    const auto s = builtin_surface(Family::RoundSphere, {}, 1);
    CHECK_THROWS_AS(apply_dirichlet(assemble(s.mesh, PhiField::identity(s.mesh.num_vertices())), s.mesh),
                    DomainError);
    SurfaceParams one;
    one.rings = 1;
    const auto tiny = builtin_surface(Family::PlaneDisk, one, 0);
    const auto rim = tiny.mesh.submesh([](int f) { return f < 2; });
    CHECK_THROWS_AS(apply_dirichlet(assemble(rim, PhiField::identity(rim.num_vertices())), rim), DomainError);
}

TEST_CASE("MatrixMarket export") {
    const TriMesh mesh(SpaceForm::euclidean(), {{p3(0, 0, 0)}, {p3(1, 0, 0)}, {p3(0, 1, 0)}}, {{0, 1, 2}});
    std::ostringstream os;
    write_matrix_market(os, assemble(mesh, PhiField::identity(3)).M);
    std::istringstream is(os.str());
    std::string header;
    std::getline(is, header);
    CHECK(header == "%%MatrixMarket matrix coordinate real general");
    int r = 0, c = 0, nnz = 0;
    is >> r >> c >> nnz;
    CHECK(r == 3);
    CHECK(c == 3);
    CHECK(nnz == 9);
    int i = 0, j = 0;
    double v = 0;
    is >> i >> j >> v;
    CHECK(i == 1);
    CHECK(j == 1);
    CHECK(v == doctest::Approx(1.0 / 12.0));
}
