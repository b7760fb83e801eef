#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "doctest.h"
#include "fundtone/eigensolve.hpp"
#include "fundtone/errors.hpp"
#include "fundtone/surfaces.hpp"

using namespace fundtone;

namespace {

constexpr double kJ01 = 2.404825557695773;

OperatorPair laplace(const Surface& s) { return assemble(s.mesh, PhiField::identity(s.mesh.num_vertices())); }

OperatorPair dirichlet_laplace(const Surface& s) { return apply_dirichlet(laplace(s), s.mesh); }

double disk_lambda(int level) {
    const auto d = builtin_surface(Family::PlaneDisk, {}, level);
    return smallest_eigenpairs(dirichlet_laplace(d), 1, ProblemKind::Dirichlet).eigenvalues[0];
}

}  // namespace

TEST_CASE("unit sphere spectrum") {
    const auto s = builtin_surface(Family::RoundSphere, {}, 4);
    const auto op = laplace(s);
    const auto res = smallest_eigenpairs(op, 3, ProblemKind::Closed);
    REQUIRE(res.eigenvalues.size() == 3);
    for (int j = 0; j < 3; ++j) {
        CHECK(res.eigenvalues[j] == doctest::Approx(2.0).epsilon(0.02));
        CHECK(res.residual_norms[j] < 1e-8);
        const Eigen::VectorXd u = res.eigenfunctions.col(j);
        CHECK(std::abs(u.dot(op.M * Eigen::VectorXd::Ones(op.size()))) < 1e-9);
        CHECK(rayleigh_quotient(op, u) == doctest::Approx(res.eigenvalues[j]).epsilon(1e-10));
    }
    CHECK(res.eigenvalues[0] <= res.eigenvalues[1]);
    CHECK(res.eigenvalues[1] <= res.eigenvalues[2]);
    const Eigen::MatrixXd G = res.eigenfunctions.transpose() * (op.M * res.eigenfunctions);
    CHECK((G - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() < 1e-9);

    const auto p1 = assemble(s.mesh, PhiField::newton(s.curvature, 1));
    const auto r1 = smallest_eigenpairs(p1, 3, ProblemKind::Closed);
    for (int j = 0; j < 3; ++j) {
        CHECK(r1.eigenvalues[j] == doctest::Approx(res.eigenvalues[j]).epsilon(1e-10));
    }
}

TEST_CASE("Rayleigh quotient certificates") {
    const auto s = builtin_surface(Family::RoundSphere, {}, 3);
    const auto op = laplace(s);
    const double l1 = smallest_eigenpairs(op, 1, ProblemKind::Closed).eigenvalues[0];
    CHECK(rayleigh_quotient(op, Eigen::VectorXd::Ones(op.size())) == doctest::Approx(0.0).scale(1.0));
    CHECK_THROWS_AS(rayleigh_quotient(op, Eigen::VectorXd::Zero(op.size())), DomainError);
    std::mt19937_64 rng(4);
    std::normal_distribution<double> g;
    const Eigen::VectorXd m1 = op.M * Eigen::VectorXd::Ones(op.size());
    for (int t = 0; t < 20; ++t) {
        Eigen::VectorXd u(op.size());
        for (int i = 0; i < u.size(); ++i) {
            u[i] = g(rng);
        }
        u.array() -= m1.dot(u) / m1.sum();
        CHECK(rayleigh_quotient(op, u) >= l1);
        CHECK(rayleigh_quotient(op, u) >= 2.0 * 0.98);
    }
}

TEST_CASE("disk Dirichlet eigenvalue") {
    SurfaceParams p;
    p.rings = 40;
    const auto d = builtin_surface(Family::PlaneDisk, p, 0);
    const auto op = dirichlet_laplace(d);
    const auto res = smallest_eigenpairs(op, 1, ProblemKind::Dirichlet);
    CHECK(res.eigenvalues[0] == doctest::Approx(kJ01 * kJ01).epsilon(0.02));
    const Eigen::VectorXd u = op.reinsert(res.eigenfunctions.col(0));
    for (int v = 0; v < d.mesh.num_vertices(); ++v) {
        if (d.mesh.boundary_flags()[v]) {
            CHECK(u[v] == 0.0);
        } else {
            CHECK(u[v] > 0.0);
        }
    }
}

TEST_CASE("mesh convergence from above at second order") {
    const double exact = kJ01 * kJ01;
    std::vector<double> err;
    for (int l = 1; l <= 4; ++l) {
        const double lam = disk_lambda(l);
        CHECK(lam > exact);
        err.push_back(lam - exact);
    }
    for (std::size_t i = 1; i < err.size(); ++i) {
        CHECK(err[i] < err[i - 1]);
        CHECK(std::log2(err[i - 1] / err[i]) >= 1.8);
    }
    std::vector<double> serr;
    for (int l = 1; l <= 4; ++l) {
        const auto s = builtin_surface(Family::RoundSphere, {}, l);
        serr.push_back(std::abs(smallest_eigenpairs(laplace(s), 1, ProblemKind::Closed).eigenvalues[0] - 2.0));
    }
    for (std::size_t i = 1; i < serr.size(); ++i) {
        CHECK(std::log2(serr[i - 1] / serr[i]) >= 1.8);
    }
}

TEST_CASE("half disk has a larger fundamental tone") {
    const auto d = builtin_surface(Family::PlaneDisk, {}, 3);
    const TriMesh half = d.mesh.submesh([&](int f) {
        double y = 0.0;
        for (int v : d.mesh.faces()[f]) {
            y += d.mesh.vertex(v).coords[1];
        }
        return y > 0.0;
    });
    const auto full_op = dirichlet_laplace(d);
    const auto half_op = apply_dirichlet(assemble(half, PhiField::identity(half.num_vertices())), half);
    const double lf = smallest_eigenpairs(full_op, 1, ProblemKind::Dirichlet).eigenvalues[0];
    const double lh = smallest_eigenpairs(half_op, 1, ProblemKind::Dirichlet).eigenvalues[0];
    CHECK(lh > lf);
}

TEST_CASE("solver is deterministic and validates its inputs") {
    const auto s = builtin_surface(Family::RoundSphere, {}, 2);
    const auto op = laplace(s);
    const auto a = smallest_eigenpairs(op, 2, ProblemKind::Closed);
    const auto b = smallest_eigenpairs(op, 2, ProblemKind::Closed);
    CHECK(a.eigenvalues == b.eigenvalues);
    CHECK(a.eigenfunctions == b.eigenfunctions);
    CHECK_THROWS_AS(smallest_eigenpairs(op, 0, ProblemKind::Closed), DomainError);
    CHECK_THROWS_AS(smallest_eigenpairs(op, op.size(), ProblemKind::Closed), DomainError);
    EigenOptions tight;
    tight.max_iterations = 1;
    tight.tolerance = 1e-300;
    try {
        smallest_eigenpairs(op, 2, ProblemKind::Closed, tight);
        FAIL("expected a SolverError");
    } catch (const SolverError& e) {
        CHECK(e.best_residuals().size() == 2);
    }
    const auto d = builtin_surface(Family::PlaneDisk, {}, 1);
    CHECK_THROWS_AS(smallest_eigenpairs(dirichlet_laplace(d), 1, ProblemKind::Closed), DomainError);
}

TEST_CASE("sphere of radius 2: L1 is half the Laplacian") {
    SurfaceParams p;
    p.radius = 2.0;
    const auto s = builtin_surface(Family::RoundSphere, p, 3);
    const double lap = smallest_eigenpairs(laplace(s), 1, ProblemKind::Closed).eigenvalues[0];
    const double l1 = smallest_eigenpairs(assemble(s.mesh, PhiField::newton(s.curvature, 1)), 1, ProblemKind::Closed)
                          .eigenvalues[0];
    CHECK(lap == doctest::Approx(0.5).epsilon(0.02));
    CHECK(l1 == doctest::Approx(0.5 * lap).epsilon(1e-6));
}

TEST_CASE("eigenfunction CSV") {
    const auto d = builtin_surface(Family::PlaneDisk, {}, 0);
    const auto op = dirichlet_laplace(d);
    const auto res = smallest_eigenpairs(op, 1, ProblemKind::Dirichlet);
    std::ostringstream os;
    write_eigenfunctions_csv(os, op, res);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "vertex_id,u0");
    int rows = 0;
    while (std::getline(is, line)) {
        ++rows;
    }
    CHECK(rows == d.mesh.num_vertices());
}
