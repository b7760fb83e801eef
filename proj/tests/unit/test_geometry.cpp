#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "fundtone/errors.hpp"
#include "fundtone/geometry.hpp"
#include "fundtone/surfaces.hpp"

using namespace fundtone;

namespace {

constexpr double kPi = std::numbers::pi;

// Principal curvatures of the ellipsoid x^2/a^2 + y^2/b^2 + z^2/c^2 = 1 at a
// point, from the standard formulas for the Gauss and mean curvature.
std::pair<double, double> ellipsoid_kappas(double a, double b, double c, const Eigen::Vector3d& x) {
    const double q = x[0] * x[0] / std::pow(a, 4) + x[1] * x[1] / std::pow(b, 4) + x[2] * x[2] / std::pow(c, 4);
    const double K = 1.0 / (a * a * b * b * c * c * q * q);
    const double H = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2] - a * a - b * b - c * c) /
                     (2.0 * a * a * b * b * c * c * std::pow(q, 1.5)) * -1.0;
    const double disc = std::sqrt(std::max(0.0, H * H - K));
    return {H - disc, H + disc};
}

SurfaceParams ellipsoid(double a, double b, double c) {
    SurfaceParams p;
    p.axis_a = a;
    p.axis_b = b;
    p.axis_c = c;
    return p;
}

}  // namespace

TEST_CASE("curvature field derived quantities") {
    const auto s = builtin_surface(Family::Ellipsoid, ellipsoid(1, 1, 2), 3);
    for (int v = 0; v < s.curvature.size(); ++v) {
        const auto& c = s.curvature.at(v);
        CHECK(c.kappa1 <= c.kappa2);
        CHECK(s.curvature.S(v, 0) == 1.0);
        CHECK(s.curvature.S(v, 1) == doctest::Approx(c.kappa1 + c.kappa2).epsilon(1e-12));
        CHECK(s.curvature.S(v, 2) == doctest::Approx(c.kappa1 * c.kappa2).epsilon(1e-12));
        const auto mu0 = s.curvature.newton_eigenvalues(v, 0);
        CHECK(mu0[0] == 1.0);
        CHECK(mu0[1] == 1.0);
        const auto mu1 = s.curvature.newton_eigenvalues(v, 1);
        CHECK(mu1[0] == doctest::Approx(c.kappa2));
        CHECK(mu1[1] == doctest::Approx(c.kappa1));
    }
    CHECK_THROWS_AS(s.curvature.S(0, 3), DomainError);
    CHECK_THROWS_AS(s.curvature.newton_eigenvalues(0, 2), DomainError);
}

TEST_CASE("analytic ellipsoid curvature matches the closed form") {
    const auto s = builtin_surface(Family::Ellipsoid, ellipsoid(1, 1.5, 2), 3);
    for (int v = 0; v < s.mesh.num_vertices(); ++v) {
        const auto [k1, k2] = ellipsoid_kappas(1, 1.5, 2, s.mesh.vertex(v).coords);
        CHECK(s.curvature.at(v).kappa1 == doctest::Approx(k1).epsilon(1e-9));
        CHECK(s.curvature.at(v).kappa2 == doctest::Approx(k2).epsilon(1e-9));
    }
}

TEST_CASE("spectral extrema and ellipticity") {
    const auto sphere = builtin_surface(Family::RoundSphere, {}, 2);
    const auto ex = spectral_extrema(sphere.mesh, sphere.curvature, 1);
    CHECK(ex.mu == doctest::Approx(1.0));
    CHECK(ex.nu == doctest::Approx(1.0));
    const auto el = check_ellipticity(sphere.mesh, sphere.curvature, 1);
    CHECK(el.elliptic);
    CHECK(el.margin == doctest::Approx(1.0));

    const auto ell = builtin_surface(Family::Ellipsoid, ellipsoid(1, 1, 2), 3);
    const auto e0 = spectral_extrema(ell.mesh, ell.curvature, 0);
    CHECK(e0.mu == 1.0);
    CHECK(e0.nu == 1.0);
    // Curvatures of the spheroid (1,1,2) range over [1/4, 2] (equator and poles).
    const auto e1 = spectral_extrema(ell.mesh, ell.curvature, 1);
    CHECK(e1.mu == doctest::Approx(0.25).epsilon(1e-9));
    CHECK(e1.nu == doctest::Approx(2.0).epsilon(1e-9));

    const auto disk = builtin_surface(Family::PlaneDisk, {}, 2);
    const auto d = check_ellipticity(disk.mesh, disk.curvature, 1);
    CHECK_FALSE(d.elliptic);
    CHECK(d.margin == 0.0);

    const auto torus = builtin_surface(Family::Torus, {}, 2);
    const auto t = check_ellipticity(torus.mesh, torus.curvature, 1);
    CHECK_FALSE(t.elliptic);
    CHECK(t.margin <= 0.0);
}

TEST_CASE("local curvature sup") {
    SurfaceParams p;
    p.radius = 2.0;
    const auto s = builtin_surface(Family::RoundSphere, p, 2);
    CHECK(local_curvature_sup(s.mesh, s.curvature, s.mesh.vertex(0), 1.0, 0) == doctest::Approx(1.0));
    const auto disk = builtin_surface(Family::PlaneDisk, {}, 2);
    CHECK(local_curvature_sup(disk.mesh, disk.curvature, *disk.pole, 0.5, 0) == 0.0);

    const auto ell = builtin_surface(Family::Ellipsoid, ellipsoid(1, 1, 2), 4);
    AmbientPoint north{Vec::Unit(3, 2) * 2.0};
    double expected = 0.0;
    for (int v = 0; v < ell.mesh.num_vertices(); ++v) {
        const Eigen::Vector3d x = ell.mesh.vertex(v).coords;
        if ((x - Eigen::Vector3d(0, 0, 2)).norm() <= 0.3) {
            const auto [k1, k2] = ellipsoid_kappas(1, 1, 2, x);
            expected = std::max(expected, std::abs(k1 * k2));
        }
    }
    CHECK(local_curvature_sup(ell.mesh, ell.curvature, north, 0.3, 1) == doctest::Approx(expected).epsilon(1e-9));
    CHECK_THROWS_AS(local_curvature_sup(ell.mesh, ell.curvature, AmbientPoint{Vec::Zero(3)}, 0.5, 0), DomainError);
}

TEST_CASE("extrinsic radius") {
    for (double rho : {0.5, 1.0, 2.0}) {
        SurfaceParams p;
        p.radius = rho;
        const auto s = builtin_surface(Family::RoundSphere, p, 3);
        const auto er = extrinsic_radius(s.mesh);
        CHECK(er.radius == doctest::Approx(rho).epsilon(1e-3));
        CHECK(er.center.coords.norm() < 1e-6);
    }
    const auto ell = builtin_surface(Family::Ellipsoid, ellipsoid(1, 1, 2), 3);
    CHECK(extrinsic_radius(ell.mesh).radius == doctest::Approx(2.0).epsilon(1e-9));

    const auto great = builtin_surface(Family::GeodesicSphereS3, SurfaceParams{.radius = kPi / 2}, 3);
    CHECK(extrinsic_radius(great.mesh).radius == doctest::Approx(kPi / 2).epsilon(1e-6));
    const auto s3 = builtin_surface(Family::GeodesicSphereS3, SurfaceParams{.radius = 0.8}, 3);
    CHECK(extrinsic_radius(s3.mesh).radius == doctest::Approx(0.8).epsilon(1e-6));
    const auto h3 = builtin_surface(Family::GeodesicSphereH3, SurfaceParams{.radius = 1.2}, 3);
    const auto eh = extrinsic_radius(h3.mesh);
    CHECK(eh.radius == doctest::Approx(1.2).epsilon(1e-6));
    CHECK(eh.center.coords[0] == doctest::Approx(1.0).epsilon(1e-6));

    const auto disk = builtin_surface(Family::PlaneDisk, {}, 1);
    CHECK_THROWS_AS(extrinsic_radius(disk.mesh), DomainError);
}

TEST_CASE("extrinsic radius agrees with a brute-force grid search") {
    SurfaceParams p = ellipsoid(1, 1.3, 1.6);
    const auto s = builtin_surface(Family::Ellipsoid, p, 2);
    const auto er = extrinsic_radius(s.mesh);
    auto maxdist = [&](const Eigen::Vector3d& c) {
        double m = 0.0;
        for (const auto& v : s.mesh.vertices()) {
            m = std::max(m, (Eigen::Vector3d(v.coords) - c).norm());
        }
        return m;
    };
    double best = 1e9;
    for (int i = -20; i <= 20; ++i) {
        for (int j = -20; j <= 20; ++j) {
            for (int k = -20; k <= 20; ++k) {
                best = std::min(best, maxdist(Eigen::Vector3d(i, j, k) * 0.01));
            }
        }
    }
    CHECK(er.radius <= best + 1e-12);
    CHECK(er.radius >= best - 0.02);
}

TEST_CASE("curvature estimation") {
    const auto s = builtin_surface(Family::RoundSphere, {}, 4);
    const auto est = estimate_curvature(s.mesh);
    for (int v = 0; v < est.size(); ++v) {
        CHECK(est.at(v).kappa1 == doctest::Approx(1.0).epsilon(0.05));
        CHECK(est.at(v).kappa2 == doctest::Approx(1.0).epsilon(0.05));
    }
    const auto disk = builtin_surface(Family::PlaneDisk, {}, 2);
    const auto flat = estimate_curvature(disk.mesh);
    for (int v = 0; v < flat.size(); ++v) {
        CHECK(std::abs(flat.at(v).kappa1) < 1e-8);
        CHECK(std::abs(flat.at(v).kappa2) < 1e-8);
    }
    const auto ell = builtin_surface(Family::Ellipsoid, ellipsoid(1, 1, 2), 5);
    const auto ee = estimate_curvature(ell.mesh);
    double err = 0.0;
    for (int v = 0; v < ee.size(); ++v) {
        err = std::max({err, std::abs(ee.at(v).kappa1 - ell.curvature.at(v).kappa1),
                        std::abs(ee.at(v).kappa2 - ell.curvature.at(v).kappa2)});
    }
    CHECK(err < 0.05);
    CHECK_THROWS_AS(estimate_curvature(builtin_surface(Family::GeodesicSphereH3, {}, 1).mesh), DomainError);
}

TEST_CASE("curvature CSV") {
    const auto s = builtin_surface(Family::RoundSphere, {}, 0);
    std::ostringstream os;
    s.curvature.write_csv(os);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "vertex_id,kappa1,kappa2,S1,S2");
    std::getline(is, line);
    CHECK(line == "0,1,1,2,1");
}

TEST_CASE("invalid curvature frames are rejected") {
    const auto s = builtin_surface(Family::RoundSphere, {}, 0);
    auto data = s.curvature.data();
    data[3].e1 *= 2.0;
    CHECK_THROWS_AS(CurvatureField(s.mesh, data), DomainError);
    data = s.curvature.data();
    data.pop_back();
    CHECK_THROWS_AS(CurvatureField(s.mesh, data), DomainError);
}
