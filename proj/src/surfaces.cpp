#include "fundtone/surfaces.hpp"

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <sstream>

#include "fundtone/errors.hpp"

namespace fundtone {

namespace {

constexpr double kPi = std::numbers::pi;

struct FamilyEntry {
    Family family;
    std::string_view name;
};

constexpr std::array<FamilyEntry, 9> kFamilies{{
    {Family::RoundSphere, "round_sphere"},
    {Family::Ellipsoid, "ellipsoid"},
    {Family::Torus, "torus"},
    {Family::PlaneDisk, "plane_disk"},
    {Family::SphereCap, "sphere_cap"},
    {Family::SphericalCap, "spherical_cap"},
    {Family::GeodesicSphereS3, "geodesic_sphere_in_S3"},
    {Family::GeodesicSphereH3, "geodesic_sphere_in_H3"},
    {Family::GeodesicCapH3, "geodesic_cap_in_H3"},
}};

void require(bool ok, const char* what) {
    if (!ok) {
        throw DomainError(what);
    }
}

// Concentric-ring triangulation of a disk: ring k (k = 1..m) carries 6k
// vertices at equal angular spacing; vertex 0 is the center. Returns the
// (radial fraction, angle) of each vertex.
struct RingMesh {
    std::vector<std::pair<double, double>> polar;
    std::vector<Face> faces;
};

RingMesh ring_mesh(int m) {
    RingMesh rm;
    rm.polar.emplace_back(0.0, 0.0);
    for (int k = 1; k <= m; ++k) {
        for (int j = 0; j < 6 * k; ++j) {
            rm.polar.emplace_back(static_cast<double>(k) / m, 2.0 * kPi * j / (6.0 * k));
        }
    }
    auto ring_vertex = [](int k, int j) {
        if (k == 0) {
            return 0;
        }
        return 1 + 3 * k * (k - 1) + (j % (6 * k));
    };
    for (int k = 0; k < m; ++k) {
        for (int s = 0; s < 6; ++s) {
            auto inner = [&](int i) { return ring_vertex(k, s * k + i); };
            auto outer = [&](int j) { return ring_vertex(k + 1, s * (k + 1) + j); };
            for (int i = 0; i < k; ++i) {
                rm.faces.push_back({inner(i), outer(i), outer(i + 1)});
                rm.faces.push_back({inner(i), outer(i + 1), inner(i + 1)});
            }
            rm.faces.push_back({inner(k), outer(k), outer(k + 1)});
        }
    }
    return rm;
}

int ring_count(const SurfaceParams& p, int level) {
    if (p.rings > 0) {
        return p.rings;
    }
    return 1 << (level + 1);
}

Vec vec3(double x, double y, double z) {
    Vec v(3);
    v << x, y, z;
    return v;
}

Vec vec4(double a, double b, double c, double d) {
    Vec v(4);
    v << a, b, c, d;
    return v;
}

VertexCurvature umbilic(const SpaceForm& sf, const AmbientPoint& x, const Vec& normal, double kappa) {
    const auto frame = tangent_frame(sf, x, normal);
    return {normal, kappa, kappa, frame[0], frame[1]};
}

Surface assemble_surface(Family family, const SurfaceParams& params, int level, const SpaceForm& sf,
                         std::vector<AmbientPoint> pts, std::vector<Face> faces, std::vector<VertexCurvature> curv,
                         std::optional<AmbientPoint> pole) {
    TriMesh mesh(sf, std::move(pts), std::move(faces));
    CurvatureField cf(mesh, std::move(curv));
    return Surface{family, params, level, std::move(mesh), std::move(cf), std::move(pole)};
}

}  // namespace

std::string_view family_name(Family f) {
    for (const auto& e : kFamilies) {
        if (e.family == f) {
            return e.name;
        }
    }
    return "unknown";
}

Family parse_family(std::string_view name) {
    for (const auto& e : kFamilies) {
        if (e.name == name) {
            return e.family;
        }
    }
    throw DomainError("unknown surface family '" + std::string(name) + "'");
}

const std::vector<Family>& all_families() {
    static const std::vector<Family> families = [] {
        std::vector<Family> out;
        for (const auto& e : kFamilies) {
            out.push_back(e.family);
        }
        return out;
    }();
    return families;
}

std::pair<std::vector<Eigen::Vector3d>, std::vector<Face>> unit_icosphere(int level) {
    if (level < 0) {
        throw DomainError("refinement level must be non-negative");
    }
    std::vector<Eigen::Vector3d> v;
    v.emplace_back(0.0, 0.0, 1.0);
    const double z = 1.0 / std::sqrt(5.0);
    const double rho = 2.0 / std::sqrt(5.0);
    for (int k = 0; k < 5; ++k) {
        const double a = 2.0 * kPi * k / 5.0;
        v.emplace_back(rho * std::cos(a), rho * std::sin(a), z);
    }
    for (int k = 0; k < 5; ++k) {
        const double a = 2.0 * kPi * k / 5.0 + kPi / 5.0;
        v.emplace_back(rho * std::cos(a), rho * std::sin(a), -z);
    }
    v.emplace_back(0.0, 0.0, -1.0);
    std::vector<Face> f;
    for (int k = 0; k < 5; ++k) {
        const int u0 = 1 + k;
        const int u1 = 1 + (k + 1) % 5;
        const int l0 = 6 + k;
        const int l1 = 6 + (k + 1) % 5;
        f.push_back({0, u0, u1});
        f.push_back({u0, l0, u1});
        f.push_back({u1, l0, l1});
        f.push_back({11, l1, l0});
    }
    for (Face& t : f) {
        const Eigen::Vector3d n = (v[t[1]] - v[t[0]]).cross(v[t[2]] - v[t[0]]);
        if (n.dot(v[t[0]] + v[t[1]] + v[t[2]]) < 0.0) {
            std::swap(t[1], t[2]);
        }
    }
    for (int l = 0; l < level; ++l) {
        std::map<std::pair<int, int>, int> mid;
        auto midpoint = [&](int a, int b) {
            const auto key = std::minmax(a, b);
            auto it = mid.find(key);
            if (it != mid.end()) {
                return it->second;
            }
            v.push_back((v[a] + v[b]).normalized());
            const int id = static_cast<int>(v.size()) - 1;
            mid.emplace(key, id);
            return id;
        };
        std::vector<Face> next;
        next.reserve(f.size() * 4);
        for (const Face& t : f) {
            const int ab = midpoint(t[0], t[1]);
            const int bc = midpoint(t[1], t[2]);
            const int ca = midpoint(t[2], t[0]);
            next.push_back({t[0], ab, ca});
            next.push_back({t[1], bc, ab});
            next.push_back({t[2], ca, bc});
            next.push_back({ab, bc, ca});
        }
        f = std::move(next);
    }
    return {v, f};
}

Surface builtin_surface(Family family, const SurfaceParams& p, int level) {
    require(level >= 0, "refinement level must be non-negative");
    std::vector<AmbientPoint> pts;
    std::vector<VertexCurvature> curv;

    switch (family) {
        case Family::RoundSphere: {
            require(p.radius > 0.0, "sphere radius must be positive");
            const SpaceForm sf = SpaceForm::euclidean();
            auto [dirs, faces] = unit_icosphere(level);
            for (const auto& d : dirs) {
                pts.push_back({p.radius * d});
                curv.push_back(umbilic(sf, pts.back(), -Vec(d), 1.0 / p.radius));
            }
            return assemble_surface(family, p, level, sf, std::move(pts), std::move(faces), std::move(curv), {});
        }
        case Family::Ellipsoid: {
            require(p.axis_a > 0.0 && p.axis_b > 0.0 && p.axis_c > 0.0, "ellipsoid semi-axes must be positive");
            const SpaceForm sf = SpaceForm::euclidean();
            auto [dirs, faces] = unit_icosphere(level);
            const Eigen::Vector3d axes(p.axis_a, p.axis_b, p.axis_c);
            const Eigen::Matrix3d hess = (2.0 * axes.cwiseProduct(axes).cwiseInverse()).asDiagonal();
            for (const auto& d : dirs) {
                const Eigen::Vector3d x = axes.cwiseProduct(d);
                const Eigen::Vector3d g = hess * x;
                const Eigen::Vector3d n = g.normalized();
                const Eigen::Matrix3d proj = Eigen::Matrix3d::Identity() - n * n.transpose();
                const Eigen::Matrix3d shape = proj * hess * proj / g.norm();
                Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(shape);
                // Eigenvalue 0 belongs to the normal; the other two are the curvatures.
                pts.push_back({Vec(x)});
                curv.push_back({-Vec(n), es.eigenvalues()[1], es.eigenvalues()[2], Vec(es.eigenvectors().col(1)),
                                Vec(es.eigenvectors().col(2))});
                // Re-orthogonalize against the normal (the zero eigenvector is n up to round-off).
                auto& c = curv.back();
                c.e1 = (c.e1 - c.e1.dot(n) * Vec(n)).normalized();
                c.e2 = Vec(n.cross(Eigen::Vector3d(c.e1)));
            }
            return assemble_surface(family, p, level, sf, std::move(pts), std::move(faces), std::move(curv), {});
        }
        case Family::Torus: {
            require(p.major > 0.0 && p.minor > 0.0 && p.minor < p.major, "torus needs 0 < minor < major");
            const SpaceForm sf = SpaceForm::euclidean();
            const int nv = 4 << level;
            const int nu = std::max(3, static_cast<int>(std::lround(nv * p.major / p.minor)));
            std::vector<Face> faces;
            for (int i = 0; i < nu; ++i) {
                const double u = 2.0 * kPi * i / nu;
                for (int j = 0; j < nv; ++j) {
                    const double v = 2.0 * kPi * j / nv;
                    const double w = p.major + p.minor * std::cos(v);
                    pts.push_back({vec3(w * std::cos(u), w * std::sin(u), p.minor * std::sin(v))});
                    const Vec normal = -vec3(std::cos(v) * std::cos(u), std::cos(v) * std::sin(u), std::sin(v));
                    const Vec eu = vec3(-std::sin(u), std::cos(u), 0.0);
                    const Vec ev = vec3(-std::sin(v) * std::cos(u), -std::sin(v) * std::sin(u), std::cos(v));
                    curv.push_back({normal, std::cos(v) / w, 1.0 / p.minor, eu, ev});
                }
            }
            auto id = [&](int i, int j) { return (i % nu) * nv + (j % nv); };
            for (int i = 0; i < nu; ++i) {
                for (int j = 0; j < nv; ++j) {
                    faces.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
                    faces.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
                }
            }
            return assemble_surface(family, p, level, sf, std::move(pts), std::move(faces), std::move(curv), {});
        }
        case Family::PlaneDisk: {
            require(p.radius > 0.0, "disk radius must be positive");
            const SpaceForm sf = SpaceForm::euclidean();
            RingMesh rm = ring_mesh(ring_count(p, level));
            for (const auto& [s, phi] : rm.polar) {
                pts.push_back({vec3(p.radius * s * std::cos(phi), p.radius * s * std::sin(phi), 0.0)});
                curv.push_back({vec3(0.0, 0.0, -1.0), 0.0, 0.0, vec3(1.0, 0.0, 0.0), vec3(0.0, 1.0, 0.0)});
            }
            return assemble_surface(family, p, level, sf, std::move(pts), std::move(rm.faces), std::move(curv),
                                    AmbientPoint{vec3(0.0, 0.0, 0.0)});
        }
        case Family::SphereCap: {
            require(p.radius > 0.0, "sphere radius must be positive");
            require(p.angle > 0.0 && p.angle < kPi, "cap angle must lie in (0, pi)");
            const SpaceForm sf = SpaceForm::euclidean();
            RingMesh rm = ring_mesh(ring_count(p, level));
            for (const auto& [s, phi] : rm.polar) {
                const double t = s * p.angle;
                const Vec d = vec3(std::sin(t) * std::cos(phi), std::sin(t) * std::sin(phi), std::cos(t));
                pts.push_back({p.radius * d});
                curv.push_back(umbilic(sf, pts.back(), -d, 1.0 / p.radius));
            }
            return assemble_surface(family, p, level, sf, std::move(pts), std::move(rm.faces), std::move(curv),
                                    AmbientPoint{vec3(0.0, 0.0, p.radius)});
        }
        case Family::SphericalCap: {
            require(p.angle > 0.0 && p.angle < kPi / 2.0, "spherical cap angle must lie in (0, pi/2)");
            const SpaceForm sf = SpaceForm::sphere();
            RingMesh rm = ring_mesh(ring_count(p, level));
            const Vec normal = vec4(0.0, 0.0, 0.0, 1.0);
            for (const auto& [s, phi] : rm.polar) {
                const double t = s * p.angle;
                pts.push_back({vec4(std::sin(t) * std::cos(phi), std::sin(t) * std::sin(phi), std::cos(t), 0.0)});
                curv.push_back(umbilic(sf, pts.back(), normal, 0.0));
            }
            return assemble_surface(family, p, level, sf, std::move(pts), std::move(rm.faces), std::move(curv),
                                    AmbientPoint{vec4(0.0, 0.0, 1.0, 0.0)});
        }
        case Family::GeodesicSphereS3: {
            require(p.radius > 0.0 && p.radius <= kPi / 2.0, "geodesic sphere radius in S^3 must lie in (0, pi/2]");
            const SpaceForm sf = SpaceForm::sphere();
            auto [dirs, faces] = unit_icosphere(level);
            const double sr = std::sin(p.radius);
            const double cr = std::cos(p.radius);
            for (const auto& d : dirs) {
                pts.push_back({vec4(sr * d.x(), sr * d.y(), sr * d.z(), cr)});
                const Vec normal = vec4(-cr * d.x(), -cr * d.y(), -cr * d.z(), sr);
                curv.push_back(umbilic(sf, pts.back(), normal, cr / sr));
            }
            return assemble_surface(family, p, level, sf, std::move(pts), std::move(faces), std::move(curv), {});
        }
        case Family::GeodesicSphereH3:
        case Family::GeodesicCapH3: {
            require(p.radius > 0.0, "geodesic sphere radius must be positive");
            const SpaceForm sf = SpaceForm::hyperbolic();
            const double sh = std::sinh(p.radius);
            const double ch = std::cosh(p.radius);
            auto place = [&](const Eigen::Vector3d& d) {
                pts.push_back({vec4(ch, sh * d.x(), sh * d.y(), sh * d.z())});
                const Vec normal = vec4(-sh, -ch * d.x(), -ch * d.y(), -ch * d.z());
                curv.push_back(umbilic(sf, pts.back(), normal, ch / sh));
            };
            if (family == Family::GeodesicSphereH3) {
                auto [dirs, faces] = unit_icosphere(level);
                for (const auto& d : dirs) {
                    place(d);
                }
                return assemble_surface(family, p, level, sf, std::move(pts), std::move(faces), std::move(curv), {});
            }
            require(p.angle > 0.0 && p.angle < kPi, "cap angle must lie in (0, pi)");
            RingMesh rm = ring_mesh(ring_count(p, level));
            for (const auto& [s, phi] : rm.polar) {
                const double t = s * p.angle;
                place(Eigen::Vector3d(std::sin(t) * std::cos(phi), std::sin(t) * std::sin(phi), std::cos(t)));
            }
            return assemble_surface(family, p, level, sf, std::move(pts), std::move(rm.faces), std::move(curv),
                                    AmbientPoint{vec4(ch, 0.0, 0.0, sh)});
        }
    }
    throw DomainError("unhandled surface family");
}

}  // namespace fundtone
