#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fundtone/geometry.hpp"
#include "fundtone/mesh.hpp"

namespace fundtone {

/// Analytic surface families used as a test corpus. Curvature data of every
/// family comes from closed-form formulas, not from discrete estimation.
enum class Family {
    RoundSphere,         ///< sphere of radius `radius` in R^3
    Ellipsoid,           ///< semi-axes (axis_a, axis_b, axis_c) in R^3
    Torus,               ///< torus of revolution (major, minor) in R^3
    PlaneDisk,           ///< flat disk of radius `radius` in R^3
    SphereCap,           ///< cap of angular radius `angle` on a sphere of radius `radius` in R^3
    SphericalCap,        ///< cap of radius `angle` in a totally geodesic S^2 of S^3
    GeodesicSphereS3,    ///< distance sphere of radius `radius` < pi/2 in S^3
    GeodesicSphereH3,    ///< distance sphere of radius `radius` in H^3
    GeodesicCapH3,       ///< cap of angular radius `angle` of the distance sphere of radius `radius` in H^3
};

std::string_view family_name(Family f);
/// Throws DomainError for an unknown name.
Family parse_family(std::string_view name);
const std::vector<Family>& all_families();

struct SurfaceParams {
    double radius = 1.0;
    double axis_a = 1.0;
    double axis_b = 1.0;
    double axis_c = 1.0;
    double major = 2.0;
    double minor = 1.0;
    double angle = 0.5;
    /// Ring count of disk-like meshes; 0 means 2^(level+1).
    int rings = 0;
};

struct Surface {
    Family family;
    SurfaceParams params;
    int level = 0;
    TriMesh mesh;
    CurvatureField curvature;
    /// Center of the disk-like families (the point the rings are built around).
    std::optional<AmbientPoint> pole;
};

/// Builds the mesh at refinement `level` (icosphere subdivision for closed
/// spheres, structured grids or concentric rings otherwise), with faces
/// oriented outward, together with its analytic curvature field.
Surface builtin_surface(Family family, const SurfaceParams& params, int level);

/// Icosahedron with vertices at the poles, subdivided `level` times and
/// projected on the unit sphere (10 * 4^level + 2 vertices).
std::pair<std::vector<Eigen::Vector3d>, std::vector<Face>> unit_icosphere(int level);

}  // namespace fundtone
