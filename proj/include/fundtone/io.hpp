#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>

#include "fundtone/geometry.hpp"
#include "fundtone/mesh.hpp"

namespace fundtone {

/// ASCII OFF: "OFF", counts "V F E", vertex lines "x y z [w]", face lines
/// "3 i j k". '#' starts a comment.
///
/// Three coordinates mean Euclidean space. With four, `curvature` selects the
/// sphere (1) or the hyperboloid (-1, time coordinate first); when it is not
/// given the model is inferred from the first vertex. Vertices within 1e-6 of
/// the model are projected onto it. Throws IoError on malformed input,
/// including meshes whose topology is rejected.
TriMesh read_off(std::istream& in, std::optional<int> curvature = std::nullopt);
TriMesh read_off_file(const std::filesystem::path& path, std::optional<int> curvature = std::nullopt);

/// Coordinates at 17 significant digits, so a read-back is exact.
void write_off(std::ostream& out, const TriMesh& mesh);
void write_off_file(const std::filesystem::path& path, const TriMesh& mesh);

/// Curvature sidecar: "vertex_id,kappa1,kappa2,S1,S2".
void write_curvature_csv_file(const std::filesystem::path& path, const CurvatureField& cf);

}  // namespace fundtone
