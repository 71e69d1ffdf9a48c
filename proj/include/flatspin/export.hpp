#pragma once

#include <array>
#include <string>
#include <vector>

#include "flatspin/config.hpp"
#include "flatspin/surface.hpp"

namespace flatspin {

/// Stereographic projection from the pole sign * e_pole: the three remaining coordinates in
/// increasing index order, divided by 1 - sign * p[pole].
/// NotUnit when ||p| - 1| > 1e-6, AtPole within 1e-9 of the pole.
Vec3 stereographic_project(const Vec4& p, int pole = 0, int sign = 1);

/// Drops one coordinate.
Vec3 orthographic_project(const Vec4& p, int drop = 3);

/// Projection from any unit pole: coordinates in the orthonormal basis of the pole's complement
/// obtained by Gram-Schmidt on e0..e3 (skipping the most pole-aligned axis). Reduces to the axis
/// version for pole = sign * e_k.
Vec3 stereographic_project(const Vec4& p, const Vec4& pole);

/// Candidate pole farthest from every patch point among the 48 points with coordinates in
/// {0, +-1} up to normalization (axes, face diagonals, body diagonals). Tori through the origin of
/// the Spin(4) chart usually contain axis poles, hence the wider set.
Vec4 auto_pole(const SurfacePatch& patch);

struct Mesh {
  std::vector<Vec3> vertices;               // row-major over the grid
  std::vector<std::array<int, 3>> triangles;  // zero-based
};

/// Triangulated grid; periodic directions wrap, so a closed torus has no seam duplicates.
/// A spherical patch without a projection uses the stereographic one with the automatic pole;
/// anything else without a projection is ProjectionRequired.
Mesh build_mesh(const SurfacePatch& patch, const Projection& projection);

std::string obj_text(const Mesh& mesh);
std::string ply_text(const Mesh& mesh);

/// File contents in the requested format; csv4d is the raw patch.
std::string export_mesh(const SurfacePatch& patch, MeshFormat format, const Projection& projection);

/// Overwrites path with content; IoError on failure.
void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace flatspin
