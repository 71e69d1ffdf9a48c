#include "flatspin/export.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "flatspin/format.hpp"

namespace flatspin {

Vec3 stereographic_project(const Vec4& p, int pole, int sign) {
  if (pole < 0 || pole > 3 || (sign != 1 && sign != -1)) throw Error(ErrorCode::InvalidArgument, "pole axis must be 0..3 and sign +-1");
  double n2 = 0.0, d2 = 0.0;
  for (int k = 0; k < 4; ++k) {
    n2 += p[k] * p[k];
    double e = k == pole ? p[k] - sign : p[k];
    d2 += e * e;
  }
  if (std::abs(std::sqrt(n2) - 1.0) > 1e-6) throw Error(ErrorCode::NotUnit, "point is not on the unit sphere");
  if (std::sqrt(d2) <= 1e-9) throw Error(ErrorCode::AtPole, "point coincides with the projection pole");
  double den = 1.0 - sign * p[pole];
  Vec3 out{};
  int m = 0;
  for (int k = 0; k < 4; ++k)
    if (k != pole) out[static_cast<std::size_t>(m++)] = p[k] / den;
  return out;
}

Vec3 orthographic_project(const Vec4& p, int drop) {
  if (drop < 0 || drop > 3) throw Error(ErrorCode::InvalidArgument, "dropped axis must be 0..3");
  Vec3 out{};
  int m = 0;
  for (int k = 0; k < 4; ++k)
    if (k != drop) out[static_cast<std::size_t>(m++)] = p[k];
  return out;
}

namespace {

std::array<Vec4, 3> complement_basis(const Vec4& pole) {
  int skip = 0;
  for (int k = 1; k < 4; ++k)
    if (std::abs(pole[k]) > std::abs(pole[skip])) skip = k;
  std::array<Vec4, 3> b{};
  std::size_t m = 0;
  for (int k = 0; k < 4; ++k) {
    if (k == skip) continue;
    Vec4 v{};
    v[k] = 1.0;
    v = v - dot(v, pole) * pole;
    for (std::size_t r = 0; r < m; ++r) v = v - dot(v, b[r]) * b[r];
    b[m++] = (1.0 / norm(v)) * v;
  }
  return b;
}

}  // namespace

Vec3 stereographic_project(const Vec4& p, const Vec4& pole) {
  if (std::abs(norm(pole) - 1.0) > 1e-12) throw Error(ErrorCode::InvalidArgument, "pole must be a unit vector");
  if (std::abs(norm(p) - 1.0) > 1e-6) throw Error(ErrorCode::NotUnit, "point is not on the unit sphere");
  if (norm(p - pole) <= 1e-9) throw Error(ErrorCode::AtPole, "point coincides with the projection pole");
  const std::array<Vec4, 3> b = complement_basis(pole);
  const double den = 1.0 - dot(p, pole);
  return {dot(p, b[0]) / den, dot(p, b[1]) / den, dot(p, b[2]) / den};
}

Vec4 auto_pole(const SurfacePatch& patch) {
  Vec4 best{{1.0, 0.0, 0.0, 0.0}};
  double best_d = -1.0;
  for (int code = 1; code < 81; ++code) {
    Vec4 c{};
    int rest = code;
    for (int k = 0; k < 4; ++k, rest /= 3) c[k] = static_cast<double>(rest % 3) - 1.0;
    if (norm(c) == 0.0) continue;
    c = (1.0 / norm(c)) * c;
    // on S^3 the distance to c grows as <p, c> shrinks
    double closest = -std::numeric_limits<double>::infinity();
    for (const Vec4& p : patch.F) closest = std::max(closest, dot(p, c));
    if (1.0 - closest > best_d + 1e-12) {
      best_d = 1.0 - closest;
      best = c;
    }
  }
  return best;
}

Mesh build_mesh(const SurfacePatch& patch, const Projection& projection) {
  const GridSpec& g = patch.grid;
  Projection proj = projection;
  if (proj.kind == Projection::Kind::None) {
    if (!patch.spherical) throw Error(ErrorCode::ProjectionRequired, "patch is not on S^3; give an explicit projection");
    proj.kind = Projection::Kind::Stereographic;
    proj.pole = -1;
  }
  Vec4 pole{};
  if (proj.kind == Projection::Kind::Stereographic) {
    if (proj.pole < 0)
      pole = auto_pole(patch);
    else
      pole[proj.pole] = proj.sign;
  }

  Mesh m;
  m.vertices.reserve(patch.F.size());
  for (const Vec4& p : patch.F)
    m.vertices.push_back(proj.kind == Projection::Kind::Stereographic ? stereographic_project(p, pole) : orthographic_project(p, proj.drop));

  int qx = patch.periodic_x ? g.nx : g.nx - 1;
  int qy = patch.periodic_y ? g.ny : g.ny - 1;
  m.triangles.reserve(2 * static_cast<std::size_t>(std::max(qx, 0)) * static_cast<std::size_t>(std::max(qy, 0)));
  for (int j = 0; j < qy; ++j)
    for (int i = 0; i < qx; ++i) {
      int i1 = (i + 1) % g.nx, j1 = (j + 1) % g.ny;
      int a = static_cast<int>(g.index(i, j)), b = static_cast<int>(g.index(i1, j));
      int c = static_cast<int>(g.index(i1, j1)), d = static_cast<int>(g.index(i, j1));
      m.triangles.push_back({a, b, c});
      m.triangles.push_back({a, c, d});
    }
  return m;
}

std::string obj_text(const Mesh& mesh) {
  std::string out = "# flatspin\n";
  for (const Vec3& v : mesh.vertices) out += "v " + fmt17(v[0]) + " " + fmt17(v[1]) + " " + fmt17(v[2]) + "\n";
  for (const auto& t : mesh.triangles)
    out += "f " + std::to_string(t[0] + 1) + " " + std::to_string(t[1] + 1) + " " + std::to_string(t[2] + 1) + "\n";
  return out;
}

std::string ply_text(const Mesh& mesh) {
  std::string out = "ply\nformat ascii 1.0\n";
  out += "element vertex " + std::to_string(mesh.vertices.size()) + "\n";
  out += "property double x\nproperty double y\nproperty double z\n";
  out += "element face " + std::to_string(mesh.triangles.size()) + "\n";
  out += "property list uchar int vertex_indices\nend_header\n";
  for (const Vec3& v : mesh.vertices) out += fmt17(v[0]) + " " + fmt17(v[1]) + " " + fmt17(v[2]) + "\n";
  for (const auto& t : mesh.triangles)
    out += "3 " + std::to_string(t[0]) + " " + std::to_string(t[1]) + " " + std::to_string(t[2]) + "\n";
  return out;
}

std::string export_mesh(const SurfacePatch& patch, MeshFormat format, const Projection& projection) {
  switch (format) {
    case MeshFormat::Csv4d: return patch_csv(patch);
    case MeshFormat::Obj: return obj_text(build_mesh(patch, projection));
    case MeshFormat::Ply: return ply_text(build_mesh(patch, projection));
    case MeshFormat::None: break;
  }
  throw Error(ErrorCode::InvalidArgument, "no mesh format selected");
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorCode::IoError, "cannot open " + path + " for writing");
  f.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!f) throw Error(ErrorCode::IoError, "write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::IoError, "cannot open " + path);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

}  // namespace flatspin
