#pragma once

#include <cstddef>
#include <vector>

namespace flatspin {

/// Uniform node grid over (x, y): node (i, j) sits at (x0 + i h, y0 + j hy); storage row-major in j.
/// hy = 0 means hy = h.
struct GridSpec {
  double x0 = 0.0;
  double y0 = 0.0;
  double h = 0.0;
  int nx = 0;
  int ny = 0;
  double hy = 0.0;

  double step_x() const { return h; }
  double step_y() const { return hy > 0.0 ? hy : h; }
  double x(int i) const { return x0 + i * h; }
  double y(int j) const { return y0 + j * step_y(); }
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * static_cast<std::size_t>(nx) + static_cast<std::size_t>(i); }
  std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
};

template <class T>
struct Grid {
  GridSpec spec;
  std::vector<T> data;

  Grid() = default;
  explicit Grid(const GridSpec& g, T init = T{}) : spec(g), data(g.size(), init) {}

  T& operator()(int i, int j) { return data[spec.index(i, j)]; }
  const T& operator()(int i, int j) const { return data[spec.index(i, j)]; }
};

}  // namespace flatspin
