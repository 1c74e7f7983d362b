#include "mcf/grid2d.hpp"

#include <algorithm>

#include "mcf/errors.hpp"

namespace mcf {

Grid2D::Grid2D(int rows, int cols, double fill)
    : rows_(rows), cols_(cols) {
  if (rows < 0 || cols < 0) throw ConfigError("Grid2D: negative extent");
  data_.assign(static_cast<std::size_t>(rows) * cols, fill);
}

void Grid2D::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

}  // namespace mcf
