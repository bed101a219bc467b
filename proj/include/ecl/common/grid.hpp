#pragma once

#include <compare>
#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <vector>

namespace ecl {

struct Cell {
  int x = 0;
  int y = 0;

  friend constexpr auto operator<=>(const Cell&, const Cell&) = default;
};

inline int chebyshev(Cell a, Cell b) {
  return std::max(std::abs(a.x - b.x), std::abs(a.y - b.y));
}

inline int manhattan(Cell a, Cell b) {
  return std::abs(a.x - b.x) + std::abs(a.y - b.y);
}

// Dense row-major 2D array addressed by Cell. Row y = 0 is the north edge.
template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(int width, int height, const T& fill = T{})
      : width_(width), height_(height), data_(static_cast<size_t>(width) * height, fill) {
    if (width < 0 || height < 0) throw std::invalid_argument("negative grid size");
  }

  int width() const { return width_; }
  int height() const { return height_; }
  size_t size() const { return data_.size(); }

  bool in_bounds(Cell c) const { return c.x >= 0 && c.y >= 0 && c.x < width_ && c.y < height_; }
  size_t index(Cell c) const { return static_cast<size_t>(c.y) * width_ + c.x; }
  Cell cell(size_t index) const {
    return {static_cast<int>(index % width_), static_cast<int>(index / width_)};
  }

  T& operator[](Cell c) { return data_[index(c)]; }
  const T& operator[](Cell c) const { return data_[index(c)]; }
  T& at(Cell c) {
    if (!in_bounds(c)) throw std::out_of_range("grid cell out of bounds");
    return data_[index(c)];
  }
  const T& at(Cell c) const {
    if (!in_bounds(c)) throw std::out_of_range("grid cell out of bounds");
    return data_[index(c)];
  }

  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

inline constexpr Cell kNeighbors4[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
inline constexpr Cell kNeighbors8[8] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1},
                                        {1, 1}, {-1, 1}, {-1, -1}, {1, -1}};

}  // namespace ecl
