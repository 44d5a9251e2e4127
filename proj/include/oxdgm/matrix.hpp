#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace oxdgm {

/// Row-major dense matrix of doubles. Just enough for dataset batches and
/// propagated layer activations.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  std::span<double> row(std::size_t i) { return {data.data() + i * cols, cols}; }
  std::span<const double> row(std::size_t i) const {
    return {data.data() + i * cols, cols};
  }
};

}  // namespace oxdgm
