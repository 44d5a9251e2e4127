#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "oxdgm/matrix.hpp"
#include "oxdgm/rng.hpp"

namespace oxdgm {

/// Labeled image collection; pixels are reals in [0,1], row-major N x d.
struct ImageSet {
  Matrix images;
  std::vector<int> labels;

  std::size_t size() const { return images.rows; }
};

/// IDX container parse failure with a machine-checkable reason.
class IdxError : public std::runtime_error {
 public:
  enum class Code { kBadMagic, kTruncated, kCountMismatch };

  IdxError(Code code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  Code code() const { return code_; }

 private:
  Code code_;
};

/// Parse a big-endian IDX image/label file pair (plain or gzip-compressed).
/// Image magic 0x00000803, label magic 0x00000801; pixels scaled by 1/255.
ImageSet load_idx(const std::string& images_path, const std::string& labels_path);

/// Class-balanced disjoint train/test split: n_train/10 and n_test/10 images
/// per digit, drawn seed-deterministically from the source set.
std::pair<ImageSet, ImageSet> reduced_subset(const ImageSet& set, std::size_t n_train,
                                             std::size_t n_test, Rng& rng);

/// Each pixel is independently replaced, with probability `density`, by 0 or 1
/// with equal odds.
void salt_and_pepper(std::span<const double> x, double density, Rng& rng,
                     std::span<double> out);
Matrix salt_and_pepper(const Matrix& images, double density, Rng& rng);

/// bit_i ~ Bernoulli(x_i) for x in [0,1]^d.
std::vector<std::uint8_t> bernoulli_binarize(std::span<const double> x, Rng& rng);

}  // namespace oxdgm
