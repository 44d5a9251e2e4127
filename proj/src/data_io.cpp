#include "oxdgm/data_io.hpp"

#include <zlib.h>

#include <algorithm>
#include <array>
#include <cstdio>

namespace oxdgm {
namespace {

/// gzread-based reader; zlib transparently handles uncompressed files too.
class GzReader {
 public:
  explicit GzReader(const std::string& path) : path_(path), file_(gzopen(path.c_str(), "rb")) {
    if (file_ == nullptr)
      throw IdxError(IdxError::Code::kTruncated, "cannot open " + path);
  }
  ~GzReader() {
    if (file_ != nullptr) gzclose(file_);
  }
  GzReader(const GzReader&) = delete;
  GzReader& operator=(const GzReader&) = delete;

  void read_exact(void* buf, std::size_t n) {
    std::size_t got = 0;
    auto* p = static_cast<unsigned char*>(buf);
    while (got < n) {
      const unsigned chunk =
          static_cast<unsigned>(std::min<std::size_t>(n - got, 1u << 20));
      const int r = gzread(file_, p + got, chunk);
      if (r <= 0)
        throw IdxError(IdxError::Code::kTruncated, "truncated file: " + path_);
      got += static_cast<std::size_t>(r);
    }
  }

  std::uint32_t read_u32_be() {
    std::array<unsigned char, 4> b{};
    read_exact(b.data(), 4);
    return (static_cast<std::uint32_t>(b[0]) << 24) |
           (static_cast<std::uint32_t>(b[1]) << 16) |
           (static_cast<std::uint32_t>(b[2]) << 8) | static_cast<std::uint32_t>(b[3]);
  }

 private:
  std::string path_;
  gzFile file_;
};

constexpr std::uint32_t kImageMagic = 0x00000803;
constexpr std::uint32_t kLabelMagic = 0x00000801;

}  // namespace

ImageSet load_idx(const std::string& images_path, const std::string& labels_path) {
  GzReader img(images_path);
  const std::uint32_t img_magic = img.read_u32_be();
  if (img_magic != kImageMagic) {
    char msg[128];
    std::snprintf(msg, sizeof msg, "bad magic 0x%08x in image file (want 0x%08x)",
                  img_magic, kImageMagic);
    throw IdxError(IdxError::Code::kBadMagic, std::string(msg) + ": " + images_path);
  }
  const std::uint32_t n_images = img.read_u32_be();
  const std::uint32_t rows = img.read_u32_be();
  const std::uint32_t cols = img.read_u32_be();
  const std::size_t dim = static_cast<std::size_t>(rows) * cols;

  GzReader lab(labels_path);
  const std::uint32_t lab_magic = lab.read_u32_be();
  if (lab_magic != kLabelMagic) {
    char msg[128];
    std::snprintf(msg, sizeof msg, "bad magic 0x%08x in label file (want 0x%08x)",
                  lab_magic, kLabelMagic);
    throw IdxError(IdxError::Code::kBadMagic, std::string(msg) + ": " + labels_path);
  }
  const std::uint32_t n_labels = lab.read_u32_be();
  if (n_images != n_labels)
    throw IdxError(IdxError::Code::kCountMismatch,
                   "image/label count mismatch: " + std::to_string(n_images) + " vs " +
                       std::to_string(n_labels));

  ImageSet set;
  set.images = Matrix(n_images, dim);
  set.labels.resize(n_labels);

  std::vector<unsigned char> raw(dim);
  for (std::uint32_t k = 0; k < n_images; ++k) {
    img.read_exact(raw.data(), dim);
    auto row = set.images.row(k);
    for (std::size_t i = 0; i < dim; ++i) row[i] = static_cast<double>(raw[i]) / 255.0;
  }
  std::vector<unsigned char> lraw(n_labels);
  if (n_labels > 0) lab.read_exact(lraw.data(), n_labels);
  for (std::uint32_t k = 0; k < n_labels; ++k) set.labels[k] = static_cast<int>(lraw[k]);
  return set;
}

std::pair<ImageSet, ImageSet> reduced_subset(const ImageSet& set, std::size_t n_train,
                                             std::size_t n_test, Rng& rng) {
  constexpr int kClasses = 10;
  if (n_train % kClasses != 0 || n_test % kClasses != 0)
    throw std::invalid_argument("reduced_subset: sizes must be multiples of 10");
  const std::size_t per_train = n_train / kClasses;
  const std::size_t per_test = n_test / kClasses;

  std::vector<std::vector<std::size_t>> by_class(kClasses);
  for (std::size_t k = 0; k < set.size(); ++k) {
    const int label = set.labels[k];
    if (label < 0 || label >= kClasses)
      throw std::invalid_argument("reduced_subset: label outside [0,9]");
    by_class[label].push_back(k);
  }

  std::vector<std::size_t> train_idx, test_idx;
  train_idx.reserve(n_train);
  test_idx.reserve(n_test);
  for (int c = 0; c < kClasses; ++c) {
    auto& pool = by_class[c];
    if (pool.size() < per_train + per_test)
      throw std::invalid_argument("reduced_subset: insufficient samples for class " +
                                  std::to_string(c));
    rng.shuffle(pool.begin(), pool.end());
    train_idx.insert(train_idx.end(), pool.begin(), pool.begin() + per_train);
    test_idx.insert(test_idx.end(), pool.begin() + per_train,
                    pool.begin() + per_train + per_test);
  }

  const std::size_t dim = set.images.cols;
  auto gather = [&](const std::vector<std::size_t>& idx) {
    ImageSet out;
    out.images = Matrix(idx.size(), dim);
    out.labels.resize(idx.size());
    for (std::size_t k = 0; k < idx.size(); ++k) {
      const auto src = set.images.row(idx[k]);
      std::copy(src.begin(), src.end(), out.images.row(k).begin());
      out.labels[k] = set.labels[idx[k]];
    }
    return out;
  };
  return {gather(train_idx), gather(test_idx)};
}

void salt_and_pepper(std::span<const double> x, double density, Rng& rng,
                     std::span<double> out) {
  if (density < 0.0 || density > 1.0)
    throw std::invalid_argument("salt_and_pepper: density must be in [0,1]");
  if (out.size() != x.size())
    throw std::invalid_argument("salt_and_pepper: output size mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (rng.uniform01() < density)
      out[i] = rng.bernoulli(0.5) ? 1.0 : 0.0;
    else
      out[i] = x[i];
  }
}

Matrix salt_and_pepper(const Matrix& images, double density, Rng& rng) {
  Matrix out(images.rows, images.cols);
  for (std::size_t k = 0; k < images.rows; ++k)
    salt_and_pepper(images.row(k), density, rng, out.row(k));
  return out;
}

std::vector<std::uint8_t> bernoulli_binarize(std::span<const double> x, Rng& rng) {
  std::vector<std::uint8_t> bits(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) bits[i] = rng.bernoulli(x[i]) ? 1 : 0;
  return bits;
}

}  // namespace oxdgm
