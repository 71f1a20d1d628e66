#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mmdr/common.hpp"
#include "mmdr/io_util.hpp"

namespace mmdr {

constexpr int kImageSide = 28;
constexpr int kImageDim = kImageSide * kImageSide;

namespace detail {

inline std::uint32_t be32(const unsigned char* p) {
  return (static_cast<std::uint32_t>(p[0]) << 24) |
         (static_cast<std::uint32_t>(p[1]) << 16) |
         (static_cast<std::uint32_t>(p[2]) << 8) |
         static_cast<std::uint32_t>(p[3]);
}

}  // namespace detail

/// An IDX image tensor as stored on disk.
struct IdxImages {
  int count = 0, rows = 0, cols = 0;
  std::vector<std::uint8_t> pixels;  ///< count * rows * cols bytes

  const std::uint8_t* image(int i) const {
    return pixels.data() + static_cast<size_t>(i) * rows * cols;
  }
};

inline IdxImages load_idx_image_file(const std::filesystem::path& path) {
  const std::string raw = read_file(path);
  const auto* p = reinterpret_cast<const unsigned char*>(raw.data());
  if (raw.size() < 16)
    throw MalformedFileError(strfmt(
        "%s: truncated header at offset 0 (need 16 bytes, file has %zu)",
        path.string().c_str(), raw.size()));
  const std::uint32_t magic = detail::be32(p);
  if (magic != 2051u)
    throw MalformedFileError(
        strfmt("%s: bad magic 0x%08X at offset 0 (expected 0x00000803)",
               path.string().c_str(), magic));
  IdxImages out;
  out.count = static_cast<int>(detail::be32(p + 4));
  out.rows = static_cast<int>(detail::be32(p + 8));
  out.cols = static_cast<int>(detail::be32(p + 12));
  if (out.count < 1 || out.rows < 1 || out.cols < 1 || out.rows > 4096 ||
      out.cols > 4096)
    throw MalformedFileError(
        strfmt("%s: implausible dimensions %d x %d x %d in header",
               path.string().c_str(), out.count, out.rows, out.cols));
  const std::uint64_t expected =
      16ull + static_cast<std::uint64_t>(out.count) * out.rows * out.cols;
  if (raw.size() != expected)
    throw MalformedFileError(strfmt(
        "%s: expected %llu bytes (data begins at offset 16), file has %zu",
        path.string().c_str(), static_cast<unsigned long long>(expected),
        raw.size()));
  out.pixels.assign(p + 16, p + raw.size());
  return out;
}

inline std::vector<std::uint8_t> load_idx_label_file(
    const std::filesystem::path& path) {
  const std::string raw = read_file(path);
  const auto* p = reinterpret_cast<const unsigned char*>(raw.data());
  if (raw.size() < 8)
    throw MalformedFileError(strfmt(
        "%s: truncated header at offset 0 (need 8 bytes, file has %zu)",
        path.string().c_str(), raw.size()));
  const std::uint32_t magic = detail::be32(p);
  if (magic != 2049u)
    throw MalformedFileError(
        strfmt("%s: bad magic 0x%08X at offset 0 (expected 0x00000801)",
               path.string().c_str(), magic));
  const std::uint32_t count = detail::be32(p + 4);
  if (raw.size() != 8ull + count)
    throw MalformedFileError(
        strfmt("%s: expected %llu bytes (data begins at offset 8), file has %zu",
               path.string().c_str(), 8ull + count, raw.size()));
  for (std::uint32_t i = 0; i < count; ++i)
    if (p[8 + i] > 9)
      throw MalformedFileError(strfmt("%s: label %u at offset %u out of 0-9",
                                      path.string().c_str(),
                                      static_cast<unsigned>(p[8 + i]), 8 + i));
  return std::vector<std::uint8_t>(p + 8, p + raw.size());
}

/// Images plus labels, loaded together and cross-checked.
struct MnistData {
  int count = 0;
  std::vector<std::uint8_t> images;  ///< count * 784, row-major 28x28
  std::vector<std::uint8_t> labels;

  const std::uint8_t* image(int i) const {
    return images.data() + static_cast<size_t>(i) * kImageDim;
  }
};

inline MnistData load_idx_images(const std::filesystem::path& images_path,
                                 const std::filesystem::path& labels_path) {
  IdxImages imgs = load_idx_image_file(images_path);
  if (imgs.rows != kImageSide || imgs.cols != kImageSide)
    throw MalformedFileError(
        strfmt("%s: expected 28x28 images, got %dx%d",
               images_path.string().c_str(), imgs.rows, imgs.cols));
  std::vector<std::uint8_t> labels = load_idx_label_file(labels_path);
  if (labels.size() != static_cast<size_t>(imgs.count))
    throw MalformedFileError(strfmt(
        "%s / %s: %d images but %zu labels", images_path.string().c_str(),
        labels_path.string().c_str(), imgs.count, labels.size()));
  MnistData out;
  out.count = imgs.count;
  out.images = std::move(imgs.pixels);
  out.labels = std::move(labels);
  return out;
}

/// The four canonical MNIST files, train and test splits concatenated.
inline MnistData load_mnist_dir(const std::filesystem::path& dir) {
  MnistData train = load_idx_images(dir / "train-images-idx3-ubyte",
                                    dir / "train-labels-idx1-ubyte");
  MnistData heldout = load_idx_images(dir / "t10k-images-idx3-ubyte",
                                      dir / "t10k-labels-idx1-ubyte");
  train.images.insert(train.images.end(), heldout.images.begin(),
                      heldout.images.end());
  train.labels.insert(train.labels.end(), heldout.labels.begin(),
                      heldout.labels.end());
  train.count += heldout.count;
  return train;
}

}  // namespace mmdr
