#include "core/idx.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <vector>

#include "core/errors.hpp"

namespace nrc {

namespace {

constexpr std::uint32_t kImagesMagic = 0x00000803;
constexpr std::uint32_t kLabelsMagic = 0x00000801;

std::uint32_t read_u32_be(std::istream& in, const std::string& path) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  require(static_cast<bool>(in), ErrorCode::FormatError, "truncated IDX header in " + path);
  return (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) | (std::uint32_t(b[2]) << 8) |
         std::uint32_t(b[3]);
}

void write_u32_be(std::ostream& out, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v >> 24), static_cast<unsigned char>(v >> 16),
                        static_cast<unsigned char>(v >> 8), static_cast<unsigned char>(v)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

std::string hex_magic(std::uint32_t m) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "0x%08x", m);
  return buf;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::IoError, "cannot open " + path);
  return in;
}

}  // namespace

Dataset load_idx(const std::string& images_path, const std::string& labels_path,
                 std::optional<std::size_t> limit) {
  std::ifstream img = open_input(images_path);
  const std::uint32_t img_magic = read_u32_be(img, images_path);
  require(img_magic == kImagesMagic, ErrorCode::FormatError,
          "bad images magic " + hex_magic(img_magic) + " in " + images_path + " (expected " +
              hex_magic(kImagesMagic) + ")");
  const std::size_t n_images = read_u32_be(img, images_path);
  const std::size_t rows = read_u32_be(img, images_path);
  const std::size_t cols = read_u32_be(img, images_path);

  std::ifstream lbl = open_input(labels_path);
  const std::uint32_t lbl_magic = read_u32_be(lbl, labels_path);
  require(lbl_magic == kLabelsMagic, ErrorCode::FormatError,
          "bad labels magic " + hex_magic(lbl_magic) + " in " + labels_path + " (expected " +
              hex_magic(kLabelsMagic) + ")");
  const std::size_t n_labels = read_u32_be(lbl, labels_path);
  require(n_images == n_labels, ErrorCode::Mismatch,
          "image count " + std::to_string(n_images) + " != label count " +
              std::to_string(n_labels));

  const std::size_t n = limit ? std::min(*limit, n_images) : n_images;
  require(n >= 1, ErrorCode::InvalidArgument, "IDX pair holds no examples after limit");
  const std::size_t pixels = rows * cols;
  require(pixels >= 1, ErrorCode::FormatError, "IDX images have zero pixels");

  std::vector<unsigned char> img_buf(pixels);
  Dataset ds;
  ds.x = Matrix(pixels, n);
  std::vector<std::size_t> labels(n);
  std::size_t max_label = 0;
  for (std::size_t i = 0; i < n; ++i) {
    img.read(reinterpret_cast<char*>(img_buf.data()), static_cast<std::streamsize>(pixels));
    require(static_cast<bool>(img), ErrorCode::FormatError,
            "truncated image data in " + images_path);
    for (std::size_t p = 0; p < pixels; ++p) ds.x(p, i) = static_cast<double>(img_buf[p]) / 255.0;
    unsigned char l = 0;
    lbl.read(reinterpret_cast<char*>(&l), 1);
    require(static_cast<bool>(lbl), ErrorCode::FormatError,
            "truncated label data in " + labels_path);
    labels[i] = l;
    max_label = std::max(max_label, labels[i]);
  }

  ds.y = Matrix(max_label + 1, n, 0.0);
  for (std::size_t i = 0; i < n; ++i) ds.y(labels[i], i) = 1.0;
  ds.class_labels = std::move(labels);
  return ds;
}

void save_idx(const Dataset& ds, std::size_t image_rows, std::size_t image_cols,
              const std::string& images_path, const std::string& labels_path) {
  require(ds.class_labels.has_value(), ErrorCode::Precondition, "save_idx needs class labels");
  require(image_rows * image_cols == ds.x.rows(), ErrorCode::Mismatch,
          "save_idx image shape does not match x rows");
  std::ofstream img(images_path, std::ios::binary);
  require(static_cast<bool>(img), ErrorCode::IoError, "cannot write " + images_path);
  write_u32_be(img, kImagesMagic);
  write_u32_be(img, static_cast<std::uint32_t>(ds.n()));
  write_u32_be(img, static_cast<std::uint32_t>(image_rows));
  write_u32_be(img, static_cast<std::uint32_t>(image_cols));
  for (std::size_t i = 0; i < ds.n(); ++i) {
    for (std::size_t p = 0; p < ds.x.rows(); ++p) {
      const double v = ds.x(p, i) * 255.0;
      img.put(static_cast<char>(static_cast<unsigned char>(std::lround(v))));
    }
  }

  std::ofstream lbl(labels_path, std::ios::binary);
  require(static_cast<bool>(lbl), ErrorCode::IoError, "cannot write " + labels_path);
  write_u32_be(lbl, kLabelsMagic);
  write_u32_be(lbl, static_cast<std::uint32_t>(ds.n()));
  for (std::size_t l : *ds.class_labels) lbl.put(static_cast<char>(static_cast<unsigned char>(l)));
}

}  // namespace nrc
