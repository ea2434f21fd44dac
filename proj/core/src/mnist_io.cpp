#include "music/mnist_io.hpp"

#include <fstream>
#include <stdexcept>

namespace music {

namespace {

constexpr std::uint32_t kImageMagic = 0x00000803u;
constexpr std::uint32_t kLabelMagic = 0x00000801u;

std::uint32_t read_u32_be(std::istream& in, const std::string& path) {
  unsigned char buf[4];
  in.read(reinterpret_cast<char*>(buf), 4);
  if (!in) throw std::runtime_error("truncated IDX header: " + path);
  return (std::uint32_t(buf[0]) << 24) | (std::uint32_t(buf[1]) << 16) |
         (std::uint32_t(buf[2]) << 8) | std::uint32_t(buf[3]);
}

void write_u32_be(std::ostream& out, std::uint32_t v) {
  const unsigned char buf[4] = {
      static_cast<unsigned char>(v >> 24), static_cast<unsigned char>(v >> 16),
      static_cast<unsigned char>(v >> 8), static_cast<unsigned char>(v)};
  out.write(reinterpret_cast<const char*>(buf), 4);
}

} // namespace

MnistData load_mnist_idx(const std::string& images_path,
                         const std::string& labels_path) {
  std::ifstream img(images_path, std::ios::binary);
  if (!img) throw std::runtime_error("cannot open IDX file: " + images_path);
  if (read_u32_be(img, images_path) != kImageMagic)
    throw std::runtime_error("bad IDX image magic: " + images_path);
  const auto count = read_u32_be(img, images_path);
  const auto rows = read_u32_be(img, images_path);
  const auto cols = read_u32_be(img, images_path);
  const std::size_t pixels = std::size_t(rows) * cols;

  std::ifstream lab(labels_path, std::ios::binary);
  if (!lab) throw std::runtime_error("cannot open IDX file: " + labels_path);
  if (read_u32_be(lab, labels_path) != kLabelMagic)
    throw std::runtime_error("bad IDX label magic: " + labels_path);
  const auto label_count = read_u32_be(lab, labels_path);
  if (label_count != count)
    throw std::runtime_error("IDX image/label count mismatch: " + images_path);

  MnistData out;
  out.image_rows = static_cast<int>(rows);
  out.image_cols = static_cast<int>(cols);
  out.data.resize(count, static_cast<int>(pixels));
  out.labels.resize(count);

  std::vector<unsigned char> buf(pixels);
  for (std::uint32_t i = 0; i < count; ++i) {
    img.read(reinterpret_cast<char*>(buf.data()),
             static_cast<std::streamsize>(pixels));
    if (!img) throw std::runtime_error("truncated IDX images: " + images_path);
    for (std::size_t p = 0; p < pixels; ++p)
      out.data(i, static_cast<int>(p)) = buf[p] / 255.0;
  }
  for (std::uint32_t i = 0; i < count; ++i) {
    char b = 0;
    lab.read(&b, 1);
    if (!lab) throw std::runtime_error("truncated IDX labels: " + labels_path);
    out.labels[i] = static_cast<unsigned char>(b);
  }
  return out;
}

void write_idx_images(const std::string& path,
                      const std::vector<std::vector<std::uint8_t>>& images,
                      int rows, int cols) {
  if (rows < 1 || cols < 1)
    throw ContractError("write_idx_images: non-positive image shape");
  const std::size_t pixels = std::size_t(rows) * cols;
  for (const auto& im : images)
    if (im.size() != pixels)
      throw ContractError("write_idx_images: image byte count mismatch");

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  write_u32_be(out, kImageMagic);
  write_u32_be(out, static_cast<std::uint32_t>(images.size()));
  write_u32_be(out, static_cast<std::uint32_t>(rows));
  write_u32_be(out, static_cast<std::uint32_t>(cols));
  for (const auto& im : images)
    out.write(reinterpret_cast<const char*>(im.data()),
              static_cast<std::streamsize>(im.size()));
  if (!out) throw std::runtime_error("write failed: " + path);
}

void write_idx_labels(const std::string& path,
                      const std::vector<std::uint8_t>& labels) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  write_u32_be(out, kLabelMagic);
  write_u32_be(out, static_cast<std::uint32_t>(labels.size()));
  out.write(reinterpret_cast<const char*>(labels.data()),
            static_cast<std::streamsize>(labels.size()));
  if (!out) throw std::runtime_error("write failed: " + path);
}

} // namespace music
