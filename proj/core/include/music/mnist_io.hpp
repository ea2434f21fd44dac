#pragma once

#include "music/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace music {

struct MnistData {
  Matrix data;             // M x (rows*cols), pixel values scaled to [0, 1]
  std::vector<int> labels; // M entries
  int image_rows = 0;
  int image_cols = 0;
};

/// Load an IDX image/label file pair (magic 0x00000803 / 0x00000801,
/// big-endian dimensions, unsigned byte payload). Images are flattened
/// row-major and scaled by 1/255. Throws std::runtime_error on bad magic,
/// truncation, or an image/label count mismatch.
MnistData load_mnist_idx(const std::string& images_path,
                         const std::string& labels_path);

/// Write IDX files in the same format; `images` holds rows*cols bytes per
/// image. Used for fixtures and synthetic corpora.
void write_idx_images(const std::string& path,
                      const std::vector<std::vector<std::uint8_t>>& images,
                      int rows, int cols);
void write_idx_labels(const std::string& path,
                      const std::vector<std::uint8_t>& labels);

} // namespace music
