#pragma once

#include <optional>
#include <string>

#include "core/dataset.hpp"

namespace nrc {

// IDX (big-endian) image/label pair loader. Expects magic 0x00000803 for
// images and 0x00000801 for labels. Pixels land in [0,1] (divided by 255),
// one image per column; labels become class_labels plus one-hot y rows.
// `limit` truncates to the first N examples.
Dataset load_idx(const std::string& images_path, const std::string& labels_path,
                 std::optional<std::size_t> limit = std::nullopt);

// Inverse of load_idx for datasets whose x entries are multiples of 1/255;
// used to build fixtures and round-trip checks.
void save_idx(const Dataset& ds, std::size_t image_rows, std::size_t image_cols,
              const std::string& images_path, const std::string& labels_path);

}  // namespace nrc
