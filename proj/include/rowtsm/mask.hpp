// Binary crop-row masks: raster type, PGM (P5) codec, synthetic degradation.
#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace rowtsm {

// Row-major boolean raster; 1 = crop-row foreground, 0 = background.
struct BinaryMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;

    BinaryMask() = default;
    BinaryMask(int w, int h, bool fill = false);

    bool at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x] != 0; }
    void set(int x, int y, bool v) { pixels[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0; }
    bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }

    std::size_t foreground_count() const;

    bool operator==(const BinaryMask&) const = default;
};

// Knobs for mimicking CNN-prediction artifacts on a clean mask.
// All randomness comes from `seed`; equal (mask, spec) pairs give equal outputs.
struct DegradeSpec {
    int dropout_block_size = 8;
    double dropout_probability = 0.0;
    double speckle_probability = 0.0;
    int dilation_radius = 0;
    std::uint64_t seed = 0;

    void validate() const;  // throws std::invalid_argument
};

// PGM (P5) codec. Gray >= threshold maps to foreground on load; save emits
// 255 for foreground, 0 for background, maxval 255. Header comments are
// accepted on load and never emitted on save.
BinaryMask load_mask(std::span<const std::uint8_t> bytes, int threshold = 128);
std::vector<std::uint8_t> save_mask(const BinaryMask& mask);

BinaryMask load_mask_file(const std::filesystem::path& path, int threshold = 128);
void save_mask_file(const BinaryMask& mask, const std::filesystem::path& path);

// dilate -> block dropout -> speckle, deterministic in (mask, spec).
BinaryMask degrade(const BinaryMask& mask, const DegradeSpec& spec);

}  // namespace rowtsm
