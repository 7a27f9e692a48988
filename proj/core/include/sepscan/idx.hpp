#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sepscan/types.hpp"

namespace sepscan {

// IDX container format, bit-exact: 4-byte big-endian magic (2051 for image
// files, 2049 for label files), big-endian 32-bit dimension sizes, then the
// raw unsigned byte payload.

constexpr uint32_t kIdxImageMagic = 2051;
constexpr uint32_t kIdxLabelMagic = 2049;

struct RawImageSet {
  uint32_t count = 0;
  uint32_t rows = 0;
  uint32_t cols = 0;
  std::vector<uint8_t> pixels;  // count * rows * cols, row-major per image

  const uint8_t* image(size_t i) const { return pixels.data() + i * rows * cols; }
  friend bool operator==(const RawImageSet&, const RawImageSet&) = default;
};

struct RawLabelSet {
  uint32_t count = 0;
  std::vector<uint8_t> labels;  // each in [0, 9]

  friend bool operator==(const RawLabelSet&, const RawLabelSet&) = default;
};

/// Decodes an IDX image file. Throws Error{bad_magic, truncated,
/// trailing_bytes} on malformed input. Parsing is bit-exact; pixel values
/// are not transformed.
RawImageSet parse_idx_images(std::span<const uint8_t> bytes);

/// Decodes an IDX label file. Labels are validated into [0, 9]
/// (Error{label_out_of_range} otherwise).
RawLabelSet parse_idx_labels(std::span<const uint8_t> bytes);

std::vector<uint8_t> serialize_idx(const RawImageSet& set);
std::vector<uint8_t> serialize_idx(const RawLabelSet& set);

/// True if the buffer starts with the gzip magic bytes 0x1f 0x8b.
bool is_gzip(std::span<const uint8_t> bytes);

/// Inflates a gzip stream. Throws Error{parse} on corrupt input.
std::vector<uint8_t> gunzip(std::span<const uint8_t> bytes);

}  // namespace sepscan
