#pragma once

#include <array>
#include <filesystem>
#include <memory>
#include <string>

#include "sepscan/idx.hpp"
#include "sepscan/types.hpp"

namespace sepscan {

// Canonical MNIST file names (raw IDX; a ".gz" suffix is accepted on disk).
constexpr const char* kTrainImagesFile = "train-images-idx3-ubyte";
constexpr const char* kTrainLabelsFile = "train-labels-idx1-ubyte";
constexpr const char* kTestImagesFile = "t10k-images-idx3-ubyte";
constexpr const char* kTestLabelsFile = "t10k-labels-idx1-ubyte";

inline constexpr std::array<const char*, 4> kMnistFiles = {
    kTrainImagesFile, kTrainLabelsFile, kTestImagesFile, kTestLabelsFile};

/// Immutable labeled image set for one split. For split=combined the
/// samples are train followed by test, in original file order, so sample
/// indexing is deterministic.
struct LabeledDataset {
  Split split = Split::train;
  RawImageSet images;
  RawLabelSet labels;
  std::string source_fingerprint;  // "sha256:<hex>" over the source IDX bytes

  uint32_t size() const { return images.count; }
  uint32_t dim() const { return images.rows * images.cols; }
  const uint8_t* image(size_t i) const { return images.image(i); }
  uint8_t label(size_t i) const { return labels.labels[i]; }
};

std::string sha256_hex(std::span<const uint8_t> bytes);
std::string sha256_hex(const std::string& text);

/// Builds a dataset from already-parsed sets; checks the image/label counts
/// agree (Error{count_mismatch}).
LabeledDataset make_dataset(Split split, RawImageSet images, RawLabelSet labels,
                            std::string source_fingerprint);

/// Loads one split from a directory holding the canonical MNIST files
/// (gzip-wrapped variants accepted). split=combined concatenates train then
/// test. The fingerprint hashes the raw (decompressed) IDX bytes.
LabeledDataset load_split(const std::filesystem::path& dir, Split split);

std::shared_ptr<const LabeledDataset> load_split_shared(
    const std::filesystem::path& dir, Split split);

std::array<uint32_t, 10> digit_counts(const LabeledDataset& ds);

/// True when the dataset matches the canonical MNIST distribution: total
/// count 60000/10000/70000 per split and the per-digit counts of the
/// standard files.
bool has_canonical_mnist_counts(const LabeledDataset& ds);

}  // namespace sepscan
