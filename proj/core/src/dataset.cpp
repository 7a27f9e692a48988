#include "sepscan/dataset.hpp"

#include <openssl/evp.h>

#include <fstream>

namespace sepscan {

namespace {

// Canonical per-digit counts of the standard MNIST distribution.
constexpr std::array<uint32_t, 10> kTrainDigitCounts = {
    5923, 6742, 5958, 6131, 5842, 5421, 5918, 6265, 5851, 5949};
constexpr std::array<uint32_t, 10> kTestDigitCounts = {
    980, 1135, 1032, 1010, 982, 892, 958, 1028, 974, 1009};

std::vector<uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Fault::io, "cannot open " + path.string());
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
  return bytes;
}

// Reads <dir>/<name>, falling back to <dir>/<name>.gz; returns the raw IDX
// bytes in either case.
std::vector<uint8_t> read_idx_file(const std::filesystem::path& dir,
                                   const std::string& name) {
  std::filesystem::path plain = dir / name;
  std::filesystem::path gz = dir / (name + ".gz");
  std::vector<uint8_t> bytes;
  if (std::filesystem::exists(plain))
    bytes = read_file(plain);
  else if (std::filesystem::exists(gz))
    bytes = read_file(gz);
  else
    throw Error(Fault::io, "missing " + plain.string() + " (or .gz)");
  if (is_gzip(bytes)) bytes = gunzip(bytes);
  return bytes;
}

struct ParsedSplit {
  RawImageSet images;
  RawLabelSet labels;
  std::string fingerprint_material;
};

ParsedSplit load_raw_split(const std::filesystem::path& dir, bool test_files) {
  const std::string image_name = test_files ? kTestImagesFile : kTrainImagesFile;
  const std::string label_name = test_files ? kTestLabelsFile : kTrainLabelsFile;
  auto image_bytes = read_idx_file(dir, image_name);
  auto label_bytes = read_idx_file(dir, label_name);
  ParsedSplit out;
  out.images = parse_idx_images(image_bytes);
  out.labels = parse_idx_labels(label_bytes);
  out.fingerprint_material = image_name + ":" + sha256_hex(image_bytes) + ";" +
                             label_name + ":" + sha256_hex(label_bytes);
  return out;
}

}  // namespace

std::string sha256_hex(std::span<const uint8_t> bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr);
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xf]);
  }
  return out;
}

std::string sha256_hex(const std::string& text) {
  return sha256_hex(std::span<const uint8_t>(
      reinterpret_cast<const uint8_t*>(text.data()), text.size()));
}

LabeledDataset make_dataset(Split split, RawImageSet images, RawLabelSet labels,
                            std::string source_fingerprint) {
  if (images.count != labels.count)
    throw Error(Fault::count_mismatch,
                "image count " + std::to_string(images.count) +
                    " != label count " + std::to_string(labels.count));
  LabeledDataset ds;
  ds.split = split;
  ds.images = std::move(images);
  ds.labels = std::move(labels);
  ds.source_fingerprint = std::move(source_fingerprint);
  return ds;
}

LabeledDataset load_split(const std::filesystem::path& dir, Split split) {
  if (split == Split::combined) {
    ParsedSplit train = load_raw_split(dir, false);
    ParsedSplit test = load_raw_split(dir, true);
    if (train.images.rows != test.images.rows ||
        train.images.cols != test.images.cols)
      throw Error(Fault::dimension_mismatch,
                  "train and test image dimensions differ");
    RawImageSet images;
    images.rows = train.images.rows;
    images.cols = train.images.cols;
    images.count = train.images.count + test.images.count;
    images.pixels = std::move(train.images.pixels);
    images.pixels.insert(images.pixels.end(), test.images.pixels.begin(),
                         test.images.pixels.end());
    RawLabelSet labels;
    labels.count = train.labels.count + test.labels.count;
    labels.labels = std::move(train.labels.labels);
    labels.labels.insert(labels.labels.end(), test.labels.labels.begin(),
                         test.labels.labels.end());
    std::string fp = "sha256:" + sha256_hex(train.fingerprint_material + ";" +
                                            test.fingerprint_material);
    return make_dataset(split, std::move(images), std::move(labels),
                        std::move(fp));
  }
  ParsedSplit parsed = load_raw_split(dir, split == Split::test);
  std::string fp = "sha256:" + sha256_hex(parsed.fingerprint_material);
  return make_dataset(split, std::move(parsed.images), std::move(parsed.labels),
                      std::move(fp));
}

std::shared_ptr<const LabeledDataset> load_split_shared(
    const std::filesystem::path& dir, Split split) {
  return std::make_shared<const LabeledDataset>(load_split(dir, split));
}

std::array<uint32_t, 10> digit_counts(const LabeledDataset& ds) {
  std::array<uint32_t, 10> counts{};
  for (uint32_t i = 0; i < ds.size(); ++i) counts[ds.label(i)]++;
  return counts;
}

bool has_canonical_mnist_counts(const LabeledDataset& ds) {
  if (ds.images.rows != 28 || ds.images.cols != 28) return false;
  const auto counts = digit_counts(ds);
  switch (ds.split) {
    case Split::train:
      return ds.size() == 60000 && counts == kTrainDigitCounts;
    case Split::test:
      return ds.size() == 10000 && counts == kTestDigitCounts;
    case Split::combined: {
      if (ds.size() != 70000) return false;
      for (int d = 0; d < 10; ++d)
        if (counts[d] != kTrainDigitCounts[d] + kTestDigitCounts[d])
          return false;
      return true;
    }
  }
  return false;
}

}  // namespace sepscan
