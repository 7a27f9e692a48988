#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "sepscan/types.hpp"

namespace sepscan {

/// Where to download the four MNIST IDX files from and what the raw
/// (decompressed) bytes must hash to. Gzip-served mirrors are fine: payloads
/// are inflated before checksumming, so the expected hashes are
/// mirror-independent. An empty hash entry skips verification for that file.
struct FetchConfig {
  std::string base_url =
      "https://storage.googleapis.com/cvdf-datasets/mnist/";
  std::map<std::string, std::string> sha256 = default_mnist_sha256();

  static std::map<std::string, std::string> default_mnist_sha256();
};

/// Loads {"<filename>": "<sha256 hex>", ...} overrides from a JSON file.
std::map<std::string, std::string> load_checksum_file(
    const std::filesystem::path& path);

/// Ensures the four canonical MNIST files exist at dest with matching
/// checksums. Already-present valid files are not re-downloaded; a corrupt
/// file is re-fetched on its own. Stored files are always raw IDX bytes.
/// Throws Error{network} naming the file on HTTP failure and
/// Error{checksum_mismatch} when downloaded bytes do not hash as configured.
std::vector<std::filesystem::path> fetch_split(
    const FetchConfig& config, const std::filesystem::path& dest);

}  // namespace sepscan
