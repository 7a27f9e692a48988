#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <zlib.h>

#include <algorithm>
#include <fstream>

#include "sepscan/dataset.hpp"
#include "testutil.hpp"

using namespace sepscan;
using namespace sepscan::testing;

namespace {

void write_bytes(const std::filesystem::path& path,
                 const std::vector<uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            std::streamsize(bytes.size()));
}

// Four-file directory with 3 train and 2 test samples of dimension 2x2.
std::filesystem::path tiny_mnist_dir() {
  static const auto dir = [] {
    auto d = make_temp_dir("dataset");
    write_bytes(d / kTrainImagesFile,
                idx_image_bytes(2051, 3, 2, 2,
                                {0, 1, 2, 3, 10, 11, 12, 13, 20, 21, 22, 23}));
    write_bytes(d / kTrainLabelsFile, idx_label_bytes(2049, 3, {0, 1, 2}));
    write_bytes(d / kTestImagesFile,
                idx_image_bytes(2051, 2, 2, 2, {40, 41, 42, 43, 50, 51, 52, 53}));
    write_bytes(d / kTestLabelsFile, idx_label_bytes(2049, 2, {3, 4}));
    return d;
  }();
  return dir;
}

}  // namespace

TEST_CASE("splits load with the expected sizes and labels") {
  const auto train = load_split(tiny_mnist_dir(), Split::train);
  CHECK(train.size() == 3);
  CHECK(train.label(2) == 2);
  const auto test = load_split(tiny_mnist_dir(), Split::test);
  CHECK(test.size() == 2);
  CHECK(test.image(1)[0] == 50);
}

TEST_CASE("combined split is train then test in file order") {
  const auto combined = load_split(tiny_mnist_dir(), Split::combined);
  const auto test = load_split(tiny_mnist_dir(), Split::test);
  REQUIRE(combined.size() == 5);
  // sample index 3 (= train size) equals test sample index 0
  CHECK(std::equal(combined.image(3), combined.image(3) + 4, test.image(0)));
  CHECK(combined.label(3) == test.label(0));
  CHECK(combined.label(0) == 0);
}

TEST_CASE("loading twice yields identical data and fingerprint") {
  const auto a = load_split(tiny_mnist_dir(), Split::combined);
  const auto b = load_split(tiny_mnist_dir(), Split::combined);
  CHECK(a.images == b.images);
  CHECK(a.labels == b.labels);
  CHECK(a.source_fingerprint == b.source_fingerprint);
  CHECK(a.source_fingerprint.substr(0, 7) == "sha256:");
  // train and combined fingerprints must differ
  CHECK(load_split(tiny_mnist_dir(), Split::train).source_fingerprint !=
        a.source_fingerprint);
}

TEST_CASE("gzip-wrapped files load identically") {
  const auto dir = make_temp_dir("dataset_gz");
  const auto plain = tiny_mnist_dir();
  for (const char* name : kMnistFiles) {
    std::ifstream in(plain / name, std::ios::binary);
    std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                               std::istreambuf_iterator<char>());
    // gzip-compress into <name>.gz only
    std::vector<uint8_t> compressed(bytes.size() + 256);
    z_stream zs{};
    REQUIRE(deflateInit2(&zs, Z_BEST_SPEED, Z_DEFLATED, 16 + MAX_WBITS, 8,
                         Z_DEFAULT_STRATEGY) == Z_OK);
    zs.next_in = bytes.data();
    zs.avail_in = uInt(bytes.size());
    zs.next_out = compressed.data();
    zs.avail_out = uInt(compressed.size());
    REQUIRE(deflate(&zs, Z_FINISH) == Z_STREAM_END);
    compressed.resize(compressed.size() - zs.avail_out);
    deflateEnd(&zs);
    write_bytes(dir / (std::string(name) + ".gz"), compressed);
  }
  const auto from_gz = load_split(dir, Split::combined);
  const auto from_plain = load_split(plain, Split::combined);
  CHECK(from_gz.images == from_plain.images);
  CHECK(from_gz.labels == from_plain.labels);
  CHECK(from_gz.source_fingerprint == from_plain.source_fingerprint);
}

TEST_CASE("count mismatch between images and labels is rejected") {
  RawImageSet images;
  images.count = 2;
  images.rows = images.cols = 1;
  images.pixels = {1, 2};
  RawLabelSet labels;
  labels.count = 3;
  labels.labels = {0, 1, 2};
  try {
    make_dataset(Split::train, images, labels, "fp");
    FAIL("expected count mismatch");
  } catch (const Error& e) {
    CHECK(e.fault() == Fault::count_mismatch);
  }
}

TEST_CASE("digit counts and canonical-count detection") {
  const auto ds = mini_dataset(Split::train);
  const auto counts = digit_counts(*ds);
  for (int d = 0; d < 10; ++d) CHECK(counts[d] == 6);
  CHECK_FALSE(has_canonical_mnist_counts(*ds));  // synthetic, not MNIST
}
