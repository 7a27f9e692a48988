#include "sepscan/idx.hpp"

#include <zlib.h>

#include <cstring>

namespace sepscan {

namespace {

uint32_t read_be32(const uint8_t* p) {
  return (uint32_t(p[0]) << 24) | (uint32_t(p[1]) << 16) |
         (uint32_t(p[2]) << 8) | uint32_t(p[3]);
}

void write_be32(std::vector<uint8_t>& out, uint32_t v) {
  out.push_back(uint8_t(v >> 24));
  out.push_back(uint8_t(v >> 16));
  out.push_back(uint8_t(v >> 8));
  out.push_back(uint8_t(v));
}

}  // namespace

RawImageSet parse_idx_images(std::span<const uint8_t> bytes) {
  if (bytes.size() < 16)
    throw Error(Fault::truncated, "IDX image header needs 16 bytes, got " +
                                      std::to_string(bytes.size()));
  const uint32_t magic = read_be32(bytes.data());
  if (magic != kIdxImageMagic)
    throw Error(Fault::bad_magic,
                "IDX image magic: expected 2051, got " + std::to_string(magic));
  RawImageSet set;
  set.count = read_be32(bytes.data() + 4);
  set.rows = read_be32(bytes.data() + 8);
  set.cols = read_be32(bytes.data() + 12);
  const size_t payload = size_t(set.count) * set.rows * set.cols;
  if (bytes.size() < 16 + payload)
    throw Error(Fault::truncated,
                "IDX image payload: expected " + std::to_string(payload) +
                    " bytes, got " + std::to_string(bytes.size() - 16));
  if (bytes.size() > 16 + payload)
    throw Error(Fault::trailing_bytes,
                "IDX image file has " +
                    std::to_string(bytes.size() - 16 - payload) +
                    " trailing bytes");
  set.pixels.assign(bytes.begin() + 16, bytes.end());
  return set;
}

RawLabelSet parse_idx_labels(std::span<const uint8_t> bytes) {
  if (bytes.size() < 8)
    throw Error(Fault::truncated, "IDX label header needs 8 bytes, got " +
                                      std::to_string(bytes.size()));
  const uint32_t magic = read_be32(bytes.data());
  if (magic != kIdxLabelMagic)
    throw Error(Fault::bad_magic,
                "IDX label magic: expected 2049, got " + std::to_string(magic));
  RawLabelSet set;
  set.count = read_be32(bytes.data() + 4);
  if (bytes.size() < 8 + size_t(set.count))
    throw Error(Fault::truncated,
                "IDX label payload: expected " + std::to_string(set.count) +
                    " bytes, got " + std::to_string(bytes.size() - 8));
  if (bytes.size() > 8 + size_t(set.count))
    throw Error(Fault::trailing_bytes,
                "IDX label file has " +
                    std::to_string(bytes.size() - 8 - set.count) +
                    " trailing bytes");
  set.labels.assign(bytes.begin() + 8, bytes.end());
  for (size_t i = 0; i < set.labels.size(); ++i)
    if (set.labels[i] > 9)
      throw Error(Fault::label_out_of_range,
                  "label " + std::to_string(int(set.labels[i])) + " at index " +
                      std::to_string(i) + " outside [0, 9]");
  return set;
}

std::vector<uint8_t> serialize_idx(const RawImageSet& set) {
  std::vector<uint8_t> out;
  out.reserve(16 + set.pixels.size());
  write_be32(out, kIdxImageMagic);
  write_be32(out, set.count);
  write_be32(out, set.rows);
  write_be32(out, set.cols);
  out.insert(out.end(), set.pixels.begin(), set.pixels.end());
  return out;
}

std::vector<uint8_t> serialize_idx(const RawLabelSet& set) {
  std::vector<uint8_t> out;
  out.reserve(8 + set.labels.size());
  write_be32(out, kIdxLabelMagic);
  write_be32(out, set.count);
  out.insert(out.end(), set.labels.begin(), set.labels.end());
  return out;
}

bool is_gzip(std::span<const uint8_t> bytes) {
  return bytes.size() >= 2 && bytes[0] == 0x1f && bytes[1] == 0x8b;
}

std::vector<uint8_t> gunzip(std::span<const uint8_t> bytes) {
  z_stream zs;
  std::memset(&zs, 0, sizeof(zs));
  // 16 + MAX_WBITS: accept gzip wrapper
  if (inflateInit2(&zs, 16 + MAX_WBITS) != Z_OK)
    throw Error(Fault::parse, "zlib inflateInit2 failed");
  zs.next_in = const_cast<Bytef*>(bytes.data());
  zs.avail_in = uInt(bytes.size());

  std::vector<uint8_t> out;
  std::vector<uint8_t> buf(1 << 20);
  int rc = Z_OK;
  while (rc != Z_STREAM_END) {
    zs.next_out = buf.data();
    zs.avail_out = uInt(buf.size());
    rc = inflate(&zs, Z_NO_FLUSH);
    if (rc != Z_OK && rc != Z_STREAM_END) {
      inflateEnd(&zs);
      throw Error(Fault::parse, "gzip stream corrupt (zlib rc " +
                                    std::to_string(rc) + ")");
    }
    out.insert(out.end(), buf.data(), buf.data() + (buf.size() - zs.avail_out));
  }
  inflateEnd(&zs);
  return out;
}

}  // namespace sepscan
