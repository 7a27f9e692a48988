#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "sepscan/fetch.hpp"

#include <fstream>
#include <httplib.h>
#include <nlohmann/json.hpp>

#include "sepscan/dataset.hpp"
#include "sepscan/idx.hpp"

namespace sepscan {

std::map<std::string, std::string> FetchConfig::default_mnist_sha256() {
  // SHA-256 of the raw IDX bytes of the standard MNIST distribution.
  return {
      {kTrainImagesFile,
       "ba891046e6505d7aadcbbe25680a0738ad16aec93bde7f9b65e87a2fc25776db"},
      {kTrainLabelsFile,
       "65a50cbbf4e906d70832878ad85ccda5333a97f0f4c3dd2ef09a8a9eef7101c5"},
      {kTestImagesFile,
       "0fa7898d509279e482958e8ce81c8e77db3f2f8254e26661ceb7762c4d494ce7"},
      {kTestLabelsFile,
       "ff7bcfd416de33731a308c3f266cc351222c34898ecbeaf847f06e48f7ec33f2"},
  };
}

std::map<std::string, std::string> load_checksum_file(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Fault::io, "cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Fault::parse,
                "checksum file " + path.string() + ": " + e.what());
  }
  std::map<std::string, std::string> out;
  for (const auto& [key, value] : j.items())
    out[key] = value.get<std::string>();
  return out;
}

namespace {

std::string expected_hash(const FetchConfig& config, const std::string& name) {
  auto it = config.sha256.find(name);
  return it == config.sha256.end() ? std::string() : it->second;
}

bool file_is_valid(const std::filesystem::path& path,
                   const std::string& expected) {
  if (!std::filesystem::exists(path)) return false;
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
  if (is_gzip(bytes)) return false;  // stored files must be raw IDX
  if (expected.empty()) return !bytes.empty();
  return sha256_hex(bytes) == expected;
}

struct UrlParts {
  std::string scheme_host;  // "https://host[:port]"
  std::string path;         // leading "/", trailing "/"
};

UrlParts parse_base_url(const std::string& base) {
  const size_t scheme_end = base.find("://");
  if (scheme_end == std::string::npos)
    throw Error(Fault::invalid_argument, "base URL needs a scheme: " + base);
  const size_t host_end = base.find('/', scheme_end + 3);
  UrlParts parts;
  if (host_end == std::string::npos) {
    parts.scheme_host = base;
    parts.path = "/";
  } else {
    parts.scheme_host = base.substr(0, host_end);
    parts.path = base.substr(host_end);
    if (parts.path.back() != '/') parts.path += '/';
  }
  return parts;
}

std::vector<uint8_t> http_get(const UrlParts& url, const std::string& name) {
  httplib::Client client(url.scheme_host);
  client.set_follow_location(true);
  client.set_connection_timeout(15, 0);
  client.set_read_timeout(120, 0);
  auto attempt = [&](const std::string& target) -> std::vector<uint8_t> {
    auto res = client.Get(target);
    if (!res || res->status != 200) return {};
    return std::vector<uint8_t>(res->body.begin(), res->body.end());
  };
  // Mirrors serve either the raw file or a .gz variant.
  std::vector<uint8_t> body = attempt(url.path + name);
  if (body.empty()) body = attempt(url.path + name + ".gz");
  if (body.empty())
    throw Error(Fault::network,
                "download failed for " + name + " from " + url.scheme_host +
                    url.path);
  return body;
}

void write_file_atomically(const std::filesystem::path& path,
                           const std::vector<uint8_t>& bytes) {
  const std::filesystem::path tmp = path.string() + ".part";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Fault::io, "cannot open " + tmp.string());
    out.write(reinterpret_cast<const char*>(bytes.data()),
              std::streamsize(bytes.size()));
    if (!out) throw Error(Fault::io, "write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace

std::vector<std::filesystem::path> fetch_split(
    const FetchConfig& config, const std::filesystem::path& dest) {
  std::filesystem::create_directories(dest);
  const UrlParts url = parse_base_url(config.base_url);

  std::vector<std::filesystem::path> paths;
  for (const char* name : kMnistFiles) {
    const std::filesystem::path path = dest / name;
    const std::string expected = expected_hash(config, name);
    if (file_is_valid(path, expected)) {
      paths.push_back(path);
      continue;
    }
    std::vector<uint8_t> bytes = http_get(url, name);
    if (is_gzip(bytes)) bytes = gunzip(bytes);
    if (!expected.empty()) {
      const std::string actual = sha256_hex(bytes);
      if (actual != expected)
        throw Error(Fault::checksum_mismatch,
                    std::string(name) + ": downloaded bytes hash to " + actual +
                        ", expected " + expected);
    }
    // Structural validation; catches a mirror serving garbage when no
    // checksum is configured.
    if (std::string(name).find("images") != std::string::npos)
      parse_idx_images(bytes);
    else
      parse_idx_labels(bytes);
    write_file_atomically(path, bytes);
    paths.push_back(path);
  }
  return paths;
}

}  // namespace sepscan
