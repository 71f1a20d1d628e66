#pragma once

#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include <curl/curl.h>
#include <zlib.h>

#include "mmdr/common.hpp"
#include "mmdr/io_util.hpp"

namespace mmdr {

/// The four canonical IDX files with their decompressed byte sizes.
struct MnistFileInfo {
  const char* name;
  std::size_t raw_size;
};

inline const std::vector<MnistFileInfo>& mnist_files() {
  static const std::vector<MnistFileInfo> files = {
      {"train-images-idx3-ubyte", 47040016},
      {"train-labels-idx1-ubyte", 60008},
      {"t10k-images-idx3-ubyte", 7840016},
      {"t10k-labels-idx1-ubyte", 10008},
  };
  return files;
}

inline bool mnist_files_present(const std::filesystem::path& dir) {
  for (const MnistFileInfo& f : mnist_files()) {
    std::error_code ec;
    if (std::filesystem::file_size(dir / f.name, ec) != f.raw_size || ec)
      return false;
  }
  return true;
}

namespace detail {

inline size_t curl_sink(char* ptr, size_t size, size_t nmemb, void* userdata) {
  auto* buf = static_cast<std::string*>(userdata);
  buf->append(ptr, size * nmemb);
  return size * nmemb;
}

inline std::string http_get(const std::string& url) {
  CURL* curl = curl_easy_init();
  if (!curl) throw IoError("failed to initialize curl");
  std::string body;
  char errbuf[CURL_ERROR_SIZE] = {0};
  curl_easy_setopt(curl, CURLOPT_URL, url.c_str());
  curl_easy_setopt(curl, CURLOPT_FOLLOWLOCATION, 1L);
  curl_easy_setopt(curl, CURLOPT_WRITEFUNCTION, curl_sink);
  curl_easy_setopt(curl, CURLOPT_WRITEDATA, &body);
  curl_easy_setopt(curl, CURLOPT_ERRORBUFFER, errbuf);
  curl_easy_setopt(curl, CURLOPT_TIMEOUT, 300L);
  curl_easy_setopt(curl, CURLOPT_FAILONERROR, 1L);
  const CURLcode rc = curl_easy_perform(curl);
  long status = 0;
  curl_easy_getinfo(curl, CURLINFO_RESPONSE_CODE, &status);
  curl_easy_cleanup(curl);
  if (rc != CURLE_OK)
    throw IoError(strfmt("download of %s failed: %s", url.c_str(),
                         errbuf[0] ? errbuf : curl_easy_strerror(rc)));
  if (status != 200)
    throw IoError(strfmt("download of %s failed: HTTP %ld", url.c_str(), status));
  return body;
}

inline std::string gunzip(const std::string& compressed) {
  z_stream zs;
  std::memset(&zs, 0, sizeof(zs));
  if (inflateInit2(&zs, 16 + MAX_WBITS) != Z_OK)
    throw IoError("zlib initialization failed");
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(compressed.data()));
  zs.avail_in = static_cast<uInt>(compressed.size());
  std::string out;
  char chunk[65536];
  int rc = Z_OK;
  do {
    zs.next_out = reinterpret_cast<Bytef*>(chunk);
    zs.avail_out = sizeof(chunk);
    rc = inflate(&zs, Z_NO_FLUSH);
    if (rc != Z_OK && rc != Z_STREAM_END) {
      inflateEnd(&zs);
      throw MalformedFileError(strfmt("gzip decompression failed (zlib %d)", rc));
    }
    out.append(chunk, sizeof(chunk) - zs.avail_out);
  } while (rc != Z_STREAM_END);
  inflateEnd(&zs);
  return out;
}

}  // namespace detail

/// Fetch any missing IDX files into dir, trying each mirror in turn.
/// Files already present with the right size are left untouched.
inline void download_mnist(const std::filesystem::path& dir) {
  static const std::vector<std::string> mirrors = {
      "https://ossci-datasets.s3.amazonaws.com/mnist/",
      "https://storage.googleapis.com/cvdf-datasets/mnist/",
  };
  std::filesystem::create_directories(dir);
  for (const MnistFileInfo& f : mnist_files()) {
    std::error_code ec;
    if (std::filesystem::file_size(dir / f.name, ec) == f.raw_size && !ec)
      continue;
    std::string last_error;
    bool done = false;
    for (const std::string& mirror : mirrors) {
      try {
        const std::string raw =
            detail::gunzip(detail::http_get(mirror + f.name + ".gz"));
        if (raw.size() != f.raw_size)
          throw MalformedFileError(
              strfmt("%s: expected %zu bytes after decompression, got %zu",
                     f.name, f.raw_size, raw.size()));
        write_file_atomic(dir / f.name, raw);
        done = true;
        break;
      } catch (const Error& e) {
        last_error = e.what();
      }
    }
    if (!done)
      throw IoError(strfmt("could not fetch %s from any mirror: %s", f.name,
                           last_error.c_str()));
  }
}

}  // namespace mmdr
