#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "mmdr/common.hpp"

namespace mmdr {

/// Writes through a sibling temp file and renames, so readers never observe
/// a half-written result.
inline void write_file_atomic(const std::filesystem::path& path,
                              const std::string& content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
      throw IoError(strfmt("cannot open %s for writing", tmp.string().c_str()));
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw IoError(strfmt("write to %s failed", tmp.string().c_str()));
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec)
    throw IoError(strfmt("rename %s -> %s failed: %s", tmp.string().c_str(),
                         path.string().c_str(), ec.message().c_str()));
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(strfmt("cannot open %s", path.string().c_str()));
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError(strfmt("read from %s failed", path.string().c_str()));
  return ss.str();
}

}  // namespace mmdr
