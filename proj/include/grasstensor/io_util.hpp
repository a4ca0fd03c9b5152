#pragma once

#include <array>
#include <charconv>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace gt {

// Shortest round-trippable decimal form of a double (locale independent).
inline std::string format_double(double v) {
  std::array<char, 40> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (res.ec != std::errc()) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf.data(), res.ptr);
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(path + ": cannot open for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Writes through a sibling temp file and renames, so a failed write never
// leaves a partial file at the destination.
inline void atomic_write_file(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp(path + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error(tmp.string() + ": cannot open for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw std::runtime_error(tmp.string() + ": write failed");
    }
  }
  fs::rename(tmp, target);
}

// Resolves `ref` relative to the directory containing `anchor_file` unless it
// is already absolute; used for payload references inside descriptor files.
inline std::string resolve_sibling(const std::string& anchor_file, const std::string& ref) {
  namespace fs = std::filesystem;
  const fs::path p(ref);
  if (p.is_absolute()) return ref;
  const fs::path anchor(anchor_file);
  return (anchor.has_parent_path() ? anchor.parent_path() / p : p).string();
}

}  // namespace gt
