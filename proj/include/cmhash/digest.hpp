#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <string_view>

#include "cmhash/error.hpp"

namespace cmhash {

/// FNV-1a 64-bit digest. Not cryptographic; used to detect stale or
/// mismatched artifact files (e.g. a student checkpoint referring to a
/// teacher checkpoint that has since been regenerated).
inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= static_cast<std::uint64_t>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string digest_hex(std::string_view bytes) {
  static const char* kHex = "0123456789abcdef";
  std::uint64_t h = fnv1a64(bytes);
  std::string out = "fnv1a64:";
  for (int shift = 60; shift >= 0; shift -= 4) {
    out.push_back(kHex[(h >> shift) & 0xF]);
  }
  return out;
}

inline std::string digest_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open file for digest: " + path);
  }
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  return digest_hex(bytes);
}

}  // namespace cmhash
