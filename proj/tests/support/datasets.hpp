#pragma once

#include <cstdlib>
#include <filesystem>
#include <optional>
#include <string>

namespace fixtures {

/// Path of a SNAP dataset from an environment override or the repo's data/
/// directory; empty when the file is absent.
inline std::optional<std::string> dataset(const char* env, const char* file) {
  std::filesystem::path p;
  if (const char* v = std::getenv(env); v && *v) {
    p = v;
  } else {
    p = std::filesystem::path(NBWALK_SOURCE_DIR) / "data" / file;
  }
  if (!std::filesystem::exists(p)) return std::nullopt;
  return p.string();
}

inline std::optional<std::string> as733() { return dataset("NBWALK_AS733", "as20000102.txt"); }
inline std::optional<std::string> hepth() { return dataset("NBWALK_HEPTH", "CA-HepTh.txt"); }

}  // namespace fixtures
