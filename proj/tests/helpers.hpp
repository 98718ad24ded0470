#pragma once

#include <filesystem>
#include <optional>
#include <utility>

#include "fpad/error.hpp"

namespace testutil {

// Runs f and reports the fpad error code it throws, if any.
template <typename F>
std::optional<fpad::Errc> thrown_code(F&& f) {
  try {
    std::forward<F>(f)();
  } catch (const fpad::Error& e) {
    return e.code();
  } catch (...) {
  }
  return std::nullopt;
}

inline std::filesystem::path fresh_dir(const char* name) {
  const auto dir = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testutil
