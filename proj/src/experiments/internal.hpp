#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace loggrowth::exp::detail {

/// FNV-1a; turns labels into seed-branch tags.
inline std::uint64_t tag_of(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) h = (h ^ c) * 0x100000001b3ULL;
  return h;
}

/// Up to `count` distinct log-spaced integers in [lo, hi], always including hi.
inline std::vector<std::size_t> log_checkpoints(std::size_t lo, std::size_t hi, std::size_t count) {
  std::vector<std::size_t> out;
  const double a = std::log(static_cast<double>(lo));
  const double b = std::log(static_cast<double>(hi));
  for (std::size_t i = 0; i < count; ++i) {
    const double t = count == 1 ? 1.0 : static_cast<double>(i) / static_cast<double>(count - 1);
    out.push_back(static_cast<std::size_t>(std::llround(std::exp(a + t * (b - a)))));
  }
  out.push_back(hi);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace loggrowth::exp::detail
