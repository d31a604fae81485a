#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace annosim {

inline constexpr const char* kVersion = "0.1.0";

/// Raised for unreadable or missing input files (CLI maps this to exit 3).
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Raised for invalid configuration values (CLI maps this to exit 2).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// 64-bit FNV-1a; stable across platforms, used for feature hashing and
// config/dataset fingerprints.
inline std::uint64_t fnv1a64(std::string_view data,
                             std::uint64_t seed = 0) noexcept {
  std::uint64_t h = 14695981039346656037ull ^ (seed * 0x9E3779B97F4A7C15ull);
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string to_hex(std::uint64_t v);

// Deterministic RNG wrapper. std::shuffle and the std distributions are
// implementation-defined, so bounded draws and shuffles are done by hand to
// keep seeded runs byte-identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double next_double() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, n); n must be positive.
  std::uint64_t bounded(std::uint64_t n);

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(bounded(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

// ---- string helpers ----

std::string lowercase(std::string_view s);
std::string trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char delim);

/// Lowercases and splits on runs of whitespace; the only text normalization
/// applied anywhere in the library.
std::vector<std::string> tokenize(std::string_view text);

/// printf-style formatting into a std::string.
std::string strf(const char* fmt, ...);

/// Shortest round-trippable decimal form of a double ("%.17g"); used for all
/// persisted metrics so replayed runs are byte-identical.
std::string format_double(double v);

/// Standard normal CDF.
double normal_cdf(double x);

}  // namespace annosim
