#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace wlr {

// Grids are row-major with a top-left origin so that memory order matches the
// row-major file formats (PGM scanlines, CSV rows, hwc feature payloads).
using LabelGrid = Eigen::Matrix<std::int32_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using GrayImage = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using CountMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;
using CountVector = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>;

// Bad or inconsistent inputs. The CLI maps this to exit code 2.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A configured resource cap was exceeded (e.g. the naive-oracle pixel cap).
// The CLI maps this to exit code 3.
class ResourceCapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An internal invariant failed (overflow, solver non-convergence). Exit code 4.
class InternalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Checked 64-bit arithmetic for pair counts. Counts grow quadratically in the
// pixel count, so every accumulation goes through these.
inline std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r))
    throw InternalError("pair-count overflow in 64-bit addition");
  return r;
}

inline std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r))
    throw InternalError("pair-count overflow in 64-bit multiplication");
  return r;
}

// n choose 2. Halves the even factor first so n up to 2^32 stays in range.
inline std::int64_t pairs2(std::int64_t n) {
  if (n < 2) return 0;
  return (n % 2 == 0) ? checked_mul(n / 2, n - 1) : checked_mul(n, (n - 1) / 2);
}

}  // namespace wlr
