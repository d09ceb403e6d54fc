#pragma once

#include <cstddef>
#include <string_view>

// Low-level dense kernels used by every hot loop in the library (Gram
// matrices, 2-means distance passes, normal-equation accumulation,
// coordinate-ascent sweeps). Scalar reference implementations are always
// built; on x86-64 an AVX2+FMA variant is selected at runtime when the CPU
// supports it, on aarch64 a NEON variant. The environment variable
// GBLSTSVM_SIMD=scalar|avx2|neon overrides detection (unknown or
// unsupported values fall back to scalar).
namespace gblstsvm::simd {

enum class Backend { scalar, avx2, neon };

Backend active_backend();
std::string_view backend_name();

// Force a backend (no-op request if unsupported on this CPU; returns the
// backend actually in effect). Intended for tests and benchmarks.
Backend force_backend(Backend b);

// sum_i a[i]*b[i]
double dot(const double* a, const double* b, std::size_t n);

// sum_i (a[i]-b[i])^2
double squared_distance(const double* a, const double* b, std::size_t n);

// y[i] += alpha * x[i]
void axpy(double alpha, const double* x, double* y, std::size_t n);

// sum_i x[i]
double sum(const double* x, std::size_t n);

// Fused row-set passes for the 2-means / ball-statistics loops. `base` is a
// row-major matrix with `cols` columns; `rows` selects the rows to visit.

// side[i] = 0 iff row_i . diff >= threshold; returns how many land on side 0
std::size_t assign_halves(const double* base, const std::size_t* rows, std::size_t count,
                          std::size_t cols, const double* diff, double threshold,
                          std::uint8_t* side);

// assign_halves fused with per-side row accumulation (one pass per Lloyd
// iteration): acc0 += side-0 rows, acc1 += side-1 rows
std::size_t assign_accumulate_halves(const double* base, const std::size_t* rows,
                                     std::size_t count, std::size_t cols, const double* diff,
                                     double threshold, std::uint8_t* side, double* acc0,
                                     double* acc1);

// acc0 += sum of side-0 rows, acc1 += sum of side-1 rows
void accumulate_halves(const double* base, const std::size_t* rows, std::size_t count,
                       std::size_t cols, const std::uint8_t* side, double* acc0, double* acc1);

// acc += sum of the selected rows
void accumulate_rows(const double* base, const std::size_t* rows, std::size_t count,
                     std::size_t cols, double* acc);

// sum_i sqrt(|row_i - center|^2)
double sum_center_distances(const double* base, const std::size_t* rows, std::size_t count,
                            std::size_t cols, const double* center);

namespace detail {
double dot_scalar(const double* a, const double* b, std::size_t n);
double squared_distance_scalar(const double* a, const double* b, std::size_t n);
void axpy_scalar(double alpha, const double* x, double* y, std::size_t n);
double sum_scalar(const double* x, std::size_t n);
std::size_t assign_halves_scalar(const double* base, const std::size_t* rows, std::size_t count,
                                 std::size_t cols, const double* diff, double threshold,
                                 std::uint8_t* side);
std::size_t assign_accumulate_halves_scalar(const double* base, const std::size_t* rows,
                                            std::size_t count, std::size_t cols,
                                            const double* diff, double threshold,
                                            std::uint8_t* side, double* acc0, double* acc1);
void accumulate_halves_scalar(const double* base, const std::size_t* rows, std::size_t count,
                              std::size_t cols, const std::uint8_t* side, double* acc0,
                              double* acc1);
void accumulate_rows_scalar(const double* base, const std::size_t* rows, std::size_t count,
                            std::size_t cols, double* acc);
double sum_center_distances_scalar(const double* base, const std::size_t* rows, std::size_t count,
                                   std::size_t cols, const double* center);

#if defined(__x86_64__) || defined(__i386__)
double dot_avx2(const double* a, const double* b, std::size_t n);
double squared_distance_avx2(const double* a, const double* b, std::size_t n);
void axpy_avx2(double alpha, const double* x, double* y, std::size_t n);
double sum_avx2(const double* x, std::size_t n);
std::size_t assign_halves_avx2(const double* base, const std::size_t* rows, std::size_t count,
                               std::size_t cols, const double* diff, double threshold,
                               std::uint8_t* side);
std::size_t assign_accumulate_halves_avx2(const double* base, const std::size_t* rows,
                                          std::size_t count, std::size_t cols, const double* diff,
                                          double threshold, std::uint8_t* side, double* acc0,
                                          double* acc1);
void accumulate_halves_avx2(const double* base, const std::size_t* rows, std::size_t count,
                            std::size_t cols, const std::uint8_t* side, double* acc0,
                            double* acc1);
void accumulate_rows_avx2(const double* base, const std::size_t* rows, std::size_t count,
                          std::size_t cols, double* acc);
double sum_center_distances_avx2(const double* base, const std::size_t* rows, std::size_t count,
                                 std::size_t cols, const double* center);
#endif

#if defined(__aarch64__)
double dot_neon(const double* a, const double* b, std::size_t n);
double squared_distance_neon(const double* a, const double* b, std::size_t n);
void axpy_neon(double alpha, const double* x, double* y, std::size_t n);
double sum_neon(const double* x, std::size_t n);
#endif
}  // namespace detail

}  // namespace gblstsvm::simd
