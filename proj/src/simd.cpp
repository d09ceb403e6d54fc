#include "gblstsvm/simd.hpp"

#include <cmath>
#include <cstdlib>
#include <cstring>

#if defined(__x86_64__) || defined(__i386__)
#include <immintrin.h>
#endif
#if defined(__aarch64__)
#include <arm_neon.h>
#endif

namespace gblstsvm::simd {

namespace detail {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double squared_distance_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

double sum_scalar(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i];
  return acc;
}

std::size_t assign_halves_scalar(const double* base, const std::size_t* rows, std::size_t count,
                                 std::size_t cols, const double* diff, double threshold,
                                 std::uint8_t* side) {
  std::size_t n0 = 0;
  for (std::size_t i = 0; i < count; ++i) {
    const double* row = base + rows[i] * cols;
    double acc = 0.0;
    for (std::size_t j = 0; j < cols; ++j) acc += row[j] * diff[j];
    side[i] = acc >= threshold ? 0 : 1;
    n0 += side[i] == 0;
  }
  return n0;
}

std::size_t assign_accumulate_halves_scalar(const double* base, const std::size_t* rows,
                                            std::size_t count, std::size_t cols,
                                            const double* diff, double threshold,
                                            std::uint8_t* side, double* acc0, double* acc1) {
  std::size_t n0 = 0;
  for (std::size_t i = 0; i < count; ++i) {
    const double* row = base + rows[i] * cols;
    double dot = 0.0;
    for (std::size_t j = 0; j < cols; ++j) dot += row[j] * diff[j];
    const bool zero = dot >= threshold;
    side[i] = zero ? 0 : 1;
    n0 += zero;
    double* acc = zero ? acc0 : acc1;
    for (std::size_t j = 0; j < cols; ++j) acc[j] += row[j];
  }
  return n0;
}

void accumulate_halves_scalar(const double* base, const std::size_t* rows, std::size_t count,
                              std::size_t cols, const std::uint8_t* side, double* acc0,
                              double* acc1) {
  for (std::size_t i = 0; i < count; ++i) {
    const double* row = base + rows[i] * cols;
    double* acc = side[i] == 0 ? acc0 : acc1;
    for (std::size_t j = 0; j < cols; ++j) acc[j] += row[j];
  }
}

void accumulate_rows_scalar(const double* base, const std::size_t* rows, std::size_t count,
                            std::size_t cols, double* acc) {
  for (std::size_t i = 0; i < count; ++i) {
    const double* row = base + rows[i] * cols;
    for (std::size_t j = 0; j < cols; ++j) acc[j] += row[j];
  }
}

double sum_center_distances_scalar(const double* base, const std::size_t* rows, std::size_t count,
                                   std::size_t cols, const double* center) {
  double total = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const double* row = base + rows[i] * cols;
    double acc = 0.0;
    for (std::size_t j = 0; j < cols; ++j) {
      const double d = row[j] - center[j];
      acc += d * d;
    }
    total += std::sqrt(acc);
  }
  return total;
}

#if defined(__x86_64__) || defined(__i386__)

__attribute__((target("avx2,fma")))
double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  if (i + 4 <= n) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    i += 4;
  }
  acc0 = _mm256_add_pd(acc0, acc1);
  __m128d lo = _mm256_castpd256_pd128(acc0);
  __m128d hi = _mm256_extractf128_pd(acc0, 1);
  lo = _mm_add_pd(lo, hi);
  double acc = _mm_cvtsd_f64(lo) + _mm_cvtsd_f64(_mm_unpackhi_pd(lo, lo));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

__attribute__((target("avx2,fma")))
double squared_distance_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    const __m256d d1 = _mm256_sub_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4));
    acc0 = _mm256_fmadd_pd(d0, d0, acc0);
    acc1 = _mm256_fmadd_pd(d1, d1, acc1);
  }
  if (i + 4 <= n) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc0 = _mm256_fmadd_pd(d, d, acc0);
    i += 4;
  }
  acc0 = _mm256_add_pd(acc0, acc1);
  __m128d lo = _mm256_castpd256_pd128(acc0);
  __m128d hi = _mm256_extractf128_pd(acc0, 1);
  lo = _mm_add_pd(lo, hi);
  double acc = _mm_cvtsd_f64(lo) + _mm_cvtsd_f64(_mm_unpackhi_pd(lo, lo));
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

__attribute__((target("avx2,fma")))
void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

__attribute__((target("avx2,fma")))
double sum_avx2(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
  __m128d lo = _mm256_castpd256_pd128(acc);
  __m128d hi = _mm256_extractf128_pd(acc, 1);
  lo = _mm_add_pd(lo, hi);
  double s = _mm_cvtsd_f64(lo) + _mm_cvtsd_f64(_mm_unpackhi_pd(lo, lo));
  for (; i < n; ++i) s += x[i];
  return s;
}

__attribute__((target("avx2,fma")))
static inline double hsum256(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(lo) + _mm_cvtsd_f64(_mm_unpackhi_pd(lo, lo));
}

__attribute__((target("avx2,fma")))
std::size_t assign_halves_avx2(const double* base, const std::size_t* rows, std::size_t count,
                               std::size_t cols, const double* diff, double threshold,
                               std::uint8_t* side) {
  std::size_t n0 = 0;
  for (std::size_t i = 0; i < count; ++i) {
    const double* row = base + rows[i] * cols;
    __m256d acc = _mm256_setzero_pd();
    std::size_t j = 0;
    for (; j + 4 <= cols; j += 4)
      acc = _mm256_fmadd_pd(_mm256_loadu_pd(row + j), _mm256_loadu_pd(diff + j), acc);
    double dot = hsum256(acc);
    for (; j < cols; ++j) dot += row[j] * diff[j];
    side[i] = dot >= threshold ? 0 : 1;
    n0 += side[i] == 0;
  }
  return n0;
}

__attribute__((target("avx2,fma")))
std::size_t assign_accumulate_halves_avx2(const double* base, const std::size_t* rows,
                                          std::size_t count, std::size_t cols, const double* diff,
                                          double threshold, std::uint8_t* side, double* acc0,
                                          double* acc1) {
  std::size_t n0 = 0;
  for (std::size_t i = 0; i < count; ++i) {
    const double* row = base + rows[i] * cols;
    __m256d acc = _mm256_setzero_pd();
    std::size_t j = 0;
    for (; j + 4 <= cols; j += 4)
      acc = _mm256_fmadd_pd(_mm256_loadu_pd(row + j), _mm256_loadu_pd(diff + j), acc);
    double dot = hsum256(acc);
    for (; j < cols; ++j) dot += row[j] * diff[j];
    const bool zero = dot >= threshold;
    side[i] = zero ? 0 : 1;
    n0 += zero;
    double* out = zero ? acc0 : acc1;
    j = 0;
    for (; j + 4 <= cols; j += 4)
      _mm256_storeu_pd(out + j, _mm256_add_pd(_mm256_loadu_pd(out + j), _mm256_loadu_pd(row + j)));
    for (; j < cols; ++j) out[j] += row[j];
  }
  return n0;
}

__attribute__((target("avx2,fma")))
void accumulate_halves_avx2(const double* base, const std::size_t* rows, std::size_t count,
                            std::size_t cols, const std::uint8_t* side, double* acc0,
                            double* acc1) {
  for (std::size_t i = 0; i < count; ++i) {
    const double* row = base + rows[i] * cols;
    double* acc = side[i] == 0 ? acc0 : acc1;
    std::size_t j = 0;
    for (; j + 4 <= cols; j += 4)
      _mm256_storeu_pd(acc + j, _mm256_add_pd(_mm256_loadu_pd(acc + j), _mm256_loadu_pd(row + j)));
    for (; j < cols; ++j) acc[j] += row[j];
  }
}

__attribute__((target("avx2,fma")))
void accumulate_rows_avx2(const double* base, const std::size_t* rows, std::size_t count,
                          std::size_t cols, double* acc) {
  for (std::size_t i = 0; i < count; ++i) {
    const double* row = base + rows[i] * cols;
    std::size_t j = 0;
    for (; j + 4 <= cols; j += 4)
      _mm256_storeu_pd(acc + j, _mm256_add_pd(_mm256_loadu_pd(acc + j), _mm256_loadu_pd(row + j)));
    for (; j < cols; ++j) acc[j] += row[j];
  }
}

__attribute__((target("avx2,fma")))
double sum_center_distances_avx2(const double* base, const std::size_t* rows, std::size_t count,
                                 std::size_t cols, const double* center) {
  double total = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const double* row = base + rows[i] * cols;
    __m256d acc = _mm256_setzero_pd();
    std::size_t j = 0;
    for (; j + 4 <= cols; j += 4) {
      const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(row + j), _mm256_loadu_pd(center + j));
      acc = _mm256_fmadd_pd(d, d, acc);
    }
    double sq = hsum256(acc);
    for (; j < cols; ++j) {
      const double d = row[j] - center[j];
      sq += d * d;
    }
    total += std::sqrt(sq);
  }
  return total;
}

#endif  // x86

#if defined(__aarch64__)

double dot_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) acc = vfmaq_f64(acc, vld1q_f64(a + i), vld1q_f64(b + i));
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

double squared_distance_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t d = vsubq_f64(vld1q_f64(a + i), vld1q_f64(b + i));
    acc = vfmaq_f64(acc, d, d);
  }
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

void axpy_neon(double alpha, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

double sum_neon(const double* x, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) acc = vaddq_f64(acc, vld1q_f64(x + i));
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) s += x[i];
  return s;
}

#endif  // aarch64

}  // namespace detail

namespace {

using DotFn = double (*)(const double*, const double*, std::size_t);
using AxpyFn = void (*)(double, const double*, double*, std::size_t);
using SumFn = double (*)(const double*, std::size_t);
using AssignFn = std::size_t (*)(const double*, const std::size_t*, std::size_t, std::size_t,
                                 const double*, double, std::uint8_t*);
using AssignAccFn = std::size_t (*)(const double*, const std::size_t*, std::size_t, std::size_t,
                                    const double*, double, std::uint8_t*, double*, double*);
using AccHalvesFn = void (*)(const double*, const std::size_t*, std::size_t, std::size_t,
                             const std::uint8_t*, double*, double*);
using AccRowsFn = void (*)(const double*, const std::size_t*, std::size_t, std::size_t, double*);
using SumDistFn = double (*)(const double*, const std::size_t*, std::size_t, std::size_t,
                             const double*);

struct Dispatch {
  Backend backend = Backend::scalar;
  DotFn dot = detail::dot_scalar;
  DotFn sqdist = detail::squared_distance_scalar;
  AxpyFn axpy = detail::axpy_scalar;
  SumFn sum = detail::sum_scalar;
  AssignFn assign_halves = detail::assign_halves_scalar;
  AssignAccFn assign_accumulate_halves = detail::assign_accumulate_halves_scalar;
  AccHalvesFn accumulate_halves = detail::accumulate_halves_scalar;
  AccRowsFn accumulate_rows = detail::accumulate_rows_scalar;
  SumDistFn sum_center_distances = detail::sum_center_distances_scalar;
};

bool backend_supported(Backend b) {
  switch (b) {
    case Backend::scalar:
      return true;
    case Backend::avx2:
#if defined(__x86_64__) || defined(__i386__)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Backend::neon:
#if defined(__aarch64__)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Dispatch make_dispatch(Backend b) {
  Dispatch d;
  d.backend = b;
  switch (b) {
    case Backend::scalar:
      break;
#if defined(__x86_64__) || defined(__i386__)
    case Backend::avx2:
      d.dot = detail::dot_avx2;
      d.sqdist = detail::squared_distance_avx2;
      d.axpy = detail::axpy_avx2;
      d.sum = detail::sum_avx2;
      d.assign_halves = detail::assign_halves_avx2;
      d.assign_accumulate_halves = detail::assign_accumulate_halves_avx2;
      d.accumulate_halves = detail::accumulate_halves_avx2;
      d.accumulate_rows = detail::accumulate_rows_avx2;
      d.sum_center_distances = detail::sum_center_distances_avx2;
      break;
#endif
#if defined(__aarch64__)
    case Backend::neon:
      d.dot = detail::dot_neon;
      d.sqdist = detail::squared_distance_neon;
      d.axpy = detail::axpy_neon;
      d.sum = detail::sum_neon;
      break;
#endif
    default:
      break;
  }
  return d;
}

Backend detect_backend() {
  if (const char* env = std::getenv("GBLSTSVM_SIMD")) {
    if (std::strcmp(env, "scalar") == 0) return Backend::scalar;
    if (std::strcmp(env, "avx2") == 0 && backend_supported(Backend::avx2)) return Backend::avx2;
    if (std::strcmp(env, "neon") == 0 && backend_supported(Backend::neon)) return Backend::neon;
    return Backend::scalar;
  }
  if (backend_supported(Backend::avx2)) return Backend::avx2;
  if (backend_supported(Backend::neon)) return Backend::neon;
  return Backend::scalar;
}

Dispatch& dispatch() {
  static Dispatch d = make_dispatch(detect_backend());
  return d;
}

}  // namespace

Backend active_backend() { return dispatch().backend; }

std::string_view backend_name() {
  switch (dispatch().backend) {
    case Backend::avx2:
      return "avx2";
    case Backend::neon:
      return "neon";
    case Backend::scalar:
      break;
  }
  return "scalar";
}

Backend force_backend(Backend b) {
  if (backend_supported(b)) dispatch() = make_dispatch(b);
  return dispatch().backend;
}

double dot(const double* a, const double* b, std::size_t n) { return dispatch().dot(a, b, n); }

double squared_distance(const double* a, const double* b, std::size_t n) {
  return dispatch().sqdist(a, b, n);
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  dispatch().axpy(alpha, x, y, n);
}

double sum(const double* x, std::size_t n) { return dispatch().sum(x, n); }

std::size_t assign_halves(const double* base, const std::size_t* rows, std::size_t count,
                          std::size_t cols, const double* diff, double threshold,
                          std::uint8_t* side) {
  return dispatch().assign_halves(base, rows, count, cols, diff, threshold, side);
}

std::size_t assign_accumulate_halves(const double* base, const std::size_t* rows,
                                     std::size_t count, std::size_t cols, const double* diff,
                                     double threshold, std::uint8_t* side, double* acc0,
                                     double* acc1) {
  return dispatch().assign_accumulate_halves(base, rows, count, cols, diff, threshold, side, acc0,
                                             acc1);
}

void accumulate_halves(const double* base, const std::size_t* rows, std::size_t count,
                       std::size_t cols, const std::uint8_t* side, double* acc0, double* acc1) {
  dispatch().accumulate_halves(base, rows, count, cols, side, acc0, acc1);
}

void accumulate_rows(const double* base, const std::size_t* rows, std::size_t count,
                     std::size_t cols, double* acc) {
  dispatch().accumulate_rows(base, rows, count, cols, acc);
}

double sum_center_distances(const double* base, const std::size_t* rows, std::size_t count,
                            std::size_t cols, const double* center) {
  return dispatch().sum_center_distances(base, rows, count, cols, center);
}

}  // namespace gblstsvm::simd
