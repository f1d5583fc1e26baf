#include "ellflow/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>
#endif

namespace ellflow::kernels {

double dot_scalar(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void axpby2_scalar(double a, const double* x, double b, const double* y, double* z,
                   std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) z[i] += a * x[i] + b * y[i];
}

#if defined(__x86_64__) || defined(_M_X64)

__attribute__((target("avx2,fma")))
double dot_avx2(const double* x, const double* y, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
  acc0 = _mm256_add_pd(acc0, acc1);
  __m128d lo = _mm256_castpd256_pd128(acc0);
  __m128d hi = _mm256_extractf128_pd(acc0, 1);
  lo = _mm_add_pd(lo, hi);
  double s = _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

__attribute__((target("avx2,fma")))
void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_loadu_pd(y + i);
    vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

__attribute__((target("avx2,fma")))
void axpby2_avx2(double a, const double* x, double b, const double* y, double* z,
                 std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  const __m256d vb = _mm256_set1_pd(b);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vz = _mm256_loadu_pd(z + i);
    vz = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vz);
    vz = _mm256_fmadd_pd(vb, _mm256_loadu_pd(y + i), vz);
    _mm256_storeu_pd(z + i, vz);
  }
  for (; i < n; ++i) z[i] += a * x[i] + b * y[i];
}

#endif  // x86_64

namespace {

bool have_avx2() {
#if defined(__x86_64__) || defined(_M_X64)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

std::string g_backend = "scalar";

}  // namespace

dot_fn dot = dot_scalar;
axpy_fn axpy = axpy_scalar;
axpby2_fn axpby2 = axpby2_scalar;

bool select_backend(const std::string& name) {
  if (name == "scalar") {
    dot = dot_scalar;
    axpy = axpy_scalar;
    axpby2 = axpby2_scalar;
    g_backend = name;
    return true;
  }
#if defined(__x86_64__) || defined(_M_X64)
  if (name == "avx2" && have_avx2()) {
    dot = dot_avx2;
    axpy = axpy_avx2;
    axpby2 = axpby2_avx2;
    g_backend = name;
    return true;
  }
#endif
  return false;
}

const std::string& backend_name() { return g_backend; }

namespace {
struct Init {
  Init() { select_backend(have_avx2() ? "avx2" : "scalar"); }
} init_once;
}  // namespace

}  // namespace ellflow::kernels
