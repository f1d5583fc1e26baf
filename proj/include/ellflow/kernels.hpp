#pragma once

#include <cstddef>
#include <string>

// Low-level arithmetic kernels used by the spectral transforms.
// Scalar reference implementations plus AVX2/FMA variants selected once at
// startup from cpuid. The two backends are equivalence-tested against each
// other; everything above this layer is backend-agnostic.

namespace ellflow::kernels {

using dot_fn = double (*)(const double*, const double*, std::size_t);
using axpy_fn = void (*)(double, const double*, double*, std::size_t);
using axpby2_fn = void (*)(double, const double*, double, const double*, double*, std::size_t);

// y[i] += a*x[i]
// z[i] += a*x[i] + b*y[i]
// dot(x, y) = sum_i x[i]*y[i]

double dot_scalar(const double* x, const double* y, std::size_t n);
void axpy_scalar(double a, const double* x, double* y, std::size_t n);
void axpby2_scalar(double a, const double* x, double b, const double* y, double* z, std::size_t n);

#if defined(__x86_64__) || defined(_M_X64)
double dot_avx2(const double* x, const double* y, std::size_t n);
void axpy_avx2(double a, const double* x, double* y, std::size_t n);
void axpby2_avx2(double a, const double* x, double b, const double* y, double* z, std::size_t n);
#endif

// Active backend (runtime-dispatched function pointers).
extern dot_fn dot;
extern axpy_fn axpy;
extern axpby2_fn axpby2;

// Name of the backend selected at startup ("scalar" or "avx2").
const std::string& backend_name();

// Force a backend; used by the equivalence tests. Returns false if unavailable.
bool select_backend(const std::string& name);

}  // namespace ellflow::kernels
