#pragma once

// Data-parallel double-precision kernels used by the hot loops (norms, cube
// averages, dense bilinear forms).  Scalar reference implementations are the
// semantic ground truth; an AVX2 variant is selected at runtime when the CPU
// supports it.  The two variants are equivalence-tested against each other.
//
// Set T1_SIMD=scalar (or avx2) in the environment to force a variant.

#include <cstddef>
#include <string>

namespace czsparse::simd {

struct Kernels {
    double (*dot)(const double*, const double*, std::size_t);
    double (*sum)(const double*, std::size_t);
    double (*sum_abs)(const double*, std::size_t);
    double (*sum_sq)(const double*, std::size_t);
    double (*max_abs)(const double*, std::size_t);
    // y[i] += a * x[i]
    void (*axpy)(double, const double*, double*, std::size_t);
};

// Active kernel table (dispatch happens on first use).
const Kernels& active();

// Name of the selected instruction set: "scalar" or "avx2".
const std::string& active_name();

// Scalar reference table, always available.
const Kernels& scalar();

#if defined(CZS_HAVE_AVX2_TU)
const Kernels& avx2();
#endif

inline double dot(const double* a, const double* b, std::size_t n) { return active().dot(a, b, n); }
inline double sum(const double* a, std::size_t n) { return active().sum(a, n); }
inline double sum_abs(const double* a, std::size_t n) { return active().sum_abs(a, n); }
inline double sum_sq(const double* a, std::size_t n) { return active().sum_sq(a, n); }
inline double max_abs(const double* a, std::size_t n) { return active().max_abs(a, n); }
inline void axpy(double a, const double* x, double* y, std::size_t n) { active().axpy(a, x, y, n); }

} // namespace czsparse::simd
