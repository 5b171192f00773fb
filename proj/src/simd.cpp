#include "czsparse/simd.hpp"

#include <cmath>
#include <cstdlib>

#if defined(__ARM_NEON) || defined(__ARM_NEON__)
#include <arm_neon.h>
#define CZS_HAVE_NEON 1
#endif

namespace czsparse::simd {

namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

double sum_scalar(const double* a, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i];
    return s;
}

double sum_abs_scalar(const double* a, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += std::fabs(a[i]);
    return s;
}

double sum_sq_scalar(const double* a, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * a[i];
    return s;
}

double max_abs_scalar(const double* a, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::fabs(a[i]));
    return m;
}

void axpy_scalar(double c, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += c * x[i];
}

#if defined(CZS_HAVE_NEON)
double dot_neon(const double* a, const double* b, std::size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) acc = vfmaq_f64(acc, vld1q_f64(a + i), vld1q_f64(b + i));
    double s = vgetq_lane_f64(acc, 0) + vgetq_lane_f64(acc, 1);
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

double sum_neon(const double* a, std::size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) acc = vaddq_f64(acc, vld1q_f64(a + i));
    double s = vgetq_lane_f64(acc, 0) + vgetq_lane_f64(acc, 1);
    for (; i < n; ++i) s += a[i];
    return s;
}

double sum_abs_neon(const double* a, std::size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) acc = vaddq_f64(acc, vabsq_f64(vld1q_f64(a + i)));
    double s = vgetq_lane_f64(acc, 0) + vgetq_lane_f64(acc, 1);
    for (; i < n; ++i) s += std::fabs(a[i]);
    return s;
}

double sum_sq_neon(const double* a, std::size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        float64x2_t v = vld1q_f64(a + i);
        acc = vfmaq_f64(acc, v, v);
    }
    double s = vgetq_lane_f64(acc, 0) + vgetq_lane_f64(acc, 1);
    for (; i < n; ++i) s += a[i] * a[i];
    return s;
}

double max_abs_neon(const double* a, std::size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) acc = vmaxq_f64(acc, vabsq_f64(vld1q_f64(a + i)));
    double m = std::max(vgetq_lane_f64(acc, 0), vgetq_lane_f64(acc, 1));
    for (; i < n; ++i) m = std::max(m, std::fabs(a[i]));
    return m;
}

void axpy_neon(double c, const double* x, double* y, std::size_t n) {
    float64x2_t vc = vdupq_n_f64(c);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), vc, vld1q_f64(x + i)));
    for (; i < n; ++i) y[i] += c * x[i];
}
#endif // CZS_HAVE_NEON

const Kernels& pick() {
    static const Kernels* chosen = [] {
        const char* force = std::getenv("T1_SIMD");
        if (force && std::string(force) == "scalar") return &scalar();
#if defined(CZS_HAVE_AVX2_TU) && (defined(__x86_64__) || defined(__i386__))
        if (force && std::string(force) == "avx2") return &avx2();
        if (!force && __builtin_cpu_supports("avx2")) return &avx2();
#endif
#if defined(CZS_HAVE_NEON)
        static const Kernels neon{dot_neon, sum_neon, sum_abs_neon, sum_sq_neon, max_abs_neon, axpy_neon};
        if (!force) return &neon;
#endif
        return &scalar();
    }();
    return *chosen;
}

} // namespace

const Kernels& scalar() {
    static const Kernels k{dot_scalar, sum_scalar, sum_abs_scalar, sum_sq_scalar, max_abs_scalar, axpy_scalar};
    return k;
}

const Kernels& active() { return pick(); }

const std::string& active_name() {
    static const std::string name = [] {
        const Kernels& k = active();
#if defined(CZS_HAVE_AVX2_TU)
        if (&k == &avx2()) return std::string("avx2");
#endif
        if (&k != &scalar()) return std::string("neon");
        return std::string("scalar");
    }();
    return name;
}

} // namespace czsparse::simd
