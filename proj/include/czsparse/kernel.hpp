#pragma once

// Calderon-Zygmund kernels: size/smoothness certification and the shipped
// kernel catalog (1-d Hilbert, 1-d smoothed variant, 2-d Riesz-type).

#include <array>
#include <cstdint>
#include <functional>
#include <string>

namespace czsparse {

struct KernelSpec {
    std::string name;
    int d = 1;
    double eta = 1.0;            // Hoelder smoothness exponent
    double kappa = 1.0;          // certified size/smoothness constant
    bool antisymmetric = false;
    std::function<double(const double*, const double*)> eval;  // K(x, y), x != y
    // Exact antiderivative hook for 1-d convolution kernels K(x,y) = k(x-y):
    // F'' (t) = k(t), so the cell-pair integral is an F-combination.
    std::function<double(double)> pair_antiderivative;

    bool is_zero() const { return name == "zero"; }
};

// Parse "hilbert", "smoothed:<delta>", "riesz2d", or "zero".
KernelSpec make_kernel(const std::string& spec);

KernelSpec hilbert_kernel();
KernelSpec smoothed_hilbert_kernel(double delta);
KernelSpec riesz2d_kernel();
KernelSpec zero_kernel(int d);

// Size and smoothness constants measured on a deterministic sample lattice:
//   size_constant  = sup |K(x,y)| |x-y|^d
//   smooth_constant = sup |K(x,y)-K(x',y)| |x-y|^(d+eta) / |x-x'|^eta
// over ~10^4 triples with 2|x-x'| < |x-y| (both argument roles).  The
// certified value is the max of the two; pass means it does not exceed the
// shipped kappa.
struct KernelCertificate {
    double size_constant = 0.0;
    double smooth_constant = 0.0;
    std::int64_t triples = 0;
    bool pass = false;

    double certified() const { return size_constant > smooth_constant ? size_constant : smooth_constant; }
};

KernelCertificate certify_kernel(const KernelSpec& k, double domain_radius = 2.0, int lattice = 10);

} // namespace czsparse
