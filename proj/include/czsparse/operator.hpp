#pragma once

// Discretized operator: the cell-pair coefficient matrix
// A[c,c'] = integral over cell_c x cell_c' of K(x,y) dy dx, the bilinear
// form B_T(f,g) = <Tf, g>, the testing constants, the Poisson-like operator
// P_eta, the off-diagonal ratio, and the Hardy inequality check.

#include "czsparse/grid_function.hpp"
#include "czsparse/kernel.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace czsparse {

// Gauss-Legendre nodes/weights on [0,1].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
GaussRule gauss_legendre(int order);

class DiscreteOperator {
public:
    // Assembles the cell-pair matrix.  Antisymmetric kernels get a zero
    // diagonal (principal value); otherwise the diagonal cell integral is
    // excluded and counted as a truncation.  Convolution kernels with an
    // antiderivative hook are integrated exactly; everything else uses a
    // tensor Gauss rule, with 4x subdivision on adjacent cell pairs.
    DiscreteOperator(KernelSpec kernel, const GridGeometry& geom, int quad_order = 6);

    const KernelSpec& kernel() const { return kernel_; }
    const GridGeometry& geometry() const { return geom_; }
    int quad_order() const { return quad_order_; }
    std::int64_t cells() const { return n_; }
    const std::vector<double>& matrix() const { return a_; }
    std::vector<double>& matrix() { return a_; }
    bool diagonal_excluded() const { return diagonal_excluded_; }

    double entry(std::int64_t row, std::int64_t col) const { return a_[std::size_t(row * n_ + col)]; }

    // B_T(f,g) = sum_{c,c'} A[c,c'] f(c') g(c)  (f rides in the y slot).
    double bilinear_form(const GridFunction& f, const GridFunction& g) const;

    // T f as a mesh function: (T f)(c) = (1/|cell|) sum_c' A[c,c'] f(c').
    GridFunction apply(const GridFunction& f) const;
    // T* f (transposed matrix).
    GridFunction apply_adjoint(const GridFunction& f) const;

    // T 1_Q restricted sums without building indicator vectors.
    // row c -> sum over columns in Q.
    double row_sum_over(const Cube& q, std::int64_t row) const;
    double col_sum_over(const Cube& q, std::int64_t col) const;

private:
    KernelSpec kernel_;
    GridGeometry geom_;
    int quad_order_ = 6;
    std::int64_t n_ = 0;
    std::vector<double> a_;
    bool diagonal_excluded_ = false;
};

// max( <|T 1_Q|>_Q , <|T* 1_Q|>_Q ): the testing functional at one cube.
double testing_constant(const DiscreteOperator& op, const Cube& q);
// sup over every window cube; this is the module-level estimate of T.
double testing_sup(const DiscreteOperator& op);

// P_eta Phi(Q) = sum_cells Phi * |cell| * lQ^eta / (lQ^(d+eta) + dist(cell, Q)^(d+eta)),
// with dist measured from cell centers to the cube.
double poisson_like(const GridFunction& phi, const Cube& q, double eta);

struct OffDiagonalResult {
    double ratio = 0.0;
    double numerator = 0.0;
    double poisson = 0.0;
    double g_l1 = 0.0;
    bool degenerate = false;  // 0/0 reported as ratio 0
};

// |<Tf, g>| / ( P_eta|f|(Q) * ||g||_1 ) for mean-zero g on Q and f supported
// off 2Q.  Violated support or mean preconditions throw.
OffDiagonalResult off_diagonal_check(const DiscreteOperator& op, const GridFunction& f,
                                     const GridFunction& g, const Cube& q);

struct HardyResult {
    double numerator = 0.0;
    double ratio = 0.0;
};

// integral over (3P\P) x P of f(x) g(y) / |x-y|^d, divided by ||f||_p ||g||_p'.
// f must live on P and g on 3P\P, both nonnegative; 1 < p < infinity.
HardyResult hardy_check(const Cube& p_cube, const GridFunction& f, const GridFunction& g, double p);

} // namespace czsparse
