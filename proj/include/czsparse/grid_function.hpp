#pragma once

// Piecewise-constant functions on the window mesh: exact averages, Haar
// differences, projections, martingale transforms, conditional expectations,
// the dyadic maximal function, and the Calderon-Zygmund decomposition.
// Every integral here is a finite cell sum, so identities are tested at
// near machine precision.

#include "czsparse/dyadic.hpp"

#include <climits>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace czsparse {

class GridFunction {
public:
    GridFunction() = default;
    explicit GridFunction(const GridGeometry& g, double fill = 0.0)
        : geom_(g), values_(std::size_t(g.cell_count()), fill) {}
    GridFunction(const GridGeometry& g, std::vector<double> values);

    const GridGeometry& geometry() const { return geom_; }
    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }
    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    double& operator[](std::size_t i) { return values_[i]; }

    // Row-major linear index, axis 0 slowest.
    std::int64_t cell_index(const IndexVec& cell) const;

    GridFunction& operator+=(const GridFunction& o);
    GridFunction& operator-=(const GridFunction& o);
    GridFunction& operator*=(double c);
    GridFunction abs() const;

    double integral() const;          // sum value * cell measure
    double l1_norm() const;
    double l2_norm() const;
    double sup_norm() const;
    double lp_norm(double p) const;   // exact cell sums of |v|^p * measure

private:
    GridGeometry geom_;
    std::vector<double> values_;
};

// Sum / mean of f over the cells of a base-grid window cube.
double cube_sum(const GridFunction& f, const Cube& q);
double average(const GridFunction& f, const Cube& q);

// Per-level cube averages (level 0 = mesh cells, level L = the window).
class AveragePyramid {
public:
    explicit AveragePyramid(const GridFunction& f);

    double avg(int level, const IndexVec& idx) const;
    int levels() const { return L_; }
    std::span<const double> level(int lvl) const;

private:
    int d_ = 1;
    int L_ = 0;
    std::int64_t n_ = 0;  // mesh cells per axis
    std::vector<std::vector<double>> data_;  // data_[lvl]
};

struct HaarDifference {
    Cube cube;
    int d = 1;
    // delta[c] = <f>_child(c) - <f>_Q; child c has axis-a offset bit (c>>a)&1.
    std::array<double, 8> delta{};

    double value_at_child(int c) const { return delta[std::size_t(c)]; }
    GridFunction to_function(const GridGeometry& g) const;
    // l2 norm squared of the difference as a function.
    double l2_sq(const GridGeometry& g) const;
};

// Haar (martingale) difference of f on Q; error at mesh scale.
HaarDifference haar_difference(const GridFunction& f, const Cube& q);
HaarDifference haar_difference(const AveragePyramid& pyr, const GridGeometry& g, const Cube& q);

Cube child_cube(const Cube& q, int local, int d);

// Sum of Delta_Q f over the cubes selected by the predicate (all window
// cubes above mesh scale are offered).
GridFunction project(const GridFunction& f, const std::function<bool(const Cube&)>& pred);

// Martingale transform sum eps(Q) Delta_Q f.
GridFunction martingale_transform(const GridFunction& f, const std::function<double(const Cube&)>& eps);

// Level slice D_k f = sum of Delta_P f over cubes P at scale k
// (equals averages at scale k-1 minus averages at scale k).
GridFunction level_difference(const GridFunction& f, int scale);
GridFunction level_difference(const AveragePyramid& pyr, const GridGeometry& g, int scale);

// E(phi | F_S): phi itself on S minus the family, the average on each family
// member, zero outside S.  The family must be disjoint subcubes of S.
GridFunction conditional_expectation(const GridFunction& phi, const Cube& s,
                                     const std::vector<Cube>& family);

// Dyadic maximal function M f(x) = max over window cubes containing x of <|f|>_Q.
GridFunction maximal_function(const GridFunction& f);

struct CZDecomposition {
    GridFunction good;                     // bounded part
    std::vector<Cube> bad_cubes;           // maximal cubes with <|f|>_Q > height
    std::vector<GridFunction> atoms;       // b_B, mean zero, supported on B
    double height = 0.0;
    bool degenerate = false;               // <|f|>_window already above height

    GridFunction bad_part() const;
    double bad_measure(const GridGeometry& g) const;
};

// Calderon-Zygmund decomposition of f at the given height.
CZDecomposition cz_decompose(const GridFunction& f, double height);

// Cell-wise i.i.d. uniform [-1,1] values on generation-scale cells inside the
// concentric half window, refined constantly to the mesh; optionally one
// averaging pass.  Fixing gen_scale (an absolute scale) pins the draw so that
// reruns at finer meshes see the same function.
inline constexpr int kGenAtMesh = INT_MIN;
GridFunction random_test_function(const GridGeometry& g, std::uint64_t seed, std::uint64_t stream,
                                  int gen_scale = kGenAtMesh, bool smooth = false, bool nonnegative = false);

// Summed tables for O(1) box sums over cells (d = 1 or 2).
class SummedTable {
public:
    explicit SummedTable(const GridFunction& f, bool absolute = false);
    // Sum of cells with axis-a index in [lo[a], hi[a]) clipped to the window.
    double box_sum(const IndexVec& lo, const IndexVec& hi) const;

private:
    int d_ = 1;
    std::int64_t n_ = 0;
    std::vector<double> table_;
};

} // namespace czsparse
