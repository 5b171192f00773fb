#pragma once

// Shifted/random dyadic grids on a bounded window, cube navigation, the
// good/bad run classification, and the goodness geometry checks.
//
// Scale convention: a cube at scale s has sidelength 2^s.  The window P0 is
// the cube at scale scale_max; mesh cells sit at scale scale_min.  Shift
// entries omega_t are indexed by the scale t of the sidelength they move
// (the shift of a scale-s cube is sum_{t < s} 2^t * omega_t, truncated at
// the mesh).  Within the window the relative positions of cubes are the
// standard dyadic subdivision; omega enters only through the run condition
// and through absolute placement (shift_cube).

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace czsparse {

inline constexpr int kMaxDim = 3;

using IndexVec = std::array<std::int64_t, kMaxDim>;

struct GridGeometry {
    int d = 1;
    int scale_min = 0;
    int scale_max = 0;
    // Window corner; the window is origin + [0, 2^scale_max)^d.
    std::array<double, kMaxDim> origin{};

    GridGeometry() = default;
    GridGeometry(int dim, int smin, int smax, std::array<double, kMaxDim> org = {})
        : d(dim), scale_min(smin), scale_max(smax), origin(org) {
        if (d < 1 || d > kMaxDim) throw std::invalid_argument("dimension out of range");
        if (scale_min >= scale_max) throw std::invalid_argument("scale_min must be < scale_max");
    }

    int levels() const { return scale_max - scale_min; }                 // L
    std::int64_t cells_per_axis() const { return std::int64_t(1) << levels(); }
    std::int64_t cell_count() const {
        std::int64_t n = 1;
        for (int a = 0; a < d; ++a) n *= cells_per_axis();
        return n;
    }
    double cell_size() const { return std::ldexp(1.0, scale_min); }
    double window_side() const { return std::ldexp(1.0, scale_max); }
    double cell_measure() const { return std::pow(cell_size(), d); }

    bool operator==(const GridGeometry&) const = default;
};

// A dyadic cube: scale, window-relative index per axis, owning grid id
// (0 = the base grid of the window; other ids are shifted family grids).
struct Cube {
    int scale = 0;
    IndexVec index{};
    int grid = 0;

    bool operator==(const Cube&) const = default;
};

inline Cube make_cube(int scale, std::int64_t i0, std::int64_t i1 = 0, std::int64_t i2 = 0, int grid = 0) {
    return Cube{scale, {i0, i1, i2}, grid};
}

double cube_side(const Cube& q);
std::int64_t cube_cells_per_axis(const GridGeometry& g, const Cube& q);  // 2^(scale-scale_min)
double cube_measure(const GridGeometry& g, const Cube& q);
// Corner of the cube in absolute coordinates (base grid only).
std::array<double, kMaxDim> cube_corner(const GridGeometry& g, const Cube& q);
bool cube_in_window(const GridGeometry& g, const Cube& q);
// Same-grid containment test (exact integer arithmetic).
bool cube_contains(const Cube& outer, const Cube& inner);
// Ancestor of q at the given scale (same grid).
Cube cube_ancestor(const Cube& q, int scale);

// Binary shift parameters, one {0,1}^d vector per scale in
// [scale_lo, scale_lo + size).  Entry t moves every cube whose sidelength
// exceeds 2^t by 2^t along the set axes.
class ShiftSequence {
public:
    ShiftSequence() = default;
    ShiftSequence(int scale_lo, std::vector<std::uint32_t> masks, int d)
        : scale_lo_(scale_lo), masks_(std::move(masks)), d_(d) {}

    static ShiftSequence zeros(int scale_lo, int count, int d);
    static ShiftSequence sample(int scale_lo, int count, int d, std::uint64_t seed);

    int scale_lo() const { return scale_lo_; }
    int scale_hi() const { return scale_lo_ + int(masks_.size()) - 1; }  // inclusive
    int size() const { return int(masks_.size()); }
    int dim() const { return d_; }
    bool in_range(int t) const { return t >= scale_lo_ && t <= scale_hi(); }
    bool bit(int t, int axis) const { return (masks_.at(std::size_t(t - scale_lo_)) >> axis) & 1u; }
    std::uint32_t mask(int t) const { return masks_.at(std::size_t(t - scale_lo_)); }
    std::vector<std::uint32_t>& masks() { return masks_; }
    const std::vector<std::uint32_t>& masks() const { return masks_; }

private:
    int scale_lo_ = 0;
    std::vector<std::uint32_t> masks_;
    int d_ = 1;
};

// Geometric realization of a standard-grid label (scale s, integer index m)
// under the shift sequence: corner = 2^s m + sum_{t in [scale_lo, s)} 2^t omega_t.
struct ShiftedCube {
    std::array<double, kMaxDim> corner{};
    double side = 0.0;
};
ShiftedCube shift_cube(const Cube& label, const ShiftSequence& omega);

struct GoodnessParams {
    double gamma = 0.5;
    int r = 2;

    // The run condition needs r >= 1/(1-gamma) so that runs sit strictly
    // below the tested cube, and r >= 1/gamma so every run has >= 2 entries.
    void validate() const;
    int min_r() const;
};

enum class Classification { Good, Bad, Undecidable };

// Run condition for a cube at scale q: bad iff for some s in [r, s_avail]
// the entries omega_{q + floor((1-gamma)s)} ... omega_{q+s} agree in some
// coordinate.  Those entries are exactly the binary digits that place the
// cube inside its ancestor at scale q+s+1, which is what makes the goodness
// geometry lemma checkable (see geom_good_report).  Cubes whose first run
// (s = r) would need entries beyond the sequence are Undecidable.
Classification classify_scale(int scale, const ShiftSequence& omega, const GoodnessParams& params);
Classification classify_good(const Cube& q, const ShiftSequence& omega, const GoodnessParams& params);

// Classification per level (level = scale - scale_min) for a whole window.
std::vector<Classification> classify_levels(const GridGeometry& g, const ShiftSequence& omega,
                                            const GoodnessParams& params);

// Distance from Q to the union of the boundaries of P's children.
// Throws if Q is not contained in P or the grids differ.
double skeleton_distance(const GridGeometry& g, const Cube& q, const Cube& p);
// Distance from Q to the boundary of P (same preconditions).
double boundary_distance(const GridGeometry& g, const Cube& q, const Cube& p);

enum class Relation { Inside, Near, Far, Neighbor, NotApplicable };

// Mutually exclusive position labels for a same-grid pair with lQ <= lP:
//   inside:   Q subset P  and 2^r lQ <= lP
//   near:     Q subset 3P \ P and 2^r lQ <= lP
//   far:      Q and 3P disjoint
//   neighbor: lP <= 2^r lQ and Q meets 3P
Relation relation(const GridGeometry& g, const Cube& p, const Cube& q, int r);

// Q subset 3P / Q meets 3P in exact index arithmetic (same grid, lQ <= lP).
bool cube_in_triple(const GridGeometry& g, const Cube& p, const Cube& q);
bool cube_meets_triple(const GridGeometry& g, const Cube& p, const Cube& q);

// Visit every cube of the window at scales [scale_min, scale_max].
void for_each_cube(const GridGeometry& g, const std::function<void(const Cube&)>& fn);
// Visit every cube at one scale.
void for_each_cube_at_scale(const GridGeometry& g, int scale, const std::function<void(const Cube&)>& fn);

// Measured check of the goodness geometry: for every good scale q the
// omega-aligned cube of that scale (the one realized by the shift) is tested
// against all window ancestors P with 2^r lQ < lP.  Reports the smallest
// ratio dist/( lQ^gamma lP^(1-gamma) ) for both skeleton and outer-boundary
// distances.  The outer-boundary ratio is guaranteed positive for good
// scales; the skeleton ratio is reported as measured.
struct GeomGoodReport {
    double min_boundary_ratio = -1.0;  // -1: no pairs checked
    double min_skeleton_ratio = -1.0;
    std::int64_t pairs = 0;
    int good_scales = 0;
    int bad_scales = 0;
    int undecidable_scales = 0;
};
GeomGoodReport geom_good_report(const GridGeometry& g, const ShiftSequence& omega,
                                const GoodnessParams& params);

// Grid description bundle for (de)serialization.
struct GridDescriptor {
    GridGeometry geometry;
    GoodnessParams params;
    ShiftSequence omega;
    std::uint64_t seed = 0;
};

} // namespace czsparse
