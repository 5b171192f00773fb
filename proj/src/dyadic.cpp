#include "czsparse/dyadic.hpp"

#include "czsparse/rng.hpp"

#include <algorithm>
#include <cmath>

namespace czsparse {

double cube_side(const Cube& q) { return std::ldexp(1.0, q.scale); }

std::int64_t cube_cells_per_axis(const GridGeometry& g, const Cube& q) {
    return std::int64_t(1) << (q.scale - g.scale_min);
}

double cube_measure(const GridGeometry& g, const Cube& q) {
    return std::pow(cube_side(q), g.d);
}

std::array<double, kMaxDim> cube_corner(const GridGeometry& g, const Cube& q) {
    std::array<double, kMaxDim> c{};
    double side = cube_side(q);
    for (int a = 0; a < g.d; ++a) c[a] = g.origin[a] + side * double(q.index[a]);
    return c;
}

bool cube_in_window(const GridGeometry& g, const Cube& q) {
    if (q.scale < g.scale_min || q.scale > g.scale_max) return false;
    std::int64_t count = std::int64_t(1) << (g.scale_max - q.scale);
    for (int a = 0; a < g.d; ++a)
        if (q.index[a] < 0 || q.index[a] >= count) return false;
    return true;
}

bool cube_contains(const Cube& outer, const Cube& inner) {
    if (outer.grid != inner.grid || outer.scale < inner.scale) return false;
    int shift = outer.scale - inner.scale;
    for (int a = 0; a < kMaxDim; ++a)
        if ((inner.index[a] >> shift) != outer.index[a]) return false;
    return true;
}

Cube cube_ancestor(const Cube& q, int scale) {
    if (scale < q.scale) throw std::invalid_argument("ancestor scale below cube scale");
    Cube p = q;
    int shift = scale - q.scale;
    p.scale = scale;
    for (auto& i : p.index) i >>= shift;
    return p;
}

ShiftSequence ShiftSequence::zeros(int scale_lo, int count, int d) {
    return ShiftSequence(scale_lo, std::vector<std::uint32_t>(std::size_t(count), 0u), d);
}

ShiftSequence ShiftSequence::sample(int scale_lo, int count, int d, std::uint64_t seed) {
    auto rng = make_rng(seed, 0x6f6d656761ULL);
    std::vector<std::uint32_t> masks(std::size_t(count), 0u);
    for (auto& m : masks) m = std::uint32_t(rng()) & ((1u << d) - 1u);
    return ShiftSequence(scale_lo, std::move(masks), d);
}

ShiftedCube shift_cube(const Cube& label, const ShiftSequence& omega) {
    // A scale-s cube needs every entry in [scale_lo, s); entries below the
    // sequence floor are truncated away by the mesh, missing coarse entries
    // are an error.
    if (label.scale - 1 > omega.scale_hi())
        throw std::range_error("scale out of range for shift sequence");
    ShiftedCube out;
    out.side = cube_side(label);
    for (int a = 0; a < omega.dim(); ++a)
        out.corner[a] = out.side * double(label.index[a]);
    // Entries finer than the sequence's own floor are simply absent: the
    // grid's mesh truncates the shift sum.
    int t_lo = omega.scale_lo();
    int t_hi = std::min(label.scale - 1, omega.scale_hi());
    for (int t = t_lo; t <= t_hi; ++t) {
        double w = std::ldexp(1.0, t);
        for (int a = 0; a < omega.dim(); ++a)
            if (omega.bit(t, a)) out.corner[a] += w;
    }
    return out;
}

void GoodnessParams::validate() const {
    if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must be in (0,1)");
    if (r < min_r()) throw std::invalid_argument("r too small for gamma: need r >= " + std::to_string(min_r()));
}

int GoodnessParams::min_r() const {
    int a = int(std::ceil(1.0 / (1.0 - gamma)));
    int b = int(std::ceil(1.0 / gamma));
    return std::max(a, b);
}

namespace {

// Entries of the run at excess s for a cube at scale q: scales
// q + floor((1-gamma) s) .. q + s inclusive.
inline int run_lo(int q, double gamma, int s) { return q + int(std::floor((1.0 - gamma) * double(s))); }

bool run_is_constant(const ShiftSequence& omega, int lo, int hi, int axis) {
    bool first = omega.bit(lo, axis);
    for (int t = lo + 1; t <= hi; ++t)
        if (omega.bit(t, axis) != first) return false;
    return true;
}

} // namespace

Classification classify_scale(int scale, const ShiftSequence& omega, const GoodnessParams& params) {
    params.validate();
    int s_avail = omega.scale_hi() - scale;
    if (s_avail < params.r) return Classification::Undecidable;
    for (int s = params.r; s <= s_avail; ++s) {
        int lo = run_lo(scale, params.gamma, s);
        int hi = scale + s;
        if (!omega.in_range(lo))
            throw std::range_error("shift sequence too short below scale " + std::to_string(scale));
        for (int axis = 0; axis < omega.dim(); ++axis)
            if (run_is_constant(omega, lo, hi, axis)) return Classification::Bad;
    }
    return Classification::Good;
}

Classification classify_good(const Cube& q, const ShiftSequence& omega, const GoodnessParams& params) {
    return classify_scale(q.scale, omega, params);
}

std::vector<Classification> classify_levels(const GridGeometry& g, const ShiftSequence& omega,
                                            const GoodnessParams& params) {
    std::vector<Classification> out;
    out.reserve(std::size_t(g.levels()) + 1);
    for (int s = g.scale_min; s <= g.scale_max; ++s) out.push_back(classify_scale(s, omega, params));
    return out;
}

double skeleton_distance(const GridGeometry& g, const Cube& q, const Cube& p) {
    if (q.grid != p.grid) throw std::invalid_argument("grid mismatch");
    if (!cube_contains(p, q)) throw std::invalid_argument("Q must be contained in P");
    if (p.scale == q.scale) return 0.0;
    double lq = cube_side(q), lp = cube_side(p);
    double best = lp;
    for (int a = 0; a < g.d; ++a) {
        double qlo = lq * double(q.index[a]);
        double qhi = qlo + lq;
        double plo = lp * double(p.index[a]);
        for (double plane : {plo, plo + 0.5 * lp, plo + lp}) {
            double dist = std::max({0.0, qlo - plane, plane - qhi});
            best = std::min(best, dist);
        }
    }
    return best;
}

double boundary_distance(const GridGeometry& g, const Cube& q, const Cube& p) {
    if (q.grid != p.grid) throw std::invalid_argument("grid mismatch");
    if (!cube_contains(p, q)) throw std::invalid_argument("Q must be contained in P");
    double lq = cube_side(q), lp = cube_side(p);
    double best = lp;
    for (int a = 0; a < g.d; ++a) {
        double qlo = lq * double(q.index[a]);
        double qhi = qlo + lq;
        double plo = lp * double(p.index[a]);
        best = std::min({best, qlo - plo, plo + lp - qhi});
    }
    return best;
}

bool cube_in_triple(const GridGeometry& g, const Cube& p, const Cube& q) {
    (void)g;
    int shift = p.scale - q.scale;
    for (int a = 0; a < kMaxDim; ++a) {
        std::int64_t anc = q.index[a] >> shift;
        if (anc < p.index[a] - 1 || anc > p.index[a] + 1) return false;
    }
    return true;
}

bool cube_meets_triple(const GridGeometry& g, const Cube& p, const Cube& q) {
    // A finer same-grid cube lies in exactly one scale-lP cell, so meeting
    // and containment coincide at this scale gap.
    return cube_in_triple(g, p, q);
}

Relation relation(const GridGeometry& g, const Cube& p, const Cube& q, int r) {
    if (p.grid != q.grid) throw std::invalid_argument("grid mismatch");
    if (q.scale > p.scale) return Relation::NotApplicable;
    bool scale_sep = q.scale + r <= p.scale;  // 2^r lQ <= lP
    bool in3p = cube_in_triple(g, p, q);
    if (!in3p) return Relation::Far;
    if (!scale_sep) return Relation::Neighbor;
    if (cube_contains(p, q)) return Relation::Inside;
    return Relation::Near;
}

void for_each_cube_at_scale(const GridGeometry& g, int scale, const std::function<void(const Cube&)>& fn) {
    std::int64_t count = std::int64_t(1) << (g.scale_max - scale);
    Cube q;
    q.scale = scale;
    if (g.d == 1) {
        for (std::int64_t i = 0; i < count; ++i) {
            q.index = {i, 0, 0};
            fn(q);
        }
    } else if (g.d == 2) {
        for (std::int64_t i = 0; i < count; ++i)
            for (std::int64_t j = 0; j < count; ++j) {
                q.index = {i, j, 0};
                fn(q);
            }
    } else {
        for (std::int64_t i = 0; i < count; ++i)
            for (std::int64_t j = 0; j < count; ++j)
                for (std::int64_t k = 0; k < count; ++k) {
                    q.index = {i, j, k};
                    fn(q);
                }
    }
}

void for_each_cube(const GridGeometry& g, const std::function<void(const Cube&)>& fn) {
    for (int s = g.scale_min; s <= g.scale_max; ++s) for_each_cube_at_scale(g, s, fn);
}

GeomGoodReport geom_good_report(const GridGeometry& g, const ShiftSequence& omega,
                                const GoodnessParams& params) {
    GeomGoodReport rep;
    auto cls = classify_levels(g, omega, params);
    for (int q_scale = g.scale_min; q_scale <= g.scale_max; ++q_scale) {
        switch (cls[std::size_t(q_scale - g.scale_min)]) {
            case Classification::Good: rep.good_scales++; break;
            case Classification::Bad: rep.bad_scales++; continue;
            case Classification::Undecidable: rep.undecidable_scales++; continue;
        }
        // The omega-aligned cube at this scale: its offset inside each
        // ancestor is exactly the (negated) digit sum of the in-between
        // shift entries, so the run condition speaks about it verbatim.
        int levels_up = g.scale_max - q_scale;
        if (levels_up == 0) continue;
        Cube q;
        q.scale = q_scale;
        for (int a = 0; a < g.d; ++a) {
            std::uint64_t m = 0;
            for (int t = g.scale_max - 1; t >= q_scale; --t) m = (m << 1) | (omega.bit(t, a) ? 1u : 0u);
            std::uint64_t span = std::uint64_t(1) << levels_up;
            q.index[a] = std::int64_t((span - (m & (span - 1))) & (span - 1));
        }
        double lq = cube_side(q);
        for (int p_scale = q_scale + params.r + 1; p_scale <= g.scale_max; ++p_scale) {
            Cube p = cube_ancestor(q, p_scale);
            double lp = cube_side(p);
            double threshold = std::pow(lq, params.gamma) * std::pow(lp, 1.0 - params.gamma);
            double bratio = boundary_distance(g, q, p) / threshold;
            double sratio = skeleton_distance(g, q, p) / threshold;
            if (rep.pairs == 0 || bratio < rep.min_boundary_ratio) rep.min_boundary_ratio = bratio;
            if (rep.pairs == 0 || sratio < rep.min_skeleton_ratio) rep.min_skeleton_ratio = sratio;
            rep.pairs++;
        }
    }
    return rep;
}

} // namespace czsparse
