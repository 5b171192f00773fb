#include "czsparse/operator.hpp"

#include "czsparse/simd.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace czsparse {

GaussRule gauss_legendre(int order) {
    if (order < 1) throw std::invalid_argument("quadrature order must be >= 1");
    GaussRule rule;
    rule.nodes.resize(std::size_t(order));
    rule.weights.resize(std::size_t(order));
    // Newton iteration on Legendre roots, then map [-1,1] -> [0,1].
    for (int i = 0; i < order; ++i) {
        double x = std::cos(M_PI * (double(i) + 0.75) / (double(order) + 0.5));
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= order; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / double(k);
                p0 = p1;
                p1 = p2;
            }
            double dp = double(order) * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::fabs(dx) < 1e-15) break;
        }
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= order; ++k) {
            double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / double(k);
            p0 = p1;
            p1 = p2;
        }
        double dp = double(order) * (x * p1 - p0) / (x * x - 1.0);
        rule.nodes[std::size_t(order - 1 - i)] = 0.5 * (x + 1.0);
        rule.weights[std::size_t(order - 1 - i)] = 0.5 * 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return rule;
}

namespace {

struct CellBox {
    std::array<double, kMaxDim> lo{};
    std::array<double, kMaxDim> hi{};
};

CellBox cell_box(const GridGeometry& g, std::int64_t flat) {
    CellBox b;
    std::int64_t n = g.cells_per_axis();
    double h = g.cell_size();
    IndexVec idx{};
    for (int a = g.d - 1; a >= 0; --a) {
        idx[std::size_t(a)] = flat % n;
        flat /= n;
    }
    for (int a = 0; a < g.d; ++a) {
        b.lo[std::size_t(a)] = g.origin[std::size_t(a)] + h * double(idx[std::size_t(a)]);
        b.hi[std::size_t(a)] = b.lo[std::size_t(a)] + h;
    }
    return b;
}

double box_distance(const CellBox& a, const CellBox& b, int d) {
    double s = 0.0;
    for (int i = 0; i < d; ++i) {
        double gap = std::max({0.0, a.lo[std::size_t(i)] - b.hi[std::size_t(i)],
                               b.lo[std::size_t(i)] - a.hi[std::size_t(i)]});
        s += gap * gap;
    }
    return std::sqrt(s);
}

// F-combination for 1-d convolution kernels: integral over [cx,dx] x [ay,by]
// of k(x - y) with F'' = k.
double pair_integral_f(const std::function<double(double)>& F, double ay, double by, double cx, double dx) {
    return F(dx - ay) - F(cx - ay) - F(dx - by) + F(cx - by);
}

// Tensor Gauss integral of K over xbox x ybox with per-axis subdivision.
double quad_pair(const KernelSpec& k, const GaussRule& rule, const CellBox& xb, const CellBox& yb, int split) {
    int d = k.d;
    std::array<double, kMaxDim> xs{}, ys{};
    double total = 0.0;
    int nsub = split;
    std::int64_t sub_count = 1;
    for (int a = 0; a < 2 * d; ++a) sub_count *= nsub;
    for (std::int64_t sub = 0; sub < sub_count; ++sub) {
        std::int64_t rem = sub;
        std::array<int, 2 * kMaxDim> sidx{};
        for (int a = 0; a < 2 * d; ++a) {
            sidx[std::size_t(a)] = int(rem % nsub);
            rem /= nsub;
        }
        std::array<double, kMaxDim> xlo{}, xhi{}, ylo{}, yhi{};
        for (int a = 0; a < d; ++a) {
            double w = (xb.hi[std::size_t(a)] - xb.lo[std::size_t(a)]) / double(nsub);
            xlo[std::size_t(a)] = xb.lo[std::size_t(a)] + w * sidx[std::size_t(a)];
            xhi[std::size_t(a)] = xlo[std::size_t(a)] + w;
            double w2 = (yb.hi[std::size_t(a)] - yb.lo[std::size_t(a)]) / double(nsub);
            ylo[std::size_t(a)] = yb.lo[std::size_t(a)] + w2 * sidx[std::size_t(d + a)];
            yhi[std::size_t(a)] = ylo[std::size_t(a)] + w2;
        }
        // tensor product over 2d axes
        int q = int(rule.nodes.size());
        std::int64_t qcount = 1;
        for (int a = 0; a < 2 * d; ++a) qcount *= q;
        double vol = 1.0;
        for (int a = 0; a < d; ++a)
            vol *= (xhi[std::size_t(a)] - xlo[std::size_t(a)]) * (yhi[std::size_t(a)] - ylo[std::size_t(a)]);
        double acc = 0.0;
        for (std::int64_t t = 0; t < qcount; ++t) {
            std::int64_t r2 = t;
            double w = 1.0;
            for (int a = 0; a < d; ++a) {
                int i = int(r2 % q);
                r2 /= q;
                xs[std::size_t(a)] = xlo[std::size_t(a)] + (xhi[std::size_t(a)] - xlo[std::size_t(a)]) * rule.nodes[std::size_t(i)];
                w *= rule.weights[std::size_t(i)];
            }
            for (int a = 0; a < d; ++a) {
                int i = int(r2 % q);
                r2 /= q;
                ys[std::size_t(a)] = ylo[std::size_t(a)] + (yhi[std::size_t(a)] - ylo[std::size_t(a)]) * rule.nodes[std::size_t(i)];
                w *= rule.weights[std::size_t(i)];
            }
            acc += w * k.eval(xs.data(), ys.data());
        }
        total += acc * vol;
    }
    return total;
}

} // namespace

DiscreteOperator::DiscreteOperator(KernelSpec kernel, const GridGeometry& geom, int quad_order)
    : kernel_(std::move(kernel)), geom_(geom), quad_order_(quad_order) {
    if (kernel_.d != geom.d) throw std::invalid_argument("kernel dimension mismatch");
    n_ = geom.cell_count();
    a_.assign(std::size_t(n_ * n_), 0.0);
    diagonal_excluded_ = !kernel_.antisymmetric && !kernel_.is_zero();
    if (kernel_.is_zero()) return;

    const double h = geom.cell_size();
    if (geom.d == 1 && kernel_.pair_antiderivative) {
        const auto& F = kernel_.pair_antiderivative;
        // A[row, col]: x-cell = row, y-cell = col.
        for (std::int64_t row = 0; row < n_; ++row) {
            double cx = h * double(row);
            for (std::int64_t col = 0; col < n_; ++col) {
                if (row == col) continue;  // principal value / excluded
                double ay = h * double(col);
                a_[std::size_t(row * n_ + col)] = pair_integral_f(F, ay, ay + h, cx, cx + h);
            }
        }
        return;
    }

    GaussRule rule = gauss_legendre(quad_order_);
    for (std::int64_t row = 0; row < n_; ++row) {
        CellBox xb = cell_box(geom, row);
        for (std::int64_t col = 0; col < n_; ++col) {
            if (row == col) continue;
            CellBox yb = cell_box(geom, col);
            int split = box_distance(xb, yb, geom.d) < 0.5 * h ? 4 : 1;
            a_[std::size_t(row * n_ + col)] = quad_pair(kernel_, rule, xb, yb, split);
        }
    }
}

double DiscreteOperator::bilinear_form(const GridFunction& f, const GridFunction& g) const {
    if (!(f.geometry() == geom_) || !(g.geometry() == geom_))
        throw std::invalid_argument("geometry mismatch");
    double s = 0.0;
    const double* fv = f.values().data();
    for (std::int64_t row = 0; row < n_; ++row) {
        double gv = g[std::size_t(row)];
        if (gv == 0.0) continue;
        s += gv * simd::dot(a_.data() + row * n_, fv, std::size_t(n_));
    }
    return s;
}

GridFunction DiscreteOperator::apply(const GridFunction& f) const {
    if (!(f.geometry() == geom_)) throw std::invalid_argument("geometry mismatch");
    GridFunction out(geom_);
    double inv_meas = 1.0 / geom_.cell_measure();
    const double* fv = f.values().data();
    for (std::int64_t row = 0; row < n_; ++row)
        out[std::size_t(row)] = inv_meas * simd::dot(a_.data() + row * n_, fv, std::size_t(n_));
    return out;
}

GridFunction DiscreteOperator::apply_adjoint(const GridFunction& f) const {
    if (!(f.geometry() == geom_)) throw std::invalid_argument("geometry mismatch");
    GridFunction out(geom_);
    double inv_meas = 1.0 / geom_.cell_measure();
    for (std::int64_t col = 0; col < n_; ++col) {
        double s = 0.0;
        for (std::int64_t row = 0; row < n_; ++row) s += a_[std::size_t(row * n_ + col)] * f[std::size_t(row)];
        out[std::size_t(col)] = inv_meas * s;
    }
    return out;
}

namespace {

// Visit the flat indices of a window cube's cells.
template <typename Fn>
void for_cube_flat(const GridGeometry& g, const Cube& q, Fn&& fn) {
    std::int64_t side = cube_cells_per_axis(g, q);
    std::int64_t n = g.cells_per_axis();
    if (g.d == 1) {
        for (std::int64_t i = q.index[0] * side; i < (q.index[0] + 1) * side; ++i) fn(i);
    } else if (g.d == 2) {
        for (std::int64_t i = 0; i < side; ++i)
            for (std::int64_t j = 0; j < side; ++j)
                fn((q.index[0] * side + i) * n + q.index[1] * side + j);
    } else {
        for (std::int64_t i = 0; i < side; ++i)
            for (std::int64_t j = 0; j < side; ++j)
                for (std::int64_t k = 0; k < side; ++k)
                    fn(((q.index[0] * side + i) * n + q.index[1] * side + j) * n + q.index[2] * side + k);
    }
}

} // namespace

double DiscreteOperator::row_sum_over(const Cube& q, std::int64_t row) const {
    std::int64_t side = cube_cells_per_axis(geom_, q);
    const double* base = a_.data() + row * n_;
    if (geom_.d == 1) return simd::sum(base + q.index[0] * side, std::size_t(side));
    double s = 0.0;
    if (geom_.d == 2) {
        std::int64_t n = geom_.cells_per_axis();
        for (std::int64_t i = 0; i < side; ++i)
            s += simd::sum(base + (q.index[0] * side + i) * n + q.index[1] * side, std::size_t(side));
        return s;
    }
    for_cube_flat(geom_, q, [&](std::int64_t c) { s += base[c]; });
    return s;
}

double DiscreteOperator::col_sum_over(const Cube& q, std::int64_t col) const {
    double s = 0.0;
    for_cube_flat(geom_, q, [&](std::int64_t row) { s += a_[std::size_t(row * n_ + col)]; });
    return s;
}

double testing_constant(const DiscreteOperator& op, const Cube& q) {
    const GridGeometry& g = op.geometry();
    if (!cube_in_window(g, q)) throw std::invalid_argument("cube outside window");
    double cells = std::pow(double(cube_cells_per_axis(g, q)), g.d);
    double fwd = 0.0, adj = 0.0;
    for_cube_flat(g, q, [&](std::int64_t c) {
        fwd += std::fabs(op.row_sum_over(q, c));
        adj += std::fabs(op.col_sum_over(q, c));
    });
    // <|T 1_Q|>_Q = sum_{c in Q} |rowsum| / (cells * cell measure)
    double denom = cells * g.cell_measure();
    return std::max(fwd / denom, adj / denom);
}

double testing_sup(const DiscreteOperator& op) {
    double best = 0.0;
    for_each_cube(op.geometry(), [&](const Cube& q) { best = std::max(best, testing_constant(op, q)); });
    return best;
}

double poisson_like(const GridFunction& phi, const Cube& q, double eta) {
    if (!(eta > 0.0)) throw std::invalid_argument("eta must be positive");
    const GridGeometry& g = phi.geometry();
    double h = g.cell_size();
    double lq = cube_side(q);
    std::int64_t qside = cube_cells_per_axis(g, q);
    std::array<double, kMaxDim> qlo{}, qhi{};
    for (int a = 0; a < g.d; ++a) {
        qlo[std::size_t(a)] = h * double(q.index[std::size_t(a)] * qside);
        qhi[std::size_t(a)] = qlo[std::size_t(a)] + lq;
    }
    double num = std::pow(lq, eta);
    double lq_pow = std::pow(lq, g.d + eta);
    std::int64_t n = g.cells_per_axis();
    double acc = 0.0;
    IndexVec idx{};
    for (std::int64_t flat = 0; flat < g.cell_count(); ++flat) {
        double v = phi[std::size_t(flat)];
        if (v != 0.0) {
            std::int64_t rem = flat;
            for (int a = g.d - 1; a >= 0; --a) {
                idx[std::size_t(a)] = rem % n;
                rem /= n;
            }
            double dsq = 0.0;
            for (int a = 0; a < g.d; ++a) {
                double t = h * (double(idx[std::size_t(a)]) + 0.5);
                double gap = std::max({0.0, qlo[std::size_t(a)] - t, t - qhi[std::size_t(a)]});
                dsq += gap * gap;
            }
            double dist = std::sqrt(dsq);
            acc += v / (lq_pow + std::pow(dist, g.d + eta));
        }
    }
    return num * acc * g.cell_measure();
}

OffDiagonalResult off_diagonal_check(const DiscreteOperator& op, const GridFunction& f,
                                     const GridFunction& g, const Cube& q) {
    const GridGeometry& geom = op.geometry();
    if (!(f.geometry() == geom) || !(g.geometry() == geom))
        throw std::invalid_argument("geometry mismatch");

    // g lives on Q with mean zero
    std::vector<char> in_q(std::size_t(geom.cell_count()), 0);
    for_cube_flat(geom, q, [&](std::int64_t c) { in_q[std::size_t(c)] = 1; });
    double gsum = 0.0, gl1 = 0.0;
    for (std::int64_t c = 0; c < geom.cell_count(); ++c) {
        if (!in_q[std::size_t(c)] && g[std::size_t(c)] != 0.0)
            throw std::invalid_argument("g must be supported on Q");
        gsum += g[std::size_t(c)];
        gl1 += std::fabs(g[std::size_t(c)]);
    }
    gsum *= geom.cell_measure();
    gl1 *= geom.cell_measure();
    if (gl1 > 0.0 && std::fabs(gsum) > 1e-10 * gl1)
        throw std::invalid_argument("g must have integral zero");

    // f vanishes on the concentric double 2Q (work in half-cell units)
    std::int64_t qside = cube_cells_per_axis(geom, q);
    std::int64_t n = geom.cells_per_axis();
    IndexVec idx{};
    for (std::int64_t flat = 0; flat < geom.cell_count(); ++flat) {
        if (f[std::size_t(flat)] == 0.0) continue;
        std::int64_t rem = flat;
        bool inside2q = true;
        for (int a = geom.d - 1; a >= 0; --a) {
            idx[std::size_t(a)] = rem % n;
            rem /= n;
        }
        for (int a = 0; a < geom.d; ++a) {
            std::int64_t lo2 = 2 * q.index[std::size_t(a)] * qside - qside;      // 2Q low edge, half cells
            std::int64_t hi2 = 2 * (q.index[std::size_t(a)] + 1) * qside + qside;
            std::int64_t clo = 2 * idx[std::size_t(a)], chi = clo + 2;
            if (chi <= lo2 || clo >= hi2) inside2q = false;
        }
        if (inside2q) throw std::invalid_argument("f must vanish on 2Q");
    }

    OffDiagonalResult res;
    res.numerator = std::fabs(op.bilinear_form(f, g));
    res.poisson = poisson_like(f.abs(), q, op.kernel().eta);
    res.g_l1 = gl1;
    double denom = res.poisson * gl1;
    if (denom == 0.0) {
        res.degenerate = true;
        res.ratio = 0.0;
    } else {
        res.ratio = res.numerator / denom;
    }
    return res;
}

namespace {

double hardy_f(double t) { return t <= 0.0 ? 0.0 : t * std::log(t) - t; }

// integral over [cx,dx] x [ay,by] of 1/|x-y| for disjoint 1-d cells
double hardy_pair_1d(double ay, double by, double cx, double dx) {
    if (cx >= by) return hardy_f(dx - ay) - hardy_f(cx - ay) - hardy_f(dx - by) + hardy_f(cx - by);
    return hardy_f(by - cx) - hardy_f(ay - cx) - hardy_f(by - dx) + hardy_f(ay - dx);
}

} // namespace

HardyResult hardy_check(const Cube& p_cube, const GridFunction& f, const GridFunction& g, double p) {
    if (!(p > 1.0)) throw std::invalid_argument("need 1 < p < infinity");
    const GridGeometry& geom = f.geometry();
    if (!(g.geometry() == geom)) throw std::invalid_argument("geometry mismatch");

    std::int64_t pside = cube_cells_per_axis(geom, p_cube);
    std::int64_t n = geom.cells_per_axis();
    auto region_of = [&](const IndexVec& idx) {
        // 0: inside P, 1: inside 3P\P, 2: elsewhere
        bool in_p = true, in_3p = true;
        for (int a = 0; a < geom.d; ++a) {
            std::int64_t blk = idx[std::size_t(a)] / pside;  // scale-P block of this cell
            if (blk != p_cube.index[std::size_t(a)]) in_p = false;
            if (blk < p_cube.index[std::size_t(a)] - 1 || blk > p_cube.index[std::size_t(a)] + 1) in_3p = false;
        }
        if (in_p) return 0;
        return in_3p ? 1 : 2;
    };

    std::vector<std::int64_t> p_cells, ring_cells;
    IndexVec idx{};
    for (std::int64_t flat = 0; flat < geom.cell_count(); ++flat) {
        std::int64_t rem = flat;
        for (int a = geom.d - 1; a >= 0; --a) {
            idx[std::size_t(a)] = rem % n;
            rem /= n;
        }
        int reg = region_of(idx);
        double fv = f[std::size_t(flat)], gv = g[std::size_t(flat)];
        if (fv < 0.0 || gv < 0.0) throw std::invalid_argument("hardy check needs nonnegative inputs");
        if (fv != 0.0 && reg != 0) throw std::invalid_argument("f must be supported on P");
        if (gv != 0.0 && reg != 1) throw std::invalid_argument("g must be supported on 3P minus P");
        if (reg == 0) p_cells.push_back(flat);
        if (reg == 1) ring_cells.push_back(flat);
    }

    double h = geom.cell_size();
    HardyResult out;
    if (geom.d == 1) {
        for (std::int64_t cx : p_cells) {
            double fv = f[std::size_t(cx)];
            if (fv == 0.0) continue;
            for (std::int64_t cy : ring_cells) {
                double gv = g[std::size_t(cy)];
                if (gv == 0.0) continue;
                out.numerator += fv * gv * hardy_pair_1d(h * double(cy), h * double(cy + 1),
                                                         h * double(cx), h * double(cx + 1));
            }
        }
    } else {
        GaussRule rule = gauss_legendre(6);
        KernelSpec absker;
        absker.d = geom.d;
        absker.eval = [dd = geom.d](const double* x, const double* y) {
            double s = 0.0;
            for (int a = 0; a < dd; ++a) s += (x[a] - y[a]) * (x[a] - y[a]);
            return 1.0 / std::pow(std::sqrt(s), dd);
        };
        for (std::int64_t cx : p_cells) {
            double fv = f[std::size_t(cx)];
            if (fv == 0.0) continue;
            CellBox xb = cell_box(geom, cx);
            for (std::int64_t cy : ring_cells) {
                double gv = g[std::size_t(cy)];
                if (gv == 0.0) continue;
                CellBox yb = cell_box(geom, cy);
                int split = box_distance(xb, yb, geom.d) < 0.5 * h ? 4 : 1;
                out.numerator += fv * gv * quad_pair(absker, rule, xb, yb, split);
            }
        }
    }

    double pp = p / (p - 1.0);
    double denom = f.lp_norm(p) * g.lp_norm(pp);
    out.ratio = denom > 0.0 ? out.numerator / denom : 0.0;
    return out;
}

} // namespace czsparse
