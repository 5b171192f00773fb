#include "czsparse/grid_function.hpp"

#include "czsparse/rng.hpp"
#include "czsparse/simd.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>

namespace czsparse {

namespace {

void check_same_geometry(const GridGeometry& a, const GridGeometry& b) {
    if (!(a == b)) throw std::invalid_argument("geometry mismatch");
}

void check_window_cube(const GridGeometry& g, const Cube& q) {
    if (q.grid != 0) throw std::invalid_argument("base-grid cube expected");
    if (!cube_in_window(g, q)) throw std::invalid_argument("cube outside window");
}

} // namespace

GridFunction::GridFunction(const GridGeometry& g, std::vector<double> values)
    : geom_(g), values_(std::move(values)) {
    if (std::int64_t(values_.size()) != g.cell_count())
        throw std::invalid_argument("value count must equal cell count");
}

std::int64_t GridFunction::cell_index(const IndexVec& cell) const {
    std::int64_t n = geom_.cells_per_axis();
    std::int64_t idx = 0;
    for (int a = 0; a < geom_.d; ++a) idx = idx * n + cell[std::size_t(a)];
    return idx;
}

GridFunction& GridFunction::operator+=(const GridFunction& o) {
    check_same_geometry(geom_, o.geom_);
    simd::axpy(1.0, o.values_.data(), values_.data(), values_.size());
    return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& o) {
    check_same_geometry(geom_, o.geom_);
    simd::axpy(-1.0, o.values_.data(), values_.data(), values_.size());
    return *this;
}

GridFunction& GridFunction::operator*=(double c) {
    for (auto& v : values_) v *= c;
    return *this;
}

GridFunction GridFunction::abs() const {
    GridFunction out(geom_);
    for (std::size_t i = 0; i < values_.size(); ++i) out.values_[i] = std::fabs(values_[i]);
    return out;
}

double GridFunction::integral() const {
    return simd::sum(values_.data(), values_.size()) * geom_.cell_measure();
}

double GridFunction::l1_norm() const {
    return simd::sum_abs(values_.data(), values_.size()) * geom_.cell_measure();
}

double GridFunction::l2_norm() const {
    return std::sqrt(simd::sum_sq(values_.data(), values_.size()) * geom_.cell_measure());
}

double GridFunction::sup_norm() const {
    return simd::max_abs(values_.data(), values_.size());
}

double GridFunction::lp_norm(double p) const {
    if (p == 2.0) return l2_norm();
    if (p == 1.0) return l1_norm();
    double s = 0.0;
    for (double v : values_) s += std::pow(std::fabs(v), p);
    return std::pow(s * geom_.cell_measure(), 1.0 / p);
}

double cube_sum(const GridFunction& f, const Cube& q) {
    const GridGeometry& g = f.geometry();
    check_window_cube(g, q);
    std::int64_t side = cube_cells_per_axis(g, q);
    const double* v = f.values().data();
    if (g.d == 1) return simd::sum(v + q.index[0] * side, std::size_t(side));
    std::int64_t n = g.cells_per_axis();
    if (g.d == 2) {
        double s = 0.0;
        std::int64_t row0 = q.index[0] * side, col0 = q.index[1] * side;
        for (std::int64_t i = 0; i < side; ++i)
            s += simd::sum(v + (row0 + i) * n + col0, std::size_t(side));
        return s;
    }
    double s = 0.0;
    for (std::int64_t i = 0; i < side; ++i)
        for (std::int64_t j = 0; j < side; ++j)
            s += simd::sum(v + ((q.index[0] * side + i) * n + (q.index[1] * side + j)) * n + q.index[2] * side,
                           std::size_t(side));
    return s;
}

double average(const GridFunction& f, const Cube& q) {
    const GridGeometry& g = f.geometry();
    std::int64_t side = cube_cells_per_axis(g, q);
    double cells = std::pow(double(side), g.d);
    return cube_sum(f, q) / cells;
}

AveragePyramid::AveragePyramid(const GridFunction& f) {
    const GridGeometry& g = f.geometry();
    d_ = g.d;
    L_ = g.levels();
    n_ = g.cells_per_axis();
    data_.resize(std::size_t(L_) + 1);
    data_[0].assign(f.values().begin(), f.values().end());
    std::int64_t n = g.cells_per_axis();
    for (int lvl = 1; lvl <= L_; ++lvl) {
        std::int64_t m = n >> lvl;
        const auto& prev = data_[std::size_t(lvl - 1)];
        auto& cur = data_[std::size_t(lvl)];
        if (d_ == 1) {
            cur.resize(std::size_t(m));
            for (std::int64_t i = 0; i < m; ++i)
                cur[std::size_t(i)] = 0.5 * (prev[std::size_t(2 * i)] + prev[std::size_t(2 * i + 1)]);
        } else if (d_ == 2) {
            std::int64_t mp = m * 2;
            cur.resize(std::size_t(m * m));
            for (std::int64_t i = 0; i < m; ++i)
                for (std::int64_t j = 0; j < m; ++j)
                    cur[std::size_t(i * m + j)] =
                        0.25 * (prev[std::size_t(2 * i * mp + 2 * j)] + prev[std::size_t(2 * i * mp + 2 * j + 1)] +
                                prev[std::size_t((2 * i + 1) * mp + 2 * j)] +
                                prev[std::size_t((2 * i + 1) * mp + 2 * j + 1)]);
        } else {
            std::int64_t mp = m * 2;
            cur.resize(std::size_t(m * m * m));
            for (std::int64_t i = 0; i < m; ++i)
                for (std::int64_t j = 0; j < m; ++j)
                    for (std::int64_t k = 0; k < m; ++k) {
                        double s = 0.0;
                        for (int c = 0; c < 8; ++c)
                            s += prev[std::size_t((2 * i + (c & 1)) * mp * mp + (2 * j + ((c >> 1) & 1)) * mp +
                                                  2 * k + ((c >> 2) & 1))];
                        cur[std::size_t(i * m * m + j * m + k)] = s / 8.0;
                    }
        }
    }
}

double AveragePyramid::avg(int level, const IndexVec& idx) const {
    std::int64_t m = n_ >> level;
    std::int64_t flat = 0;
    for (int a = 0; a < d_; ++a) flat = flat * m + idx[std::size_t(a)];
    return data_[std::size_t(level)][std::size_t(flat)];
}

std::span<const double> AveragePyramid::level(int lvl) const { return data_[std::size_t(lvl)]; }

Cube child_cube(const Cube& q, int local, int d) {
    Cube c;
    c.scale = q.scale - 1;
    c.grid = q.grid;
    for (int a = 0; a < d; ++a) c.index[std::size_t(a)] = 2 * q.index[std::size_t(a)] + ((local >> a) & 1);
    return c;
}

HaarDifference haar_difference(const AveragePyramid& pyr, const GridGeometry& g, const Cube& q) {
    if (q.scale <= g.scale_min) throw std::invalid_argument("no Haar difference at mesh scale");
    check_window_cube(g, q);
    HaarDifference h;
    h.cube = q;
    h.d = g.d;
    int lvl = q.scale - g.scale_min;
    double qa = pyr.avg(lvl, q.index);
    for (int c = 0; c < (1 << g.d); ++c) {
        Cube ch = child_cube(q, c, g.d);
        h.delta[std::size_t(c)] = pyr.avg(lvl - 1, ch.index) - qa;
    }
    return h;
}

HaarDifference haar_difference(const GridFunction& f, const Cube& q) {
    AveragePyramid pyr(f);
    return haar_difference(pyr, f.geometry(), q);
}

GridFunction HaarDifference::to_function(const GridGeometry& g) const {
    GridFunction out(g);
    for (int c = 0; c < (1 << d); ++c) {
        Cube ch = child_cube(cube, c, d);
        std::int64_t side = cube_cells_per_axis(g, ch);
        std::int64_t n = g.cells_per_axis();
        double v = delta[std::size_t(c)];
        if (g.d == 1) {
            for (std::int64_t i = ch.index[0] * side; i < (ch.index[0] + 1) * side; ++i) out[std::size_t(i)] = v;
        } else if (g.d == 2) {
            for (std::int64_t i = 0; i < side; ++i)
                for (std::int64_t j = 0; j < side; ++j)
                    out[std::size_t((ch.index[0] * side + i) * n + ch.index[1] * side + j)] = v;
        } else {
            for (std::int64_t i = 0; i < side; ++i)
                for (std::int64_t j = 0; j < side; ++j)
                    for (std::int64_t k = 0; k < side; ++k)
                        out[std::size_t(((ch.index[0] * side + i) * n + ch.index[1] * side + j) * n +
                                        ch.index[2] * side + k)] = v;
        }
    }
    return out;
}

double HaarDifference::l2_sq(const GridGeometry& g) const {
    double child_measure = std::pow(cube_side(cube) / 2.0, g.d);
    double s = 0.0;
    for (int c = 0; c < (1 << d); ++c) s += delta[std::size_t(c)] * delta[std::size_t(c)];
    return s * child_measure;
}

namespace {

// Shared walk for projections and martingale transforms: the value of
// sum_Q eps(Q) Delta_Q f at a cell is the telescoped sum over its ancestor
// chain of eps * (child average - parent average).
GridFunction transform_impl(const GridFunction& f, const std::function<double(const Cube&)>& eps) {
    const GridGeometry& g = f.geometry();
    AveragePyramid pyr(f);
    int L = g.levels();
    std::int64_t n = g.cells_per_axis();

    // Coefficient per cube, flattened per level.
    std::vector<std::vector<double>> coeff(std::size_t(L) + 1);
    for (int lvl = 1; lvl <= L; ++lvl) {
        std::int64_t m = n >> lvl;
        std::int64_t count = 1;
        for (int a = 0; a < g.d; ++a) count *= m;
        coeff[std::size_t(lvl)].resize(std::size_t(count));
        std::int64_t flat = 0;
        Cube q;
        q.scale = g.scale_min + lvl;
        IndexVec idx{};
        for (flat = 0; flat < count; ++flat) {
            std::int64_t rem = flat;
            for (int a = g.d - 1; a >= 0; --a) {
                idx[std::size_t(a)] = rem % m;
                rem /= m;
            }
            q.index = idx;
            coeff[std::size_t(lvl)][std::size_t(flat)] = eps(q);
        }
    }

    GridFunction out(g);
    std::int64_t cells = g.cell_count();
    IndexVec idx{};
    for (std::int64_t flat = 0; flat < cells; ++flat) {
        std::int64_t rem = flat;
        for (int a = g.d - 1; a >= 0; --a) {
            idx[std::size_t(a)] = rem % n;
            rem /= n;
        }
        double acc = 0.0;
        IndexVec cur = idx;
        double below = pyr.avg(0, cur);  // cell value
        for (int lvl = 1; lvl <= L; ++lvl) {
            IndexVec up = cur;
            for (int a = 0; a < g.d; ++a) up[std::size_t(a)] >>= 1;
            double here = pyr.avg(lvl, up);
            std::int64_t m = n >> lvl;
            std::int64_t cflat = 0;
            for (int a = 0; a < g.d; ++a) cflat = cflat * m + up[std::size_t(a)];
            double e = coeff[std::size_t(lvl)][std::size_t(cflat)];
            if (e != 0.0) acc += e * (below - here);
            below = here;
            cur = up;
        }
        out[std::size_t(flat)] = acc;
    }
    return out;
}

} // namespace

GridFunction project(const GridFunction& f, const std::function<bool(const Cube&)>& pred) {
    return transform_impl(f, [&](const Cube& q) { return pred(q) ? 1.0 : 0.0; });
}

GridFunction martingale_transform(const GridFunction& f, const std::function<double(const Cube&)>& eps) {
    return transform_impl(f, eps);
}

GridFunction level_difference(const AveragePyramid& pyr, const GridGeometry& g, int scale) {
    if (scale <= g.scale_min || scale > g.scale_max)
        throw std::invalid_argument("level difference needs scale in (scale_min, scale_max]");
    int lvl = scale - g.scale_min;
    std::int64_t n = g.cells_per_axis();
    GridFunction out{g};
    IndexVec idx{};
    std::int64_t cells = g.cell_count();
    for (std::int64_t flat = 0; flat < cells; ++flat) {
        std::int64_t rem = flat;
        for (int a = g.d - 1; a >= 0; --a) {
            idx[std::size_t(a)] = rem % n;
            rem /= n;
        }
        IndexVec fine = idx, coarse = idx;
        for (int a = 0; a < g.d; ++a) {
            fine[std::size_t(a)] >>= (lvl - 1);
            coarse[std::size_t(a)] >>= lvl;
        }
        out[std::size_t(flat)] = pyr.avg(lvl - 1, fine) - pyr.avg(lvl, coarse);
    }
    return out;
}

GridFunction level_difference(const GridFunction& f, int scale) {
    AveragePyramid pyr(f);
    return level_difference(pyr, f.geometry(), scale);
}

GridFunction conditional_expectation(const GridFunction& phi, const Cube& s,
                                     const std::vector<Cube>& family) {
    const GridGeometry& g = phi.geometry();
    check_window_cube(g, s);
    for (const Cube& q : family) {
        if (!cube_contains(s, q)) throw std::invalid_argument("family member outside S");
        check_window_cube(g, q);
    }
    for (std::size_t i = 0; i < family.size(); ++i)
        for (std::size_t j = i + 1; j < family.size(); ++j)
            if (cube_contains(family[i], family[j]) || cube_contains(family[j], family[i]))
                throw std::invalid_argument("family members overlap");

    GridFunction out(g);
    // phi restricted to S
    std::int64_t side = cube_cells_per_axis(g, s);
    std::int64_t n = g.cells_per_axis();
    auto for_cube_cells = [&](const Cube& q, auto&& fn) {
        std::int64_t cs = cube_cells_per_axis(g, q);
        if (g.d == 1) {
            for (std::int64_t i = q.index[0] * cs; i < (q.index[0] + 1) * cs; ++i) fn(std::size_t(i));
        } else if (g.d == 2) {
            for (std::int64_t i = 0; i < cs; ++i)
                for (std::int64_t j = 0; j < cs; ++j)
                    fn(std::size_t((q.index[0] * cs + i) * n + q.index[1] * cs + j));
        } else {
            for (std::int64_t i = 0; i < cs; ++i)
                for (std::int64_t j = 0; j < cs; ++j)
                    for (std::int64_t k = 0; k < cs; ++k)
                        fn(std::size_t(((q.index[0] * cs + i) * n + q.index[1] * cs + j) * n + q.index[2] * cs + k));
        }
    };
    (void)side;
    for_cube_cells(s, [&](std::size_t i) { out[i] = phi[i]; });
    for (const Cube& q : family) {
        double a = average(phi, q);
        for_cube_cells(q, [&](std::size_t i) { out[i] = a; });
    }
    return out;
}

GridFunction maximal_function(const GridFunction& f) {
    const GridGeometry& g = f.geometry();
    AveragePyramid pyr(f.abs());
    int L = g.levels();
    std::int64_t n = g.cells_per_axis();
    GridFunction out(g);
    IndexVec idx{};
    std::int64_t cells = g.cell_count();
    for (std::int64_t flat = 0; flat < cells; ++flat) {
        std::int64_t rem = flat;
        for (int a = g.d - 1; a >= 0; --a) {
            idx[std::size_t(a)] = rem % n;
            rem /= n;
        }
        IndexVec cur = idx;
        double best = pyr.avg(0, cur);
        for (int lvl = 1; lvl <= L; ++lvl) {
            for (int a = 0; a < g.d; ++a) cur[std::size_t(a)] >>= 1;
            best = std::max(best, pyr.avg(lvl, cur));
        }
        out[std::size_t(flat)] = best;
    }
    return out;
}

GridFunction CZDecomposition::bad_part() const {
    GridFunction b = good;  // reuse geometry
    b *= 0.0;
    for (const auto& atom : atoms) b += atom;
    return b;
}

double CZDecomposition::bad_measure(const GridGeometry& g) const {
    double m = 0.0;
    for (const Cube& b : bad_cubes) m += cube_measure(g, b);
    return m;
}

CZDecomposition cz_decompose(const GridFunction& f, double height) {
    if (!(height > 0.0)) throw std::invalid_argument("height must be positive");
    const GridGeometry& g = f.geometry();
    AveragePyramid pyr(f.abs());
    AveragePyramid signed_pyr(f);

    CZDecomposition out;
    out.height = height;
    out.good = f;

    std::vector<Cube> stack;
    Cube window;
    window.scale = g.scale_max;
    if (pyr.avg(g.levels(), window.index) > height) {
        out.degenerate = true;
        out.bad_cubes.push_back(window);
    } else {
        stack.push_back(window);
        while (!stack.empty()) {
            Cube q = stack.back();
            stack.pop_back();
            if (q.scale == g.scale_min) continue;
            for (int c = 0; c < (1 << g.d); ++c) {
                Cube ch = child_cube(q, c, g.d);
                if (pyr.avg(ch.scale - g.scale_min, ch.index) > height)
                    out.bad_cubes.push_back(ch);
                else
                    stack.push_back(ch);
            }
        }
    }

    std::int64_t n = g.cells_per_axis();
    auto for_cube_cells = [&](const Cube& q, auto&& fn) {
        std::int64_t cs = cube_cells_per_axis(g, q);
        if (g.d == 1) {
            for (std::int64_t i = q.index[0] * cs; i < (q.index[0] + 1) * cs; ++i) fn(std::size_t(i));
        } else if (g.d == 2) {
            for (std::int64_t i = 0; i < cs; ++i)
                for (std::int64_t j = 0; j < cs; ++j)
                    fn(std::size_t((q.index[0] * cs + i) * n + q.index[1] * cs + j));
        } else {
            for (std::int64_t i = 0; i < cs; ++i)
                for (std::int64_t j = 0; j < cs; ++j)
                    for (std::int64_t k = 0; k < cs; ++k)
                        fn(std::size_t(((q.index[0] * cs + i) * n + q.index[1] * cs + j) * n + q.index[2] * cs + k));
        }
    };

    for (const Cube& b : out.bad_cubes) {
        double mean = signed_pyr.avg(b.scale - g.scale_min, b.index);
        GridFunction atom(g);
        for_cube_cells(b, [&](std::size_t i) {
            atom[i] = f[i] - mean;
            out.good[i] = mean;
        });
        out.atoms.push_back(std::move(atom));
    }
    return out;
}

GridFunction random_test_function(const GridGeometry& g, std::uint64_t seed, std::uint64_t stream,
                                  int gen_scale, bool smooth, bool nonnegative) {
    if (gen_scale < g.scale_min) gen_scale = g.scale_min;
    if (gen_scale > g.scale_max - 2) gen_scale = g.scale_max - 2;
    std::int64_t blocks = std::int64_t(1) << (g.scale_max - gen_scale);
    std::int64_t block_cells = std::int64_t(1) << (gen_scale - g.scale_min);
    std::int64_t lo = blocks / 4, hi = 3 * blocks / 4;  // middle half per axis

    auto rng = make_rng(seed, stream);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);

    std::int64_t bcount = 1;
    for (int a = 0; a < g.d; ++a) bcount *= blocks;
    std::vector<double> draw(std::size_t(bcount), 0.0);
    IndexVec bidx{};
    for (std::int64_t flat = 0; flat < bcount; ++flat) {
        double v = unif(rng);  // consume one draw per block regardless of support
        std::int64_t rem = flat;
        bool inside = true;
        for (int a = g.d - 1; a >= 0; --a) {
            bidx[std::size_t(a)] = rem % blocks;
            rem /= blocks;
        }
        for (int a = 0; a < g.d; ++a)
            if (bidx[std::size_t(a)] < lo || bidx[std::size_t(a)] >= hi) inside = false;
        draw[std::size_t(flat)] = inside ? (nonnegative ? std::fabs(v) : v) : 0.0;
    }

    if (smooth) {
        std::vector<double> sm(draw.size());
        if (g.d == 1) {
            for (std::int64_t i = 0; i < blocks; ++i) {
                double s = 0.0;
                int c = 0;
                for (std::int64_t di = -1; di <= 1; ++di) {
                    std::int64_t i2 = i + di;
                    if (i2 < 0 || i2 >= blocks) continue;
                    s += draw[std::size_t(i2)];
                    ++c;
                }
                sm[std::size_t(i)] = s / double(c);
            }
        } else {
            for (std::int64_t i = 0; i < blocks; ++i)
                for (std::int64_t j = 0; j < blocks; ++j) {
                    double s = 0.0;
                    int c = 0;
                    for (std::int64_t di = -1; di <= 1; ++di)
                        for (std::int64_t dj = -1; dj <= 1; ++dj) {
                            std::int64_t i2 = i + di, j2 = j + dj;
                            if (i2 < 0 || i2 >= blocks || j2 < 0 || j2 >= blocks) continue;
                            s += draw[std::size_t(i2 * blocks + j2)];
                            ++c;
                        }
                    sm[std::size_t(i * blocks + j)] = s / double(c);
                }
        }
        draw.swap(sm);
    }

    GridFunction out(g);
    std::int64_t n = g.cells_per_axis();
    IndexVec idx{};
    for (std::int64_t flat = 0; flat < g.cell_count(); ++flat) {
        std::int64_t rem = flat;
        for (int a = g.d - 1; a >= 0; --a) {
            idx[std::size_t(a)] = rem % n;
            rem /= n;
        }
        std::int64_t bflat = 0;
        for (int a = 0; a < g.d; ++a) bflat = bflat * blocks + idx[std::size_t(a)] / block_cells;
        out[std::size_t(flat)] = draw[std::size_t(bflat)];
    }
    return out;
}

SummedTable::SummedTable(const GridFunction& f, bool absolute) {
    const GridGeometry& g = f.geometry();
    d_ = g.d;
    n_ = g.cells_per_axis();
    if (d_ == 1) {
        table_.assign(std::size_t(n_ + 1), 0.0);
        for (std::int64_t i = 0; i < n_; ++i) {
            double v = f[std::size_t(i)];
            table_[std::size_t(i + 1)] = table_[std::size_t(i)] + (absolute ? std::fabs(v) : v);
        }
    } else if (d_ == 2) {
        table_.assign(std::size_t((n_ + 1) * (n_ + 1)), 0.0);
        for (std::int64_t i = 0; i < n_; ++i)
            for (std::int64_t j = 0; j < n_; ++j) {
                double v = f[std::size_t(i * n_ + j)];
                if (absolute) v = std::fabs(v);
                table_[std::size_t((i + 1) * (n_ + 1) + (j + 1))] =
                    v + table_[std::size_t(i * (n_ + 1) + (j + 1))] +
                    table_[std::size_t((i + 1) * (n_ + 1) + j)] - table_[std::size_t(i * (n_ + 1) + j)];
            }
    } else {
        throw std::invalid_argument("summed tables support d <= 2");
    }
}

double SummedTable::box_sum(const IndexVec& lo, const IndexVec& hi) const {
    auto clip = [&](std::int64_t v) { return std::clamp<std::int64_t>(v, 0, n_); };
    if (d_ == 1) {
        std::int64_t a = clip(lo[0]), b = clip(hi[0]);
        if (b <= a) return 0.0;
        return table_[std::size_t(b)] - table_[std::size_t(a)];
    }
    std::int64_t a0 = clip(lo[0]), b0 = clip(hi[0]);
    std::int64_t a1 = clip(lo[1]), b1 = clip(hi[1]);
    if (b0 <= a0 || b1 <= a1) return 0.0;
    const std::int64_t w = n_ + 1;
    return table_[std::size_t(b0 * w + b1)] - table_[std::size_t(a0 * w + b1)] -
           table_[std::size_t(b0 * w + a1)] + table_[std::size_t(a0 * w + a1)];
}

} // namespace czsparse
