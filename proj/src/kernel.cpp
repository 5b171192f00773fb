#include "czsparse/kernel.hpp"

#include <cmath>
#include <stdexcept>

namespace czsparse {

namespace {

double dist(const double* x, const double* y, int d) {
    double s = 0.0;
    for (int a = 0; a < d; ++a) s += (x[a] - y[a]) * (x[a] - y[a]);
    return std::sqrt(s);
}

} // namespace

KernelSpec hilbert_kernel() {
    KernelSpec k;
    k.name = "hilbert";
    k.d = 1;
    k.eta = 1.0;
    k.kappa = 2.0;  // size constant 1, smoothness constant 2
    k.antisymmetric = true;
    k.eval = [](const double* x, const double* y) { return 1.0 / (x[0] - y[0]); };
    // F''(t) = 1/t up to the two integration signs handled by the caller.
    k.pair_antiderivative = [](double t) {
        if (t == 0.0) return 0.0;
        return t * std::log(std::fabs(t)) - t;
    };
    return k;
}

KernelSpec smoothed_hilbert_kernel(double delta) {
    if (!(delta > 0.0)) throw std::invalid_argument("smoothed kernel needs delta > 0");
    KernelSpec k;
    k.name = "smoothed:" + std::to_string(delta);
    k.d = 1;
    k.eta = 1.0;
    k.kappa = 2.0;
    k.antisymmetric = true;
    k.eval = [delta](const double* x, const double* y) {
        double t = x[0] - y[0];
        return t / (t * t + delta * delta);
    };
    k.pair_antiderivative = [delta](double t) {
        return 0.5 * (t * std::log(t * t + delta * delta) - 2.0 * t + 2.0 * delta * std::atan(t / delta));
    };
    return k;
}

KernelSpec riesz2d_kernel() {
    KernelSpec k;
    k.name = "riesz2d";
    k.d = 2;
    k.eta = 1.0;
    k.kappa = 8.0;
    k.antisymmetric = true;
    k.eval = [](const double* x, const double* y) {
        double dx0 = x[0] - y[0], dx1 = x[1] - y[1];
        double r = std::sqrt(dx0 * dx0 + dx1 * dx1);
        return dx0 / (r * r * r);
    };
    return k;
}

KernelSpec zero_kernel(int d) {
    KernelSpec k;
    k.name = "zero";
    k.d = d;
    k.eta = 1.0;
    k.kappa = 0.0;
    k.antisymmetric = true;
    k.eval = [](const double*, const double*) { return 0.0; };
    k.pair_antiderivative = [](double) { return 0.0; };
    return k;
}

KernelSpec make_kernel(const std::string& spec) {
    if (spec == "hilbert") return hilbert_kernel();
    if (spec == "riesz2d") return riesz2d_kernel();
    if (spec == "zero") return zero_kernel(1);
    if (spec == "zero2d") return zero_kernel(2);
    if (spec.rfind("smoothed:", 0) == 0) {
        double delta = std::stod(spec.substr(9));
        return smoothed_hilbert_kernel(delta);
    }
    throw std::invalid_argument("unknown kernel: " + spec);
}

KernelCertificate certify_kernel(const KernelSpec& k, double domain_radius, int lattice) {
    KernelCertificate cert;
    if (k.is_zero()) {
        cert.pass = true;
        return cert;
    }
    const int d = k.d;
    const int n = lattice;
    const double step = 2.0 * domain_radius / double(n);

    auto point = [&](std::int64_t flat, double* out) {
        for (int a = 0; a < d; ++a) {
            out[a] = -domain_radius + step * (0.5 + double(flat % n));
            flat /= n;
        }
    };

    std::int64_t total = 1;
    for (int a = 0; a < d; ++a) total *= n;

    std::array<double, 3> x{}, y{}, xp{};
    for (std::int64_t i = 0; i < total; ++i) {
        point(i, x.data());
        for (std::int64_t j = 0; j < total; ++j) {
            if (i == j) continue;
            point(j, y.data());
            double r = dist(x.data(), y.data(), d);
            double kv = std::fabs(k.eval(x.data(), y.data()));
            cert.size_constant = std::max(cert.size_constant, kv * std::pow(r, d));
            // A fixed perturbation direction with 2|x-x'| < |x-y|.
            for (double frac : {0.45, 0.2}) {
                for (int a = 0; a < d; ++a) xp[std::size_t(a)] = x[std::size_t(a)];
                xp[0] += frac * 0.999 * r * 0.999;
                double h = dist(x.data(), xp.data(), d);
                if (!(2.0 * h < r) || h == 0.0) continue;
                double diff = std::fabs(k.eval(x.data(), y.data()) - k.eval(xp.data(), y.data()));
                double ratio = diff * std::pow(r, d + k.eta) / std::pow(h, k.eta);
                cert.smooth_constant = std::max(cert.smooth_constant, ratio);
                // and with the roles of x and y reversed
                double diff2 = std::fabs(k.eval(y.data(), x.data()) - k.eval(y.data(), xp.data()));
                double ratio2 = diff2 * std::pow(r, d + k.eta) / std::pow(h, k.eta);
                cert.smooth_constant = std::max(cert.smooth_constant, ratio2);
                cert.triples++;
            }
        }
    }
    cert.pass = cert.certified() <= k.kappa * (1.0 + 1e-9);
    return cert;
}

} // namespace czsparse
