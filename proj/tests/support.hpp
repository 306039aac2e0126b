#pragma once

// Reference computations used by the tests. None of these call into the code under test.

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

namespace support {

/// Smallest singular value of a 2x2 matrix from the closed form of the eigenvalues of M^T M.
inline double sigma_min_2x2(double a, double b, double c, double d) {
    const double s = a * a + b * b + c * c + d * d;
    const double det = a * d - b * c;
    // s^2 - 4 det^2 factored into sums of squares, free of cancellation
    const double disc = std::sqrt(((a - d) * (a - d) + (b + c) * (b + c)) * ((a + d) * (a + d) + (b - c) * (b - c)));
    // sigma_min^2 = (s - disc) / 2 = 2 det^2 / (s + disc), the second form avoids cancellation
    return s > 0.0 ? std::sqrt(2.0) * std::abs(det) / std::sqrt(s + disc) : 0.0;
}

/// min over theta of sigma_min of [[k c, l s], [-m s, v c]] (the generalized Cauchy-Riemann
/// direction matrix), by a fine scan followed by golden-section refinement.
inline double generalized_cr_nu(double k, double l, double m, double v) {
    auto f = [&](double t) { return sigma_min_2x2(k * std::cos(t), l * std::sin(t), -m * std::sin(t), v * std::cos(t)); };
    const int steps = 20000;
    double best = 1e300, arg = 0.0;
    for (int i = 0; i < steps; ++i) {
        const double t = std::numbers::pi * i / steps;
        const double val = f(t);
        if (val < best) {
            best = val;
            arg = t;
        }
    }
    double lo = arg - std::numbers::pi / steps, hi = arg + std::numbers::pi / steps;
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int it = 0; it < 200; ++it) {
        const double a = hi - g * (hi - lo), b = lo + g * (hi - lo);
        if (f(a) < f(b)) hi = b;
        else lo = a;
    }
    return std::min(best, f((lo + hi) / 2.0));
}

/// Naive O(G^2n) DFT with the library's convention c_k = G^{-n} sum u exp(-2 pi i k.x/L), n = 2 or 3.
inline std::vector<std::complex<double>> naive_dft(const std::vector<double>& u, int n, int G) {
    const std::size_t total = static_cast<std::size_t>(std::pow(G, n));
    std::vector<std::complex<double>> c(total);
    auto unpack = [&](std::size_t flat, int* idx) {
        for (int d = n - 1; d >= 0; --d) {
            idx[d] = static_cast<int>(flat % G);
            flat /= G;
        }
    };
    int ki[4], xi[4];
    for (std::size_t k = 0; k < total; ++k) {
        unpack(k, ki);
        std::complex<double> acc = 0.0;
        for (std::size_t x = 0; x < total; ++x) {
            unpack(x, xi);
            double phase = 0.0;
            for (int d = 0; d < n; ++d) phase += static_cast<double>(ki[d]) * xi[d];
            acc += u[x] * std::polar(1.0, -2.0 * std::numbers::pi * phase / G);
        }
        c[k] = acc / static_cast<double>(total);
    }
    return c;
}

}  // namespace support
