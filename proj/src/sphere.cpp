#include "ellsys/sphere.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <numbers>
#include <numeric>

#include "ellsys/errors.hpp"

namespace ellsys {

namespace {

std::vector<Vector> fibonacci_sphere(int count) {
    std::vector<Vector> out;
    out.reserve(static_cast<std::size_t>(count));
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < count; ++i) {
        const double z = 1.0 - (2.0 * i + 1.0) / count;
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double phi = golden * i;
        Vector a(3);
        a << r * std::cos(phi), r * std::sin(phi), z;
        out.push_back(a);
    }
    return out;
}

// phi_1..phi_{n-2} in (0, pi) at midpoints, phi_{n-1} in [0, 2 pi).
std::vector<Vector> angle_grid(int n, int per_angle) {
    const int dims = n - 1;
    std::vector<int> idx(static_cast<std::size_t>(dims), 0);
    std::vector<Vector> out;
    while (true) {
        Vector a(n);
        double sin_prod = 1.0;
        for (int k = 0; k < dims; ++k) {
            const bool last = (k == dims - 1);
            const double phi = last ? 2.0 * std::numbers::pi * idx[static_cast<std::size_t>(k)] / per_angle
                                    : std::numbers::pi * (idx[static_cast<std::size_t>(k)] + 0.5) / per_angle;
            a(k) = sin_prod * std::cos(phi);
            sin_prod *= std::sin(phi);
        }
        a(n - 1) = sin_prod;
        out.push_back(a / a.norm());
        int k = dims - 1;
        while (k >= 0 && ++idx[static_cast<std::size_t>(k)] == per_angle) idx[static_cast<std::size_t>(k--)] = 0;
        if (k < 0) break;
    }
    return out;
}

double simplex_diameter(const std::vector<Vector>& simplex) {
    double d = 0.0;
    for (std::size_t i = 1; i < simplex.size(); ++i) d = std::max(d, (simplex[i] - simplex[0]).norm());
    return d;
}

}  // namespace

std::vector<Vector> sphere_samples(int n, int resolution) {
    if (n < 2) throw DimensionError("sphere sampling needs n >= 2");
    if (resolution < 1) throw DomainError("sphere sampling needs a positive resolution");
    if (n == 3) return fibonacci_sphere(resolution);
    const int per_angle = std::max(
        2, static_cast<int>(std::ceil(std::pow(static_cast<double>(resolution), 1.0 / (n - 1)) - 1e-9)));
    return angle_grid(n, per_angle);
}

NelderMeadResult nelder_mead(const std::function<double(const Vector&)>& f, const Vector& start, double step,
                             double diameter_tol, int max_iter) {
    const auto dim = start.size();
    std::vector<Vector> simplex{start};
    for (Eigen::Index i = 0; i < dim; ++i) {
        Vector v = start;
        v(i) += step;
        simplex.push_back(v);
    }
    std::vector<double> fv(simplex.size());
    for (std::size_t i = 0; i < simplex.size(); ++i) fv[i] = f(simplex[i]);

    std::vector<std::size_t> order(simplex.size());
    auto sort_simplex = [&] {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
        std::vector<Vector> s;
        std::vector<double> v;
        for (auto o : order) {
            s.push_back(simplex[o]);
            v.push_back(fv[o]);
        }
        simplex = std::move(s);
        fv = std::move(v);
    };

    NelderMeadResult result;
    sort_simplex();
    int it = 0;
    for (; it < max_iter; ++it) {
        if (simplex_diameter(simplex) < diameter_tol) {
            result.converged = true;
            break;
        }
        const std::size_t worst = simplex.size() - 1;
        Vector centroid = Vector::Zero(dim);
        for (std::size_t i = 0; i < worst; ++i) centroid += simplex[i];
        centroid /= static_cast<double>(worst);

        const Vector reflected = centroid + (centroid - simplex[worst]);
        const double fr = f(reflected);
        if (fr < fv[0]) {
            const Vector expanded = centroid + 2.0 * (centroid - simplex[worst]);
            const double fe = f(expanded);
            if (fe < fr) {
                simplex[worst] = expanded;
                fv[worst] = fe;
            } else {
                simplex[worst] = reflected;
                fv[worst] = fr;
            }
        } else if (fr < fv[worst - 1]) {
            simplex[worst] = reflected;
            fv[worst] = fr;
        } else {
            const bool outside = fr < fv[worst];
            const Vector contracted = outside ? Vector(centroid + 0.5 * (reflected - centroid))
                                              : Vector(centroid + 0.5 * (simplex[worst] - centroid));
            const double fc = f(contracted);
            if (fc <= (outside ? fr : fv[worst])) {
                simplex[worst] = contracted;
                fv[worst] = fc;
            } else {
                for (std::size_t i = 1; i < simplex.size(); ++i) {
                    simplex[i] = simplex[0] + 0.5 * (simplex[i] - simplex[0]);
                    fv[i] = f(simplex[i]);
                }
            }
        }
        sort_simplex();
    }
    result.argmin = simplex[0];
    result.value = fv[0];
    result.iterations = it;
    return result;
}

SphereMinimum minimize_on_sphere(int n, int resolution, const std::function<double(const Vector&)>& objective,
                                 double diameter_tol) {
    const auto samples = sphere_samples(n, resolution);
    SphereMinimum best;
    best.resolution = static_cast<int>(samples.size());
    best.value = std::numeric_limits<double>::infinity();
    for (const auto& a : samples) {
        const double v = objective(a);
        if (v < best.value) {
            best.value = v;
            best.direction = a;
        }
    }

    // Orthonormal tangent basis at the best sample.
    Matrix frame(n, n);
    frame.col(0) = best.direction;
    frame.rightCols(n - 1) = Matrix::Identity(n, n).leftCols(n - 1);
    Eigen::HouseholderQR<Matrix> qr(frame);
    const Matrix Q = qr.householderQ();
    const Matrix tangent = Q.rightCols(n - 1);
    const Vector anchor = best.direction;
    auto chart = [&](const Vector& t) -> Vector {
        const Vector a = anchor + tangent * t;
        return a / a.norm();
    };

    const double step = 2.0 * std::numbers::pi / std::pow(static_cast<double>(samples.size()), 1.0 / (n - 1));
    const auto nm = nelder_mead([&](const Vector& t) { return objective(chart(t)); }, Vector::Zero(n - 1), step,
                                diameter_tol);
    best.refined = nm.converged;
    if (nm.value < best.value) {
        best.value = nm.value;
        best.direction = chart(nm.argmin);
    }
    return best;
}

}  // namespace ellsys
