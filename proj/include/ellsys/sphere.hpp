#pragma once

#include <functional>
#include <vector>

#include "ellsys/tensor.hpp"

namespace ellsys {

/// Quasi-uniform points on S^{n-1}: Fibonacci spiral for n = 3, a product grid of
/// hyperspherical angles otherwise. Returns roughly `resolution` unit vectors.
std::vector<Vector> sphere_samples(int n, int resolution);

struct NelderMeadResult {
    Vector argmin;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Derivative-free simplex search; stops when every vertex is within `diameter_tol`
/// of the best one.
NelderMeadResult nelder_mead(const std::function<double(const Vector&)>& f, const Vector& start, double step,
                             double diameter_tol = 1e-10, int max_iter = 5000);

struct SphereMinimum {
    double value = 0.0;
    Vector direction;
    int resolution = 0;
    bool refined = false;
};

/// Minimizes objective(a) over unit a: sampling, then Nelder-Mead on the tangent
/// chart a(t) = (a* + B t)/|a* + B t| around the best sample a*. Ties between
/// samples go to the first one encountered.
SphereMinimum minimize_on_sphere(int n, int resolution, const std::function<double(const Vector&)>& objective,
                                 double diameter_tol = 1e-10);

}  // namespace ellsys
