#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "../core/spatial_mesh.hpp"

namespace jbsde {

struct InterpolationError : std::runtime_error {
    double location;

    explicit InterpolationError(double where)
        : std::runtime_error("non-finite interpolant value at x = " + std::to_string(where)),
          location(where)
    {
    }
};

namespace detail {

// First index of the p+1 point stencil closest to fractional position s,
// ties toward lower indices, clamped so the stencil stays on the mesh.
inline int stencil_start(int n, double s, int p)
{
    int j = static_cast<int>(std::ceil(s - 0.5 * p - 0.5));
    if (j < 0) j = 0;
    if (j > n - 1 - p) j = n - 1 - p;
    return j;
}

} // namespace detail

// The p+1 contiguous mesh indices whose nodes are closest to x.
inline std::vector<int> stencil(const SpatialMesh& mesh, double x, int p)
{
    const int n = static_cast<int>(mesh.size());
    if (p < 1 || n < p + 1)
        throw std::invalid_argument("stencil: mesh must hold at least degree + 1 points");
    const double s = (x - mesh.front()) / mesh.dx;
    const int j = detail::stencil_start(n, s, p);
    std::vector<int> idx(static_cast<std::size_t>(p) + 1);
    for (int k = 0; k <= p; ++k) idx[static_cast<std::size_t>(k)] = j + k;
    return idx;
}

// Piecewise Lagrange interpolant of a grid function on a uniform mesh,
// degree 1, 2 or 3. Each evaluation uses the stencil of nearest nodes, so the
// result depends on exactly p+1 stored values. Outside the mesh the nearest
// stencil extrapolates unless an analytic extension function is supplied.
//
// Immutable snapshot: mesh geometry and values are copied, evaluation is
// re-entrant.
class PiecewiseLagrangeInterpolant {
public:
    PiecewiseLagrangeInterpolant(const SpatialMesh& mesh, std::vector<double> values, int degree,
                                 std::function<double(double)> extension = {})
        : x0_(mesh.front()), dx_(mesh.dx), n_(static_cast<int>(mesh.size())), degree_(degree),
          values_(std::move(values)), lo_(mesh.front()), hi_(mesh.back()),
          extension_(std::move(extension))
    {
        if (degree_ < 1 || degree_ > 3)
            throw std::invalid_argument("interpolant: degree must be 1, 2 or 3");
        if (static_cast<int>(values_.size()) != n_)
            throw std::invalid_argument("interpolant: values length must match mesh size");
        if (n_ < degree_ + 1)
            throw std::invalid_argument("interpolant: mesh must hold at least degree + 1 points");
    }

    int degree() const { return degree_; }

    double eval(double x) const
    {
        if (extension_ && (x < lo_ || x > hi_)) {
            const double v = extension_(x);
            if (!std::isfinite(v)) throw InterpolationError(x);
            return v;
        }

        const double s = (x - x0_) / dx_;
        const int j = detail::stencil_start(n_, s, degree_);
        const double u = s - j;
        const double* v = values_.data() + j;

        double r;
        switch (degree_) {
        case 1:
            r = v[0] * (u - 1.0) * -1.0 + v[1] * u;
            break;
        case 2: {
            const double a = u, b = u - 1.0, c = u - 2.0;
            r = v[0] * b * c * 0.5 - v[1] * a * c + v[2] * a * b * 0.5;
            break;
        }
        default: {
            const double a = u, b = u - 1.0, c = u - 2.0, d = u - 3.0;
            r = -v[0] * b * c * d * (1.0 / 6.0) + v[1] * a * c * d * 0.5
                - v[2] * a * b * d * 0.5 + v[3] * a * b * c * (1.0 / 6.0);
            break;
        }
        }
        if (!std::isfinite(r)) throw InterpolationError(x);
        return r;
    }

    double operator()(double x) const { return eval(x); }

private:
    double x0_;
    double dx_;
    int n_;
    int degree_;
    std::vector<double> values_;
    double lo_;
    double hi_;
    std::function<double(double)> extension_;
};

} // namespace jbsde
