#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace jbsde {

// Uniform grid x_i = x_0 + i * dx covering a padded extent [A, B] around the
// interest interval [a, b]. Error norms are taken over [a, b] only; the
// padding absorbs the one-step reach of the quadrature atoms so that interior
// points never lean on extrapolated values until errors are negligible.
struct SpatialMesh {
    double dx = 0.0;
    double a = 0.0, b = 0.0; // interest interval
    std::vector<double> points;

    SpatialMesh() = default;

    // Builds the mesh for interest interval [a, b] extended by pad on both
    // sides. The grid covers the full extent: the last point is >= b + pad.
    SpatialMesh(double a_, double b_, double dx_, double pad)
    {
        if (!(b_ > a_)) throw std::invalid_argument("SpatialMesh: need a < b");
        if (!(dx_ > 0.0) || !std::isfinite(dx_)) throw std::invalid_argument("SpatialMesh: dx must be positive");
        if (!(pad >= 0.0) || !std::isfinite(pad)) throw std::invalid_argument("SpatialMesh: pad must be nonnegative");
        dx = dx_;
        a = a_;
        b = b_;
        const double lo = a_ - pad;
        const double hi = b_ + pad;
        const auto intervals = static_cast<std::size_t>(std::ceil((hi - lo) / dx_ - 1e-9));
        points.resize(intervals + 1);
        for (std::size_t i = 0; i <= intervals; ++i)
            points[i] = lo + static_cast<double>(i) * dx_;
    }

    std::size_t size() const { return points.size(); }
    double front() const { return points.front(); } // padded extent A
    double back() const { return points.back(); }   // padded extent B
};

} // namespace jbsde
