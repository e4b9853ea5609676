#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <utility>

#include "../quad/rules.hpp"

namespace jbsde {

// Finite-activity jump measure lambda * rho(e) de with compactly supported
// jump-size density rho and the bounded weight eta that defines the Gamma
// component. The moments of rho are evaluated once at construction; rho must
// integrate to 1 over its support.
struct FiniteActivityLevyMeasure {
    double lambda = 0.0;
    double e_min = 0.0, e_max = 0.0;
    std::function<double(double)> rho;
    std::function<double(double)> eta;
    std::function<double(double)> sample; // quantile transform, u in [0,1] -> jump size
    double int_rho = 0.0;                 // integral of rho over support
    double int_eta_rho = 0.0;             // integral of eta * rho
    double int_eta2_rho = 0.0;            // integral of eta^2 * rho

    FiniteActivityLevyMeasure() = default;

    FiniteActivityLevyMeasure(double intensity, double support_min, double support_max,
                              std::function<double(double)> density,
                              std::function<double(double)> eta_weight,
                              std::function<double(double)> quantile)
        : lambda(intensity), e_min(support_min), e_max(support_max),
          rho(std::move(density)), eta(std::move(eta_weight)), sample(std::move(quantile))
    {
        if (!std::isfinite(lambda) || !(lambda > 0.0))
            throw std::invalid_argument("FiniteActivityLevyMeasure: intensity must be positive and finite");
        if (!(e_min < e_max))
            throw std::invalid_argument("FiniteActivityLevyMeasure: empty jump-size support");
        if (!rho || !eta || !sample)
            throw std::invalid_argument("FiniteActivityLevyMeasure: density, eta and sampler are all required");
        const QuadratureRule1D gl = gauss_legendre(64, e_min, e_max);
        int_rho = gl.integrate([&](double e) { return rho(e); });
        int_eta_rho = gl.integrate([&](double e) { return eta(e) * rho(e); });
        int_eta2_rho = gl.integrate([&](double e) { double v = eta(e); return v * v * rho(e); });
        if (std::abs(int_rho - 1.0) > 1e-12)
            throw std::invalid_argument("FiniteActivityLevyMeasure: rho does not integrate to 1 over its support");
    }

    // Jump sizes uniform on [-delta, delta] with unit eta; intensity 2*delta.
    static FiniteActivityLevyMeasure uniform(double delta)
    {
        if (!(delta > 0.0)) throw std::invalid_argument("FiniteActivityLevyMeasure::uniform: delta must be positive");
        const double density = 0.5 / delta;
        return FiniteActivityLevyMeasure(
            2.0 * delta, -delta, delta,
            [density](double) { return density; },
            [](double) { return 1.0; },
            [delta](double u) { return -delta + 2.0 * delta * u; });
    }
};

} // namespace jbsde
