#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>

#include "problem.hpp"
#include "spatial_mesh.hpp"

namespace jbsde {

// Built-in benchmark problems with closed-form solutions. Both use jump sizes
// uniform on [-delta, delta] with unit eta weight, so the intensity is
// 2*delta and the nonlocal term reduces to a plain integral of solution
// differences.
//
// example1: zero drift, unit diffusion, c(t,x,e) = e,
//   exact Y = sin(x+t) + 2, Z = cos(x+t),
//   Gamma = cos(x+t-delta) - cos(x+t+delta) - 2*delta*sin(x+t).
// The generator is chosen so that this triple solves the backward equation.
//
// example2: drift sin(2x+t), diffusion cos(x)+t+2, c(t,x,e) = e,
//   exact Y = (sin t + 2) e^{-x}, Z = -(cos x + t + 2)(sin t + 2) e^{-x},
//   Gamma = (sin t + 2)(e^{-x+delta} - e^{-x-delta} - 2*delta*e^{-x}).
// Substituting the exact fields into the associated integro-differential
// operator fixes the generator's source term; the -cos(t)e^{-x} term below is
// required for consistency with the displayed solution.
inline FBSDEProblem registry_get(std::string_view name, double delta = 1.0, double T = 1.0)
{
    if (!(delta > 0.0)) throw std::invalid_argument("registry_get: delta must be positive");
    if (!(T > 0.0)) throw std::invalid_argument("registry_get: T must be positive");

    FBSDEProblem p;
    p.measure = FiniteActivityLevyMeasure::uniform(delta);
    p.T = T;

    if (name == "example1") {
        p.name = "example1";
        p.b = [](double, double) { return 0.0; };
        p.sigma = [](double, double) { return 1.0; };
        p.c = [](double, double, double e) { return e; };
        p.f = [](double t, double x, double y, double z, double g) {
            const double u = std::sin(x + t) + 2.0;
            return (y - 2.0) * std::exp(y) / (2.0 * std::exp(u)) - z * y / u - g;
        };
        p.phi = [T](double x) { return std::sin(x + T) + 2.0; };
        p.phi_prime = [T](double x) { return std::cos(x + T); };
        p.exact.y = [](double t, double x) { return std::sin(x + t) + 2.0; };
        p.exact.z = [](double t, double x) { return std::cos(x + t); };
        p.exact.gamma = [delta](double t, double x) {
            return std::cos(x + t - delta) - std::cos(x + t + delta) - 2.0 * delta * std::sin(x + t);
        };
        return p;
    }

    if (name == "example2") {
        p.name = "example2";
        p.b = [](double t, double x) { return std::sin(2.0 * x + t); };
        p.sigma = [](double t, double x) { return std::cos(x) + t + 2.0; };
        p.c = [](double, double, double e) { return e; };
        p.f = [](double t, double x, double y, double z, double g) {
            const double s = std::cos(x) + t + 2.0;
            const double ex = std::exp(-x);
            return -std::sin(2.0 * x + t) * y * z / (s * (std::sin(t) + 2.0) * ex)
                   - 0.5 * s * s * y - g - std::cos(t) * ex;
        };
        p.phi = [T](double x) { return (std::sin(T) + 2.0) * std::exp(-x); };
        p.phi_prime = [T](double x) { return -(std::sin(T) + 2.0) * std::exp(-x); };
        p.exact.y = [](double t, double x) { return (std::sin(t) + 2.0) * std::exp(-x); };
        p.exact.z = [](double t, double x) {
            return -(std::cos(x) + t + 2.0) * (std::sin(t) + 2.0) * std::exp(-x);
        };
        p.exact.gamma = [delta](double t, double x) {
            return (std::sin(t) + 2.0)
                   * (std::exp(-x + delta) - std::exp(-x - delta) - 2.0 * delta * std::exp(-x));
        };
        return p;
    }

    throw std::out_of_range("registry_get: unknown problem '" + std::string(name) + "'");
}

// Exact (Y, Z, Gamma) sampled on the mesh at time t.
inline SolutionLayer exact_layer(const FBSDEProblem& problem, const SpatialMesh& mesh, double t)
{
    if (!problem.has_exact())
        throw std::logic_error("exact_layer: problem carries no exact solution");
    SolutionLayer layer;
    layer.level = 0;
    const std::size_t n = mesh.size();
    layer.y.resize(n);
    layer.z.resize(n);
    layer.gamma.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = mesh.points[i];
        layer.y[i] = problem.exact.y(t, x);
        layer.z[i] = problem.exact.z(t, x);
        layer.gamma[i] = problem.exact.gamma(t, x);
    }
    return layer;
}

} // namespace jbsde
