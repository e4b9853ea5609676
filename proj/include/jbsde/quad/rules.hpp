#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>
#include <vector>

namespace jbsde {

enum class MeasureKind { standard_normal, lebesgue_interval };

// Nodes and weights of a one-dimensional Gaussian rule. For the
// standard_normal kind the weights sum to 1 and integrate against the N(0,1)
// density; for the lebesgue_interval kind they sum to b - a.
struct QuadratureRule1D {
    MeasureKind kind = MeasureKind::lebesgue_interval;
    double a = 0.0;
    double b = 0.0;
    std::vector<double> nodes;
    std::vector<double> weights;

    std::size_t size() const { return nodes.size(); }

    template <class F>
    double integrate(F&& f) const
    {
        double s = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i) s += weights[i] * f(nodes[i]);
        return s;
    }
};

namespace detail {

// Gauss-Hermite for weight exp(-x^2), by Newton iteration on the orthonormal
// recurrence. Classic initial guesses; converges in a handful of steps for
// n <= 64 in double precision.
inline void gauss_hermite_physicists(int n, std::vector<double>& x, std::vector<double>& w)
{
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    const double eps = 1e-15;
    const int half = (n + 1) / 2;
    double z = 0.0, pp = 0.0;
    for (int i = 0; i < half; ++i) {
        if (i == 0) {
            z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
        } else if (i == 1) {
            z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
        } else if (i == 2) {
            z = 1.86 * z - 0.86 * x[0];
        } else if (i == 3) {
            z = 1.91 * z - 0.91 * x[1];
        } else {
            z = 2.0 * z - x[i - 2];
        }
        for (int iter = 0; iter < 100; ++iter) {
            double p1 = 0.7511255444649425; // pi^(-1/4)
            double p2 = 0.0;
            for (int j = 1; j <= n; ++j) {
                double p3 = p2;
                p2 = p1;
                p1 = z * std::sqrt(2.0 / j) * p2 - std::sqrt((j - 1.0) / j) * p3;
            }
            pp = std::sqrt(2.0 * n) * p2;
            double dz = p1 / pp;
            z -= dz;
            if (std::abs(dz) <= eps * std::max(1.0, std::abs(z))) break;
        }
        x[i] = z;
        w[i] = 2.0 / (pp * pp);
    }
    // mirror the halves so symmetry holds exactly
    for (int i = 0; i < half; ++i) {
        x[n - 1 - i] = x[i];
        x[i] = -x[i];
        w[n - 1 - i] = w[i];
    }
    if (n % 2 == 1) x[half - 1] = 0.0;
}

// Gauss-Legendre on [-1, 1], Newton iteration on the Legendre recurrence.
inline void gauss_legendre_unit(int n, std::vector<double>& x, std::vector<double>& w)
{
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    const double eps = 1e-15;
    const int half = (n + 1) / 2;
    const double pi = 3.141592653589793238462643383279502884;
    for (int i = 0; i < half; ++i) {
        double z = std::cos(pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 1; j <= n; ++j) {
                double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0);
            double dz = p1 / pp;
            z -= dz;
            if (std::abs(dz) <= eps) break;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        double wi = 2.0 / ((1.0 - z * z) * pp * pp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if (n % 2 == 1) x[half - 1] = 0.0;
}

} // namespace detail

// Rule exact for polynomials of degree <= 2n-1 against the standard normal
// density: nodes are sqrt(2) times the exp(-x^2) abscissas, weights are
// normalized to sum to 1.
inline QuadratureRule1D gauss_hermite_normal(int n)
{
    if (n < 1 || n > 64) throw std::invalid_argument("gauss_hermite_normal: n must be in [1, 64]");
    QuadratureRule1D r;
    r.kind = MeasureKind::standard_normal;
    std::vector<double> x, w;
    detail::gauss_hermite_physicists(n, x, w);
    const double sqrt2 = std::sqrt(2.0);
    const double inv_sqrt_pi = 0.5641895835477563; // pi^(-1/2)
    r.nodes.resize(n);
    r.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        r.nodes[i] = sqrt2 * x[i];
        r.weights[i] = w[i] * inv_sqrt_pi;
    }
    return r;
}

// Rule exact for polynomials of degree <= 2n-1 on [a, b] with Lebesgue weight.
inline QuadratureRule1D gauss_legendre(int n, double a, double b)
{
    if (n < 1 || n > 64) throw std::invalid_argument("gauss_legendre: n must be in [1, 64]");
    if (!(a < b)) throw std::invalid_argument("gauss_legendre: need a < b");
    QuadratureRule1D r;
    r.kind = MeasureKind::lebesgue_interval;
    r.a = a;
    r.b = b;
    std::vector<double> x, w;
    detail::gauss_legendre_unit(n, x, w);
    const double mid = 0.5 * (a + b);
    const double hw = 0.5 * (b - a);
    r.nodes.resize(n);
    r.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        r.nodes[i] = mid + hw * x[i];
        r.weights[i] = hw * w[i];
    }
    return r;
}

// Process-wide node/weight tables. Rule geometry depends only on the key, so
// repeated grid builds share one immutable table per configuration.
inline const QuadratureRule1D& cached_gauss_hermite_normal(int n)
{
    static std::mutex mu;
    static std::map<int, QuadratureRule1D> table;
    std::lock_guard<std::mutex> lock(mu);
    auto it = table.find(n);
    if (it == table.end()) it = table.emplace(n, gauss_hermite_normal(n)).first;
    return it->second;
}

inline const QuadratureRule1D& cached_gauss_legendre(int n, double a, double b)
{
    static std::mutex mu;
    static std::map<std::tuple<int, double, double>, QuadratureRule1D> table;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_tuple(n, a, b);
    auto it = table.find(key);
    if (it == table.end()) it = table.emplace(key, gauss_legendre(n, a, b)).first;
    return it->second;
}

} // namespace jbsde
