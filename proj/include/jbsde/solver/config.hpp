#pragma once

#include <cmath>
#include <stdexcept>

#include "../core/problem.hpp"

namespace jbsde {

// Out-of-mesh policy for the layer interpolants: extrapolate with the nearest
// stencil, or evaluate the problem's exact solution (manufactured-solution
// studies only).
enum class Boundary { extrapolate, analytic };

struct SolverConfig {
    int M_y = 2;
    int M_f = 1;
    int n_gh = 8;
    int n_gl = 8;
    int degree = 3;
    double picard_tol = 1e-12;
    int picard_max_iters = 50;
    Boundary boundary = Boundary::extrapolate;

    // Mesh padding beyond the interest region; negative means derive it from
    // the run's coefficient bounds, see default_padding.
    double pad = -1.0;

    // Worker threads for the per-point loop; 0 means hardware concurrency.
    int workers = 0;

    void validate() const
    {
        if (M_y < 0) throw std::invalid_argument("config: M_y must be >= 0");
        if (M_f < 0 || M_f > M_y)
            throw std::invalid_argument("config: M_f must satisfy 0 <= M_f <= M_y");
        if (n_gh < 1 || n_gh > 64 || n_gl < 1 || n_gl > 64)
            throw std::invalid_argument("config: rule sizes must lie in [1, 64]");
        if (degree < 1 || degree > 3)
            throw std::invalid_argument("config: degree must be 1, 2 or 3");
        if (!(picard_tol > 0.0) || !std::isfinite(picard_tol))
            throw std::invalid_argument("config: picard_tol must be positive");
        if (picard_max_iters < 1)
            throw std::invalid_argument("config: picard_max_iters must be >= 1");
        if (pad >= 0.0 && !std::isfinite(pad))
            throw std::invalid_argument("config: pad must be finite");
        if (workers < 0) throw std::invalid_argument("config: workers must be >= 0");
    }
};

// Default mesh padding: wide enough that one-step quadrature atoms rooted in
// the interest region stay inside well-resolved mesh over the whole horizon.
// Drift can carry a point T sup|b|, diffusion six standard deviations, and a
// high-probability jump count (mean plus three standard deviations, rounded
// up) each displaces by at most sup|c| per retained jump.
//
// The suprema are taken on a sampling grid over [0, T] x [a-1, b+1] and the
// jump support, so they are bounds for the sampled problems rather than true
// suprema of arbitrary coefficients.
inline double default_padding(const FBSDEProblem& problem, double a, double b, int M_y)
{
    if (!(b > a)) throw std::invalid_argument("default_padding: empty interest region");
    if (M_y < 0) throw std::invalid_argument("default_padding: M_y must be >= 0");

    const double T = problem.T;
    const double lo = a - 1.0;
    const double hi = b + 1.0;
    const int nt = 193;
    const int nx = 193;
    const int ne = 65;

    double sup_b = 0.0;
    double sup_sigma = 0.0;
    double sup_c = 0.0;
    const FiniteActivityLevyMeasure& nu = problem.measure;
    for (int it = 0; it < nt; ++it) {
        const double t = T * it / (nt - 1);
        for (int ix = 0; ix < nx; ++ix) {
            const double x = lo + (hi - lo) * ix / (nx - 1);
            sup_b = std::max(sup_b, std::abs(problem.b(t, x)));
            sup_sigma = std::max(sup_sigma, std::abs(problem.sigma(t, x)));
            for (int ie = 0; ie < ne; ++ie) {
                const double e = nu.e_min + (nu.e_max - nu.e_min) * ie / (ne - 1);
                sup_c = std::max(sup_c, std::abs(problem.c(t, x, e)));
            }
        }
    }

    const double lt = nu.lambda * T;
    const double jumps = std::ceil(lt + 3.0 * std::sqrt(lt));
    return T * sup_b + 6.0 * sup_sigma * std::sqrt(T) + M_y * sup_c * jumps;
}

} // namespace jbsde
