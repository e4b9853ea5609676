#pragma once

#include <chrono>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "../core/problem.hpp"
#include "../core/spatial_mesh.hpp"
#include "../core/time_partition.hpp"
#include "../interp/lagrange.hpp"
#include "../parallel.hpp"
#include "../quad/atom_grid.hpp"
#include "config.hpp"

namespace jbsde {

struct PicardResult {
    double y;
    int iterations;
};

struct PicardError : std::runtime_error {
    double last_residual;
    int iterations;

    PicardError(double residual, int iters)
        : std::runtime_error("Picard iteration did not converge after " + std::to_string(iters)
                             + " iterations, last residual " + std::to_string(residual)),
          last_residual(residual), iterations(iters)
    {
    }
};

struct StepError : std::runtime_error {
    int level;
    std::size_t index;
    double last_residual;

    StepError(int level_, std::size_t index_, double residual, const std::string& what_)
        : std::runtime_error("backward step failed at level " + std::to_string(level_)
                             + ", point " + std::to_string(index_) + ": " + what_),
          level(level_), index(index_), last_residual(residual)
    {
    }
};

// Fixed-point solve of y = rhs_fixed + (dt/2) f(y). The residual test is
// scaled by the iterate magnitude so convergence is meaningful for layers
// whose padded-mesh values grow large.
template <class F>
PicardResult picard_solve_y(double rhs_fixed, F&& f_of_y, double dt, double tol, int max_iters,
                            double initial_guess = std::numeric_limits<double>::quiet_NaN())
{
    double y = std::isnan(initial_guess) ? rhs_fixed : initial_guess;
    double residual = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= max_iters; ++k) {
        const double next = rhs_fixed + 0.5 * dt * f_of_y(y);
        residual = std::abs(next - y);
        y = next;
        if (residual <= tol * (1.0 + std::abs(y))) return {y, k};
    }
    throw PicardError(residual, max_iters);
}

// Terminal layer at t = T: Y from the terminal condition, Z from its
// derivative (analytic when supplied, central differences with step dx
// otherwise) scaled by the diffusion, Gamma by jump-size quadrature of the
// terminal increment integral.
inline SolutionLayer terminal_layer(const FBSDEProblem& problem, const SpatialMesh& mesh,
                                    int n_gl = 8, int level = 0)
{
    if (!problem.phi) throw std::invalid_argument("terminal_layer: problem has no terminal condition");
    const FiniteActivityLevyMeasure& nu = problem.measure;
    const QuadratureRule1D& gl = cached_gauss_legendre(n_gl, nu.e_min, nu.e_max);
    const double T = problem.T;

    SolutionLayer layer;
    layer.level = level;
    const std::size_t n = mesh.size();
    layer.y.resize(n);
    layer.z.resize(n);
    layer.gamma.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = mesh.points[i];
        const double phi_x = problem.phi(x);
        layer.y[i] = phi_x;

        double dphi;
        if (problem.phi_prime) {
            dphi = problem.phi_prime(x);
        } else {
            dphi = (problem.phi(x + mesh.dx) - problem.phi(x - mesh.dx)) / (2.0 * mesh.dx);
        }
        layer.z[i] = problem.sigma(T, x) * dphi;

        double g = 0.0;
        for (std::size_t j = 0; j < gl.size(); ++j) {
            const double e = gl.nodes[j];
            g += gl.weights[j] * nu.rho(e) * nu.eta(e)
                 * (problem.phi(x + problem.c(T, x, e)) - phi_x);
        }
        layer.gamma[i] = nu.lambda * g;
    }
    return layer;
}

// One backward time step of the half-weighted scheme. Per mesh point the
// one-step atom grid at truncation M_y carries all expectations; generator
// terms reuse the branch prefix up to M_f. The step is
//   Z^n = (2/dt) (E_y[Yhat dW~] + dt E_f[fhat dW~])
//   G^n = (2/dt) (E_y[Yhat dmu~*] + dt E_f[fhat dmu~*])
//   Y^n = E_y[Yhat] + (dt/2) f(t_n, x, Y^n, Z^n, G^n) + (dt/2) E_f[fhat]
// with Y^n solved by Picard iteration and fhat evaluated at atom images
// through the next layer's (y, z, gamma) interpolants.
inline SolutionLayer backward_step(const FBSDEProblem& problem, const SpatialMesh& mesh,
                                   const SolverConfig& cfg, const SolutionLayer& next,
                                   double t_n, double dt, int* max_picard_out = nullptr)
{
    cfg.validate();
    const std::size_t n = mesh.size();
    if (next.y.size() != n || next.z.size() != n || next.gamma.size() != n)
        throw std::invalid_argument("backward_step: next layer size does not match mesh");
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw std::invalid_argument("backward_step: dt must be positive and finite");

    const double t_next = t_n + dt;
    const int level = next.level - 1;

    std::function<double(double)> ext_y, ext_z, ext_g;
    if (cfg.boundary == Boundary::analytic) {
        if (!problem.has_exact())
            throw std::logic_error("backward_step: analytic boundary needs an exact solution");
        const ExactSolution& ex = problem.exact;
        ext_y = [&ex, t_next](double x) { return ex.y(t_next, x); };
        ext_z = [&ex, t_next](double x) { return ex.z(t_next, x); };
        ext_g = [&ex, t_next](double x) { return ex.gamma(t_next, x); };
    }
    const PiecewiseLagrangeInterpolant iy(mesh, next.y, cfg.degree, ext_y);
    const PiecewiseLagrangeInterpolant iz(mesh, next.z, cfg.degree, ext_z);
    const PiecewiseLagrangeInterpolant ig(mesh, next.gamma, cfg.degree, ext_g);

    const FiniteActivityLevyMeasure& nu = problem.measure;
    const QuadratureRule1D& gh = cached_gauss_hermite_normal(cfg.n_gh);
    const QuadratureRule1D& gl = cached_gauss_legendre(cfg.n_gl, nu.e_min, nu.e_max);
    const double comp = 0.5 * nu.lambda * dt * nu.int_eta_rho;
    const double root_dt = std::sqrt(dt);

    SolutionLayer out;
    out.level = level;
    out.y.resize(n);
    out.z.resize(n);
    out.gamma.resize(n);

    const int workers = resolve_workers(cfg.workers);
    std::vector<int> block_picard(static_cast<std::size_t>(workers), 0);

    parallel_for_blocks(n, workers, [&](std::size_t begin, std::size_t end, int block) {
        AtomGrid grid;
        int picard_max = 0;
        for (std::size_t i = begin; i < end; ++i) {
            const double x_i = mesh.points[i];
            build_atom_grid_into(grid, problem, t_n, dt, x_i, cfg.M_y, gh, gl);
            const std::size_t f_end = grid.branch_begin[static_cast<std::size_t>(cfg.M_f) + 1];

            WeightedSums ys, fs;
            for (std::size_t a = 0; a < grid.atoms.size(); ++a) {
                const Atom& atom = grid.atoms[a];
                const double yhat = iy(atom.x);
                const double wy = atom.w * yhat;
                ys.plain += wy;
                ys.xi += wy * atom.xi;
                ys.eta += wy * atom.s_eta;
                if (a < f_end) {
                    const double fhat =
                        problem.f(t_next, atom.x, yhat, iz(atom.x), ig(atom.x));
                    const double wf = atom.w * fhat;
                    fs.plain += wf;
                    fs.xi += wf * atom.xi;
                    fs.eta += wf * atom.s_eta;
                }
            }

            const double z_i = (ys.xi + dt * fs.xi) / root_dt;
            const double g_i = (2.0 / dt)
                * ((0.5 * ys.eta - comp * ys.plain) + dt * (0.5 * fs.eta - comp * fs.plain));
            const double rhs = ys.plain + 0.5 * dt * fs.plain;

            PicardResult pr;
            try {
                pr = picard_solve_y(
                    rhs, [&](double y) { return problem.f(t_n, x_i, y, z_i, g_i); }, dt,
                    cfg.picard_tol, cfg.picard_max_iters, ys.plain);
            } catch (const PicardError& e) {
                throw StepError(level, i, e.last_residual, e.what());
            }
            if (pr.iterations > picard_max) picard_max = pr.iterations;

            if (!std::isfinite(pr.y) || !std::isfinite(z_i) || !std::isfinite(g_i))
                throw StepError(level, i, std::numeric_limits<double>::quiet_NaN(),
                                "non-finite solution value");
            out.y[i] = pr.y;
            out.z[i] = z_i;
            out.gamma[i] = g_i;
        }
        block_picard[static_cast<std::size_t>(block)] = picard_max;
    });

    if (max_picard_out) {
        int m = *max_picard_out;
        for (int v : block_picard) m = std::max(m, v);
        *max_picard_out = m;
    }
    return out;
}

struct SolveDiagnostics {
    int max_picard_iterations = 0;
    std::size_t atoms_per_point_y = 0;
    std::size_t atoms_per_point_f = 0;
    double wall_seconds = 0.0;
};

struct SolveResult {
    SolutionLayer layer0;
    SolveDiagnostics diagnostics;
};

// Marches the scheme from the terminal layer at t = T down to t = 0 and
// returns the level-0 layer.
inline SolveResult solve(const FBSDEProblem& problem, const SpatialMesh& mesh,
                         const TimePartition& partition, const SolverConfig& cfg)
{
    cfg.validate();
    if (std::abs(partition.T - problem.T) > 1e-12 * std::max(1.0, problem.T))
        throw std::invalid_argument("solve: partition horizon does not match the problem");

    const auto t0 = std::chrono::steady_clock::now();
    SolveResult result;

    SolutionLayer layer = terminal_layer(problem, mesh, cfg.n_gl, partition.num_steps);
    for (int level = partition.num_steps - 1; level >= 0; --level) {
        const double t_n = partition.nodes[static_cast<std::size_t>(level)];
        const double dt = partition.nodes[static_cast<std::size_t>(level) + 1] - t_n;
        layer = backward_step(problem, mesh, cfg, layer, t_n, dt,
                              &result.diagnostics.max_picard_iterations);
    }
    result.layer0 = std::move(layer);

    std::size_t tuples = 1;
    std::size_t atoms_y = static_cast<std::size_t>(cfg.n_gh);
    std::size_t atoms_f = atoms_y;
    for (int m = 1; m <= cfg.M_y; ++m) {
        tuples *= static_cast<std::size_t>(cfg.n_gl);
        atoms_y += static_cast<std::size_t>(cfg.n_gh) * tuples;
        if (m <= cfg.M_f) atoms_f = atoms_y;
    }
    result.diagnostics.atoms_per_point_y = atoms_y;
    result.diagnostics.atoms_per_point_f = atoms_f;
    result.diagnostics.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

} // namespace jbsde
