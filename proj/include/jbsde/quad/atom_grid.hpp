#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "../core/problem.hpp"
#include "rules.hpp"

namespace jbsde {

// One outcome of the one-step Euler map: the image point, its combined
// quadrature weight, the normal node attached to the Brownian increment, and
// the summed eta weight of the jumps realized along the way.
struct Atom {
    double x;
    double w;
    double xi;
    double s_eta;
};

// Tensor quadrature for conditional one-step expectations. Branch m carries
// the mass of exactly m jumps, P_m = e^{-lambda dt} (lambda dt)^m / m!, and
// enumerates jump-size tuples against the Gauss-Legendre rule with the
// Brownian factor against the Gauss-Hermite rule. Branches above the
// truncation M are dropped, so the total weight is P(N <= M), not 1; no
// renormalization is applied.
//
// Branch m occupies atoms[branch_begin[m] .. branch_begin[m+1]). Truncating
// an expectation at M_f <= M is a prefix sum over atoms, which the solver
// relies on to share one grid between the two truncation levels.
struct AtomGrid {
    double t = 0.0;
    double x = 0.0;
    double dt = 0.0;
    int M = 0;
    double lambda_dt = 0.0;
    double poisson_mass = 0.0;
    std::vector<Atom> atoms;
    std::vector<std::size_t> branch_begin;

    // Per-Gauss-Legendre-node tables for the build at (t, x): jump
    // displacement c(t, x, q_j), weight v_j * rho(q_j), and eta(q_j).
    // Kept in the grid so a reused scratch grid rebuilds without allocating.
    std::vector<double> jump_disp;
    std::vector<double> jump_w;
    std::vector<double> jump_eta;
};

// Raised when an integrand evaluates to a non-finite value at some atom.
struct EvaluationError : std::runtime_error {
    std::size_t atom_index;
    double location;

    EvaluationError(std::size_t index, double where)
        : std::runtime_error("non-finite integrand value at atom " + std::to_string(index)
                             + ", location " + std::to_string(where)),
          atom_index(index), location(where)
    {
    }
};

namespace detail {

template <class Emit>
void for_each_jump_tuple(const std::vector<double>& disp, const std::vector<double>& w,
                         const std::vector<double>& eta, int m, int depth, double acc_disp,
                         double acc_w, double acc_eta, Emit&& emit)
{
    if (depth == m) {
        emit(acc_disp, acc_w, acc_eta);
        return;
    }
    for (std::size_t j = 0; j < disp.size(); ++j)
        for_each_jump_tuple(disp, w, eta, m, depth + 1, acc_disp + disp[j], acc_w * w[j],
                            acc_eta + eta[j], emit);
}

} // namespace detail

// Rebuilds grid in place for the origin (t_n, x) and step dt. Vector capacity
// survives across calls, so per-point rebuild in a tight loop is allocation
// free after the first call.
inline void build_atom_grid_into(AtomGrid& grid, const FBSDEProblem& problem, double t_n,
                                 double dt, double x, int M, const QuadratureRule1D& gh,
                                 const QuadratureRule1D& gl)
{
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw std::invalid_argument("build_atom_grid: dt must be positive and finite");
    if (M < 0) throw std::invalid_argument("build_atom_grid: jump truncation must be >= 0");
    if (gh.kind != MeasureKind::standard_normal)
        throw std::invalid_argument("build_atom_grid: first rule must be a normal rule");
    if (gl.kind != MeasureKind::lebesgue_interval)
        throw std::invalid_argument("build_atom_grid: second rule must be an interval rule");

    const FiniteActivityLevyMeasure& nu = problem.measure;
    const std::size_t n_gh = gh.size();
    const std::size_t n_gl = gl.size();

    grid.t = t_n;
    grid.x = x;
    grid.dt = dt;
    grid.M = M;
    grid.lambda_dt = nu.lambda * dt;

    grid.jump_disp.resize(n_gl);
    grid.jump_w.resize(n_gl);
    grid.jump_eta.resize(n_gl);
    for (std::size_t j = 0; j < n_gl; ++j) {
        const double q = gl.nodes[j];
        grid.jump_disp[j] = problem.c(t_n, x, q);
        grid.jump_w[j] = gl.weights[j] * nu.rho(q);
        grid.jump_eta[j] = nu.eta(q);
    }

    std::size_t count = n_gh;
    std::size_t tuples = 1;
    for (int m = 1; m <= M; ++m) {
        tuples *= n_gl;
        count += n_gh * tuples;
    }
    grid.atoms.clear();
    grid.atoms.reserve(count);
    grid.branch_begin.assign(static_cast<std::size_t>(M) + 2, 0);

    const double base = x + problem.b(t_n, x) * dt;
    const double vol = problem.sigma(t_n, x) * std::sqrt(dt);

    double branch_mass = std::exp(-grid.lambda_dt);
    grid.poisson_mass = 0.0;
    for (int m = 0; m <= M; ++m) {
        if (m > 0) branch_mass *= grid.lambda_dt / m;
        grid.branch_begin[m] = grid.atoms.size();
        grid.poisson_mass += branch_mass;
        const double mass = branch_mass;
        detail::for_each_jump_tuple(
            grid.jump_disp, grid.jump_w, grid.jump_eta, m, 0, 0.0, 1.0, 0.0,
            [&](double disp, double jw, double eta_sum) {
                for (std::size_t i = 0; i < n_gh; ++i) {
                    Atom a;
                    a.xi = gh.nodes[i];
                    a.x = base + vol * a.xi + disp;
                    a.w = mass * jw * gh.weights[i];
                    a.s_eta = eta_sum;
                    grid.atoms.push_back(a);
                }
            });
    }
    grid.branch_begin[static_cast<std::size_t>(M) + 1] = grid.atoms.size();
}

inline AtomGrid build_atom_grid(const FBSDEProblem& problem, double t_n, double dt, double x,
                                int M, int n_gh, int n_gl)
{
    const FiniteActivityLevyMeasure& nu = problem.measure;
    AtomGrid grid;
    build_atom_grid_into(grid, problem, t_n, dt, x, M, cached_gauss_hermite_normal(n_gh),
                         cached_gauss_legendre(n_gl, nu.e_min, nu.e_max));
    return grid;
}

// The three weighted sums every backward step needs, taken in one pass:
// plain = sum w V, xi = sum w V xi, eta = sum w V S_eta.
struct WeightedSums {
    double plain = 0.0;
    double xi = 0.0;
    double eta = 0.0;
};

// Accumulates over branches 0..max_branch; max_branch < 0 means all of them.
template <class V>
WeightedSums accumulate_atoms(const AtomGrid& grid, V&& value, int max_branch = -1)
{
    std::size_t end = grid.atoms.size();
    if (max_branch >= 0 && max_branch < grid.M)
        end = grid.branch_begin[static_cast<std::size_t>(max_branch) + 1];

    WeightedSums sums;
    for (std::size_t i = 0; i < end; ++i) {
        const Atom& a = grid.atoms[i];
        const double v = value(a.x);
        if (!std::isfinite(v)) throw EvaluationError(i, a.x);
        const double wv = a.w * v;
        sums.plain += wv;
        sums.xi += wv * a.xi;
        sums.eta += wv * a.s_eta;
    }
    return sums;
}

// Quadrature estimate of E[V(X^{n+1})] given (t_n, x), truncated at M jumps.
template <class V>
double expect_plain(const AtomGrid& grid, V&& value)
{
    return accumulate_atoms(grid, value).plain;
}

// Estimate of E[V(X^{n+1}) dW~]. The increment splits as
// (sqrt(dt)/2)(xi + sqrt(3) xi~) with xi~ independent of the Euler image, so
// the xi~ component integrates to zero and only the xi moment remains.
template <class V>
double expect_brownian_weighted(const AtomGrid& grid, V&& value)
{
    return 0.5 * std::sqrt(grid.dt) * accumulate_atoms(grid, value).xi;
}

// Estimate of E[V(X^{n+1}) dmu~*]. Conditioned on the jump count the jump
// times are i.i.d. uniform over the step and the Euler image ignores them;
// the time weight 2 - 3(tau - t_n)/dt then averages to 1/2 per jump, leaving
// (1/2) sum w V S_eta minus the compensator (lambda dt / 2) int(eta rho) E[V].
template <class V>
double expect_jump_weighted(const AtomGrid& grid, V&& value,
                            const FiniteActivityLevyMeasure& measure)
{
    const WeightedSums sums = accumulate_atoms(grid, value);
    return 0.5 * sums.eta - 0.5 * grid.lambda_dt * measure.int_eta_rho * sums.plain;
}

// Debug evaluators that skip the analytic reductions above and quadrature the
// auxiliary dimensions directly: xi~ against its own normal rule and each
// jump time against a Legendre rule on the unit interval. Slow by design;
// they exist to cross-check the reduced forms on arbitrary inputs.

template <class V>
double expect_brownian_weighted_explicit(const FBSDEProblem& problem, double t_n, double dt,
                                         double x, int M, int n_gh, int n_gl, int n_aux,
                                         V&& value)
{
    const FiniteActivityLevyMeasure& nu = problem.measure;
    const QuadratureRule1D& gh = cached_gauss_hermite_normal(n_gh);
    const QuadratureRule1D& gh_aux = cached_gauss_hermite_normal(n_aux);
    const QuadratureRule1D& gl = cached_gauss_legendre(n_gl, nu.e_min, nu.e_max);

    std::vector<double> disp(gl.size()), jw(gl.size()), eta(gl.size());
    for (std::size_t j = 0; j < gl.size(); ++j) {
        disp[j] = problem.c(t_n, x, gl.nodes[j]);
        jw[j] = gl.weights[j] * nu.rho(gl.nodes[j]);
        eta[j] = nu.eta(gl.nodes[j]);
    }

    const double base = x + problem.b(t_n, x) * dt;
    const double vol = problem.sigma(t_n, x) * std::sqrt(dt);
    const double lambda_dt = nu.lambda * dt;
    const double half_root_dt = 0.5 * std::sqrt(dt);
    const double root3 = std::sqrt(3.0);

    double total = 0.0;
    double branch_mass = std::exp(-lambda_dt);
    for (int m = 0; m <= M; ++m) {
        if (m > 0) branch_mass *= lambda_dt / m;
        const double mass = branch_mass;
        detail::for_each_jump_tuple(disp, jw, eta, m, 0, 0.0, 1.0, 0.0,
                                    [&](double d, double w_tuple, double) {
                                        for (std::size_t i = 0; i < gh.size(); ++i) {
                                            const double v = value(base + vol * gh.nodes[i] + d);
                                            for (std::size_t l = 0; l < gh_aux.size(); ++l) {
                                                const double incr = half_root_dt
                                                    * (gh.nodes[i] + root3 * gh_aux.nodes[l]);
                                                total += mass * w_tuple * gh.weights[i]
                                                         * gh_aux.weights[l] * v * incr;
                                            }
                                        }
                                    });
    }
    return total;
}

namespace detail {

// Tensor integral over m i.i.d. uniform jump times of sum_k (2 - 3 u_k) eta_k
// under the given unit-interval rule.
inline double time_weight_tensor(const QuadratureRule1D& rule, const double* eta_tuple, int m)
{
    if (m == 0) return 0.0;
    double node_mass = 0.0;
    double node_moment = 0.0;
    for (std::size_t j = 0; j < rule.size(); ++j) {
        node_mass += rule.weights[j];
        node_moment += rule.weights[j] * (2.0 - 3.0 * rule.nodes[j]);
    }
    // Expand the tensor sum one jump slot at a time: slot k contributes its
    // own (2 - 3u) moment times the plain mass of every other slot.
    double total = 0.0;
    for (int k = 0; k < m; ++k) {
        double term = eta_tuple[k] * node_moment;
        for (int j = 0; j < m; ++j)
            if (j != k) term *= node_mass;
        total += term;
    }
    return total;
}

template <class Emit>
void for_each_jump_tuple_recording(const std::vector<double>& disp, const std::vector<double>& w,
                                   const std::vector<double>& eta, int m, int depth,
                                   double acc_disp, double acc_w, double* eta_tuple, Emit&& emit)
{
    if (depth == m) {
        emit(acc_disp, acc_w, eta_tuple);
        return;
    }
    for (std::size_t j = 0; j < disp.size(); ++j) {
        eta_tuple[depth] = eta[j];
        for_each_jump_tuple_recording(disp, w, eta, m, depth + 1, acc_disp + disp[j],
                                      acc_w * w[j], eta_tuple, emit);
    }
}

} // namespace detail

template <class V>
double expect_jump_weighted_explicit(const FBSDEProblem& problem, double t_n, double dt, double x,
                                     int M, int n_gh, int n_gl, int n_aux, V&& value)
{
    const FiniteActivityLevyMeasure& nu = problem.measure;
    const QuadratureRule1D& gh = cached_gauss_hermite_normal(n_gh);
    const QuadratureRule1D& gl = cached_gauss_legendre(n_gl, nu.e_min, nu.e_max);
    const QuadratureRule1D& unit = cached_gauss_legendre(n_aux, 0.0, 1.0);

    std::vector<double> disp(gl.size()), jw(gl.size()), eta(gl.size());
    for (std::size_t j = 0; j < gl.size(); ++j) {
        disp[j] = problem.c(t_n, x, gl.nodes[j]);
        jw[j] = gl.weights[j] * nu.rho(gl.nodes[j]);
        eta[j] = nu.eta(gl.nodes[j]);
    }

    // Compensator with its time integral and eta moment both quadratured.
    double time_moment = 0.0;
    for (std::size_t j = 0; j < unit.size(); ++j)
        time_moment += unit.weights[j] * (2.0 - 3.0 * unit.nodes[j]);
    double eta_moment = 0.0;
    for (std::size_t j = 0; j < gl.size(); ++j)
        eta_moment += jw[j] * eta[j];
    const double compensator = nu.lambda * dt * time_moment * eta_moment;

    const double base = x + problem.b(t_n, x) * dt;
    const double vol = problem.sigma(t_n, x) * std::sqrt(dt);
    const double lambda_dt = nu.lambda * dt;

    std::vector<double> eta_tuple(static_cast<std::size_t>(M) + 1, 0.0);
    double jump_part = 0.0;
    double plain_part = 0.0;
    double branch_mass = std::exp(-lambda_dt);
    for (int m = 0; m <= M; ++m) {
        if (m > 0) branch_mass *= lambda_dt / m;
        const double mass = branch_mass;
        detail::for_each_jump_tuple_recording(
            disp, jw, eta, m, 0, 0.0, 1.0, eta_tuple.data(),
            [&](double d, double w_tuple, const double* tuple) {
                double gh_sum = 0.0;
                for (std::size_t i = 0; i < gh.size(); ++i)
                    gh_sum += gh.weights[i] * value(base + vol * gh.nodes[i] + d);
                const double tw = detail::time_weight_tensor(unit, tuple, m);
                jump_part += mass * w_tuple * gh_sum * tw;
                plain_part += mass * w_tuple * gh_sum;
            });
    }
    return jump_part - compensator * plain_part;
}

} // namespace jbsde
