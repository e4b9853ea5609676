#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "../core/problem.hpp"
#include "../parallel.hpp"

namespace jbsde {

enum class WeightKind { plain, brownian, jump };

struct McResult {
    double estimate;
    double std_error;
};

// One simulated step: the Euler image, the averaged Brownian weight dW~, and
// the time-weighted compensated jump weight dmu~*.
struct OneStepSample {
    double x;
    double dw_tilde;
    double dmu_star;
    int jumps;
};

namespace detail {

// splitmix64; each path owns a disjoint block of the counter sequence, so
// sample p is a pure function of (seed, p) regardless of scheduling.
struct SplitMix64 {
    std::uint64_t state;

    std::uint64_t next()
    {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // uniform in the open interval (0, 1)
    double uniform() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }
};

inline std::uint64_t mix64(std::uint64_t z)
{
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline SplitMix64 path_stream(std::uint64_t seed, std::uint64_t path)
{
    // 1024 counter slots per path, far beyond any realistic draw count
    return SplitMix64{mix64(seed) + path * (1024ULL * 0x9E3779B97F4A7C15ULL)};
}

} // namespace detail

// Draws the one-step sample for a given path index. Draw order is fixed:
// the Box-Muller pair (xi, xi~), the jump count, then per jump its size and
// its time fraction. The Euler image uses xi; dW~ = (sqrt(dt)/2)(xi +
// sqrt(3) xi~); dmu~* sums (2 - 3u_k) eta(e_k) minus its compensator.
inline OneStepSample draw_one_step(const FBSDEProblem& problem, double t, double dt, double x,
                                   std::uint64_t path, std::uint64_t seed)
{
    const FiniteActivityLevyMeasure& nu = problem.measure;
    detail::SplitMix64 rng = detail::path_stream(seed, path);

    const double u1 = rng.uniform();
    const double u2 = rng.uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double two_pi = 6.283185307179586476925286766559;
    const double xi = r * std::cos(two_pi * u2);
    const double xi_tilde = r * std::sin(two_pi * u2);

    const double lambda_dt = nu.lambda * dt;
    const double floor_p = std::exp(-lambda_dt);
    int m = 0;
    double p = rng.uniform();
    while (p > floor_p && m < 10000) {
        ++m;
        p *= rng.uniform();
    }

    OneStepSample s;
    s.jumps = m;
    double jump_disp = 0.0;
    double jump_weight = 0.0;
    for (int k = 0; k < m; ++k) {
        const double e = nu.sample(rng.uniform());
        const double u = rng.uniform();
        jump_disp += problem.c(t, x, e);
        jump_weight += (2.0 - 3.0 * u) * nu.eta(e);
    }

    s.x = x + problem.b(t, x) * dt + problem.sigma(t, x) * std::sqrt(dt) * xi + jump_disp;
    s.dw_tilde = 0.5 * std::sqrt(dt) * (xi + std::sqrt(3.0) * xi_tilde);
    s.dmu_star = jump_weight - 0.5 * lambda_dt * nu.int_eta_rho;
    return s;
}

namespace detail {

inline std::array<double, 2> pairwise_reduce(const std::vector<std::array<double, 2>>& parts,
                                             std::size_t lo, std::size_t hi)
{
    if (hi - lo == 1) return parts[lo];
    const std::size_t mid = lo + (hi - lo) / 2;
    const std::array<double, 2> a = pairwise_reduce(parts, lo, mid);
    const std::array<double, 2> b = pairwise_reduce(parts, mid, hi);
    return {a[0] + b[0], a[1] + b[1]};
}

} // namespace detail

// Monte Carlo estimate of E[V(X^{n+1}) w^power] with w one of {1, dW~,
// dmu~*}, together with the standard error of the mean. Paths are summed in
// fixed chunks of 4096 and the chunk sums reduced by a fixed-shape pairwise
// tree, so the result is bit-identical for any worker count.
template <class V>
McResult mc_expectation(const FBSDEProblem& problem, double t, double x, double dt,
                        WeightKind kind, V&& value, std::size_t n_paths, std::uint64_t seed,
                        int weight_power = 1, int workers = 0)
{
    if (n_paths < 1000)
        throw std::invalid_argument("mc_expectation: need at least 1000 paths");
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw std::invalid_argument("mc_expectation: dt must be positive and finite");
    if (weight_power < 0 || weight_power > 8)
        throw std::invalid_argument("mc_expectation: weight_power must lie in [0, 8]");

    constexpr std::size_t chunk = 4096;
    const std::size_t n_chunks = (n_paths + chunk - 1) / chunk;
    std::vector<std::array<double, 2>> parts(n_chunks, {0.0, 0.0});

    parallel_for_blocks(n_chunks, resolve_workers(workers), [&](std::size_t cb, std::size_t ce, int) {
        for (std::size_t c = cb; c < ce; ++c) {
            const std::size_t p_end = std::min(n_paths, (c + 1) * chunk);
            double s = 0.0;
            double ss = 0.0;
            for (std::size_t p = c * chunk; p < p_end; ++p) {
                const OneStepSample smp = draw_one_step(problem, t, dt, x, p, seed);
                double w;
                switch (kind) {
                case WeightKind::plain: w = 1.0; break;
                case WeightKind::brownian: w = smp.dw_tilde; break;
                default: w = smp.dmu_star; break;
                }
                double wp = 1.0;
                for (int q = 0; q < weight_power; ++q) wp *= w;
                const double val = value(smp.x) * wp;
                if (!std::isfinite(val))
                    throw std::runtime_error("mc_expectation: non-finite sample at path "
                                             + std::to_string(p));
                s += val;
                ss += val * val;
            }
            parts[c] = {s, ss};
        }
    });

    const std::array<double, 2> total = detail::pairwise_reduce(parts, 0, n_chunks);
    const double n = static_cast<double>(n_paths);
    const double mean = total[0] / n;
    double var = (total[1] - total[0] * total[0] / n) / (n - 1.0);
    if (var < 0.0) var = 0.0;
    return {mean, std::sqrt(var / n)};
}

} // namespace jbsde
