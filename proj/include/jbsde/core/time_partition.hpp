#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace jbsde {

// Uniform partition 0 = t_0 < t_1 < ... < t_N = T.
struct TimePartition {
    double T = 0.0;
    int num_steps = 0;
    double dt = 0.0;
    std::vector<double> nodes;

    TimePartition() = default;

    TimePartition(double terminal_time, int n_steps)
    {
        if (!std::isfinite(terminal_time) || !(terminal_time > 0.0))
            throw std::invalid_argument("TimePartition: terminal time must be positive and finite");
        if (n_steps < 1)
            throw std::invalid_argument("TimePartition: need at least one step");
        T = terminal_time;
        num_steps = n_steps;
        dt = terminal_time / n_steps;
        nodes.resize(static_cast<std::size_t>(n_steps) + 1);
        for (int n = 0; n <= n_steps; ++n)
            nodes[static_cast<std::size_t>(n)] = terminal_time * n / n_steps;
        nodes.back() = terminal_time;
    }
};

} // namespace jbsde
