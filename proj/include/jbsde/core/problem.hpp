#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "levy_measure.hpp"

namespace jbsde {

// Exact solution fields (t, x) -> value, attached to a problem when known so
// studies can measure errors without special casing.
struct ExactSolution {
    std::function<double(double, double)> y;
    std::function<double(double, double)> z;
    std::function<double(double, double)> gamma;
};

// A decoupled forward-backward SDE with jumps in one spatial dimension:
//   dX = b dt + sigma dW + jumps with sizes c(t, X, e),
//   -dY = f(t, X, Y, Z, Gamma) dt - Z dW - compensated jump integral,
//   Y_T = phi(X_T).
// Coefficient functions are stateless and re-entrant; the struct is treated
// as immutable once built.
struct FBSDEProblem {
    std::string name;
    std::function<double(double, double)> b;            // (t, x)
    std::function<double(double, double)> sigma;        // (t, x)
    std::function<double(double, double, double)> c;    // (t, x, e)
    std::function<double(double, double, double, double, double)> f; // (t, x, y, z, gamma)
    std::function<double(double)> phi;
    std::function<double(double)> phi_prime;            // optional, finite differences otherwise
    FiniteActivityLevyMeasure measure;
    double T = 1.0;
    ExactSolution exact;                                // optional

    bool has_exact() const { return static_cast<bool>(exact.y); }
};

// (Y, Z, Gamma) values over the mesh at one time level.
struct SolutionLayer {
    int level = 0;
    std::vector<double> y;
    std::vector<double> z;
    std::vector<double> gamma;
};

} // namespace jbsde
