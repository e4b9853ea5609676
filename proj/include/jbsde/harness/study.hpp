#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "../core/registry.hpp"
#include "../core/spatial_mesh.hpp"
#include "../core/time_partition.hpp"
#include "../solver/config.hpp"
#include "../solver/scheme.hpp"

namespace jbsde {

struct ErrorTriple {
    double e_y;
    double e_z;
    double e_gamma;
};

// Componentwise max absolute difference over mesh points inside [a, b]; the
// padded region is deliberately excluded from the norm.
inline ErrorTriple error_linf(const SolutionLayer& layer, const SolutionLayer& exact,
                              const SpatialMesh& mesh, double a, double b)
{
    const std::size_t n = mesh.size();
    if (layer.y.size() != n || layer.z.size() != n || layer.gamma.size() != n
        || exact.y.size() != n || exact.z.size() != n || exact.gamma.size() != n)
        throw std::invalid_argument("error_linf: layer sizes do not match mesh");

    const double slack = 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
    ErrorTriple err{0.0, 0.0, 0.0};
    std::size_t inside = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = mesh.points[i];
        if (x < a - slack || x > b + slack) continue;
        ++inside;
        err.e_y = std::max(err.e_y, std::abs(layer.y[i] - exact.y[i]));
        err.e_z = std::max(err.e_z, std::abs(layer.z[i] - exact.z[i]));
        err.e_gamma = std::max(err.e_gamma, std::abs(layer.gamma[i] - exact.gamma[i]));
    }
    if (inside == 0) throw std::invalid_argument("error_linf: no mesh points inside [a, b]");
    return err;
}

// Least-squares slope of log2(error) against log2(step size); the
// convergence-rate number printed by the study tables.
inline double fit_rate(const std::vector<double>& steps, const std::vector<double>& errors)
{
    if (steps.size() != errors.size())
        throw std::invalid_argument("fit_rate: input lengths differ");
    if (steps.size() < 2) throw std::invalid_argument("fit_rate: need at least 2 pairs");
    for (std::size_t i = 0; i < steps.size(); ++i)
        if (!(steps[i] > 0.0) || !(errors[i] > 0.0))
            throw std::invalid_argument("fit_rate: steps and errors must be positive");

    const std::size_t n = steps.size();
    double mx = 0.0, my = 0.0;
    std::vector<double> xs(n), ys(n);
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = std::log2(steps[i]);
        ys[i] = std::log2(errors[i]);
        mx += xs[i];
        my += ys[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    if (sxx == 0.0) throw std::invalid_argument("fit_rate: all step sizes equal");
    return sxy / sxx;
}

struct StudyConfig {
    double delta = 1.0;
    double T = 1.0;
    double a = 0.0;
    double b = 1.0;
    double dx = 0.01;
    int N = 64;
    SolverConfig solver;
};

struct StudyRecord {
    double step = 0.0;
    int N = 0;
    double dx = 0.0;
    double e_y = std::numeric_limits<double>::quiet_NaN();
    double e_z = std::numeric_limits<double>::quiet_NaN();
    double e_gamma = std::numeric_limits<double>::quiet_NaN();
    double wall_seconds = 0.0;
    std::string error;

    bool ok() const { return error.empty(); }
};

struct ConvergenceReport {
    std::string problem;
    std::string axis;
    StudyConfig config;
    std::vector<StudyRecord> records;
    double cr_y = std::numeric_limits<double>::quiet_NaN();
    double cr_z = std::numeric_limits<double>::quiet_NaN();
    double cr_gamma = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

inline double fit_rate_or_nan(const std::vector<StudyRecord>& records,
                              double StudyRecord::* field)
{
    std::vector<double> steps, errors;
    for (const StudyRecord& r : records) {
        if (!r.ok()) continue;
        const double e = r.*field;
        if (e > 0.0 && std::isfinite(e)) {
            steps.push_back(r.step);
            errors.push_back(e);
        }
    }
    if (steps.size() < 2) return std::numeric_limits<double>::quiet_NaN();
    return fit_rate(steps, errors);
}

} // namespace detail

// Runs one convergence study: solves the problem once per value of the varied
// axis, measures L-infinity errors at t = 0 against the exact solution, and
// fits rates over the successful runs. A failed run is recorded with its
// error text and the study continues.
inline ConvergenceReport run_study(const std::string& problem_name, const std::string& axis,
                                   std::vector<double> values, const StudyConfig& base)
{
    if (axis != "dt" && axis != "dx")
        throw std::invalid_argument("run_study: axis must be 'dt' or 'dx'");
    if (values.empty()) throw std::invalid_argument("run_study: no study values");
    base.solver.validate();

    const FBSDEProblem problem = registry_get(problem_name, base.delta, base.T);
    if (!problem.has_exact())
        throw std::logic_error("run_study: problem carries no exact solution");

    std::sort(values.begin(), values.end(), std::greater<double>());

    ConvergenceReport report;
    report.problem = problem.name;
    report.axis = axis;
    report.config = base;
    if (report.config.solver.pad < 0.0)
        report.config.solver.pad = default_padding(problem, base.a, base.b, base.solver.M_y);

    for (double v : values) {
        StudyRecord rec;
        rec.step = v;
        if (axis == "dt") {
            const double ratio = base.T / v;
            rec.N = static_cast<int>(std::llround(ratio));
            rec.dx = base.dx;
            if (rec.N < 1 || std::abs(rec.N - ratio) > 1e-9) {
                rec.error = "dt does not divide the horizon";
                report.records.push_back(rec);
                continue;
            }
        } else {
            rec.N = base.N;
            rec.dx = v;
        }

        const auto t0 = std::chrono::steady_clock::now();
        try {
            const SpatialMesh mesh(base.a, base.b, rec.dx, report.config.solver.pad);
            const TimePartition partition(base.T, rec.N);
            const SolveResult solved = solve(problem, mesh, partition, report.config.solver);
            const SolutionLayer truth = exact_layer(problem, mesh, 0.0);
            const ErrorTriple err = error_linf(solved.layer0, truth, mesh, base.a, base.b);
            rec.e_y = err.e_y;
            rec.e_z = err.e_z;
            rec.e_gamma = err.e_gamma;
        } catch (const std::exception& e) {
            rec.error = e.what();
        }
        rec.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        report.records.push_back(rec);
    }

    report.cr_y = detail::fit_rate_or_nan(report.records, &StudyRecord::e_y);
    report.cr_z = detail::fit_rate_or_nan(report.records, &StudyRecord::e_z);
    report.cr_gamma = detail::fit_rate_or_nan(report.records, &StudyRecord::e_gamma);
    return report;
}

struct StudyPreset {
    std::string problem;
    std::string axis;
    std::vector<double> values;
    StudyConfig config;
};

namespace detail {

inline std::vector<double> dyadic(int from, int to)
{
    std::vector<double> v;
    for (int k = from; k <= to; ++k) v.push_back(std::ldexp(1.0, -k));
    return v;
}

} // namespace detail

// Pinned configurations for the four benchmark error tables. degree_override
// selects the interpolation block where a table has more than one (0 keeps
// the preset default).
inline StudyPreset table_preset(const std::string& id, int degree_override = 0)
{
    StudyPreset p;
    if (id == "table1") {
        p.problem = "example1";
        p.axis = "dt";
        p.values = detail::dyadic(4, 8);
        p.config.dx = 0.01;
        p.config.solver.degree = 3;
        p.config.solver.M_y = 2;
        p.config.solver.M_f = 1;
    } else if (id == "table2") {
        p.problem = "example1";
        p.axis = "dx";
        p.values = detail::dyadic(2, 6);
        p.config.N = 1024;
        p.config.solver.degree = 1;
        p.config.solver.M_y = 3;
        p.config.solver.M_f = 2;
    } else if (id == "table3") {
        p.problem = "example2";
        p.axis = "dt";
        p.values = detail::dyadic(5, 9);
        p.config.dx = 0.01;
        p.config.solver.degree = 3;
        p.config.solver.M_y = 2;
        p.config.solver.M_f = 1;
    } else if (id == "table4") {
        p.problem = "example2";
        p.axis = "dx";
        p.config.N = 1024;
        p.config.solver.degree = 1;
        p.config.solver.M_y = 2;
        p.config.solver.M_f = 1;
        p.values = detail::dyadic(5, 9);
        if (degree_override == 2) p.values = detail::dyadic(2, 6);
    } else {
        throw std::out_of_range("table_preset: unknown preset '" + id + "'");
    }
    if (degree_override != 0) {
        if (degree_override < 1 || degree_override > 3)
            throw std::invalid_argument("table_preset: degree override must be 1, 2 or 3");
        p.config.solver.degree = degree_override;
    }
    return p;
}

} // namespace jbsde
