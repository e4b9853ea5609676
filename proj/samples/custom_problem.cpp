// Assembles a problem by hand instead of using the registry: a driftless unit
// diffusion with unit-uniform jumps, zero generator and linear terminal data.
// The conditional expectation of a martingale is the current state, so the
// exact solution is Y(t, x) = x with Z = 1 and Gamma = 0.

#include <cmath>
#include <cstdio>

#include <jbsde/jbsde.hpp>

int main()
{
    jbsde::FBSDEProblem p;
    p.name = "martingale";
    p.T = 1.0;
    p.measure = jbsde::FiniteActivityLevyMeasure::uniform(1.0);
    p.b = [](double, double) { return 0.0; };
    p.sigma = [](double, double) { return 1.0; };
    p.c = [](double, double, double e) { return e; };
    p.f = [](double, double, double, double, double) { return 0.0; };
    p.phi = [](double x) { return x; };
    p.phi_prime = [](double) { return 1.0; };

    jbsde::SolverConfig cfg;
    cfg.M_y = 3;
    cfg.M_f = 2;
    cfg.pad = jbsde::default_padding(p, 0.0, 1.0, cfg.M_y);

    const jbsde::SpatialMesh mesh(0.0, 1.0, 0.02, cfg.pad);
    const jbsde::TimePartition partition(p.T, 32);
    const jbsde::SolveResult result = jbsde::solve(p, mesh, partition, cfg);

    // midpoint of the interest region
    double best = 1e300;
    std::size_t mid = 0;
    for (std::size_t i = 0; i < mesh.size(); ++i) {
        const double d = std::abs(mesh.points[i] - 0.5);
        if (d < best) {
            best = d;
            mid = i;
        }
    }
    std::printf("Y(0, %.2f) = %.10f   (martingale value %.2f)\n", mesh.points[mid],
                result.layer0.y[mid], mesh.points[mid]);
    std::printf("Z(0, %.2f) = %.10f   (exact 1)\n", mesh.points[mid], result.layer0.z[mid]);
    std::printf("Gamma(0, %.2f) = %.2e   (exact 0)\n", mesh.points[mid],
                result.layer0.gamma[mid]);
    return 0;
}
