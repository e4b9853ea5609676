// Solves the first benchmark problem on a coarse grid and prints the
// time-zero errors against the closed-form solution.

#include <cstdio>

#include <jbsde/jbsde.hpp>

int main()
{
    const jbsde::FBSDEProblem problem = jbsde::registry_get("example1");

    jbsde::SolverConfig cfg;
    cfg.M_y = 2;
    cfg.M_f = 1;
    cfg.degree = 3;
    cfg.pad = jbsde::default_padding(problem, 0.0, 1.0, cfg.M_y);

    const jbsde::SpatialMesh mesh(0.0, 1.0, 0.02, cfg.pad);
    const jbsde::TimePartition partition(problem.T, 16);

    const jbsde::SolveResult result = jbsde::solve(problem, mesh, partition, cfg);
    const jbsde::SolutionLayer truth = jbsde::exact_layer(problem, mesh, 0.0);
    const jbsde::ErrorTriple err = jbsde::error_linf(result.layer0, truth, mesh, 0.0, 1.0);

    std::printf("solved %s with N=%d, dx=%.3f, pad=%.1f in %.2fs\n", problem.name.c_str(),
                partition.num_steps, mesh.dx, cfg.pad, result.diagnostics.wall_seconds);
    std::printf("errors over [0,1]:  Y %.3e   Z %.3e   Gamma %.3e\n", err.e_y, err.e_z,
                err.e_gamma);
    return 0;
}
