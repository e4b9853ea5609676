#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <stdexcept>

#include <jbsde/core/registry.hpp>
#include <jbsde/core/spatial_mesh.hpp>
#include <jbsde/core/time_partition.hpp>
#include <jbsde/quad/rules.hpp>

using namespace jbsde;

TEST_CASE("time partition covers the horizon exactly", "[core]")
{
    const TimePartition p(1.0, 64);
    REQUIRE(p.num_steps == 64);
    REQUIRE(p.dt == Catch::Approx(1.0 / 64.0));
    REQUIRE(p.nodes.size() == 65);
    REQUIRE(p.nodes.front() == 0.0);
    REQUIRE(p.nodes.back() == 1.0);
    REQUIRE(p.nodes[32] == 0.5);

    const TimePartition q(0.7, 3);
    REQUIRE(q.nodes.back() == 0.7);

    REQUIRE_THROWS_AS(TimePartition(0.0, 4), std::invalid_argument);
    REQUIRE_THROWS_AS(TimePartition(-1.0, 4), std::invalid_argument);
    REQUIRE_THROWS_AS(TimePartition(1.0, 0), std::invalid_argument);
}

TEST_CASE("spatial mesh covers the padded extent", "[core]")
{
    const SpatialMesh plain(0.0, 1.0, 0.25, 0.0);
    REQUIRE(plain.size() == 5);
    REQUIRE(plain.points[0] == 0.0);
    REQUIRE(plain.points[2] == 0.5);
    REQUIRE(plain.back() == 1.0);

    const SpatialMesh padded(0.0, 1.0, 0.25, 0.5);
    REQUIRE(padded.size() == 9);
    REQUIRE(padded.front() == -0.5);
    REQUIRE(padded.back() == 1.5);
    REQUIRE(padded.a == 0.0);
    REQUIRE(padded.b == 1.0);

    // non-divisible width rounds the interval count up, never short
    const SpatialMesh odd(0.0, 1.0, 0.3, 0.0);
    REQUIRE(odd.back() >= 1.0 - 1e-12);
    REQUIRE(odd.size() == 5);

    REQUIRE_THROWS_AS(SpatialMesh(1.0, 0.0, 0.1, 0.0), std::invalid_argument);
    REQUIRE_THROWS_AS(SpatialMesh(0.0, 1.0, 0.0, 0.0), std::invalid_argument);
    REQUIRE_THROWS_AS(SpatialMesh(0.0, 1.0, 0.1, -1.0), std::invalid_argument);
}

TEST_CASE("uniform jump measure has unit mass and exact moments", "[core]")
{
    const FiniteActivityLevyMeasure nu = FiniteActivityLevyMeasure::uniform(1.0);
    REQUIRE(nu.lambda == 2.0);
    REQUIRE(nu.e_min == -1.0);
    REQUIRE(nu.e_max == 1.0);
    REQUIRE(nu.int_rho == Catch::Approx(1.0).margin(1e-13));
    REQUIRE(nu.int_eta_rho == Catch::Approx(1.0).margin(1e-13));
    REQUIRE(nu.int_eta2_rho == Catch::Approx(1.0).margin(1e-13));
    REQUIRE(nu.sample(0.0) == -1.0);
    REQUIRE(nu.sample(1.0) == 1.0);
    REQUIRE(nu.sample(0.5) == 0.0);

    const FiniteActivityLevyMeasure half = FiniteActivityLevyMeasure::uniform(0.5);
    REQUIRE(half.lambda == 1.0);
    REQUIRE(half.rho(0.0) == 1.0);

    REQUIRE_THROWS_AS(FiniteActivityLevyMeasure::uniform(0.0), std::invalid_argument);

    // density that does not normalize is rejected
    REQUIRE_THROWS_AS(FiniteActivityLevyMeasure(
                          1.0, -1.0, 1.0, [](double) { return 1.0; },
                          [](double) { return 1.0; }, [](double u) { return u; }),
                      std::invalid_argument);
}

TEST_CASE("registry serves both benchmark problems", "[core]")
{
    REQUIRE_THROWS_AS(registry_get("nope"), std::out_of_range);
    REQUIRE_THROWS_AS(registry_get("example1", 0.0), std::invalid_argument);
    REQUIRE_THROWS_AS(registry_get("example1", 1.0, -1.0), std::invalid_argument);

    const FBSDEProblem p1 = registry_get("example1");
    REQUIRE(p1.name == "example1");
    REQUIRE(p1.T == 1.0);
    REQUIRE(p1.has_exact());
    REQUIRE(p1.b(0.3, 0.7) == 0.0);
    REQUIRE(p1.sigma(0.3, 0.7) == 1.0);
    REQUIRE(p1.c(0.3, 0.7, -0.2) == -0.2);
    REQUIRE(p1.exact.y(0.0, 0.0) == Catch::Approx(2.0).margin(1e-15));
    REQUIRE(p1.exact.z(0.0, 0.0) == Catch::Approx(1.0).margin(1e-15));
    // cos(x + t - 1) - cos(x + t + 1) - 2 sin(x + t) vanishes at the origin
    REQUIRE(p1.exact.gamma(0.0, 0.0) == Catch::Approx(0.0).margin(1e-15));
    REQUIRE(p1.exact.gamma(0.5, 0.25)
            == Catch::Approx(std::cos(0.75 - 1.0) - std::cos(0.75 + 1.0)
                             - 2.0 * std::sin(0.75))
                   .margin(1e-15));

    const FBSDEProblem p2 = registry_get("example2");
    REQUIRE(p2.name == "example2");
    REQUIRE(p2.has_exact());
    REQUIRE(p2.exact.y(0.0, 0.0) == Catch::Approx(2.0).margin(1e-15));
    REQUIRE(p2.exact.z(0.0, 0.0) == Catch::Approx(-6.0).margin(1e-14));
    // 2 (e - 1/e - 2)
    REQUIRE(p2.exact.gamma(0.0, 0.0) == Catch::Approx(0.7008047745752055).margin(1e-14));
}

TEST_CASE("terminal data matches the exact solution at T", "[core]")
{
    for (const char* name : {"example1", "example2"}) {
        const FBSDEProblem p = registry_get(name);
        const SpatialMesh mesh(0.0, 1.0, 0.1, 0.0);
        const SolutionLayer layer = exact_layer(p, mesh, p.T);
        for (std::size_t i = 0; i < mesh.size(); ++i) {
            REQUIRE(layer.y[i] == Catch::Approx(p.phi(mesh.points[i])).margin(1e-14));
            REQUIRE(layer.z[i]
                    == Catch::Approx(p.sigma(p.T, mesh.points[i]) * p.phi_prime(mesh.points[i]))
                           .margin(1e-13));
        }
    }

    FBSDEProblem bare;
    bare.measure = FiniteActivityLevyMeasure::uniform(1.0);
    const SpatialMesh mesh(0.0, 1.0, 0.5, 0.0);
    REQUIRE_THROWS_AS(exact_layer(bare, mesh, 0.0), std::logic_error);
}

namespace {

// Independent check that each registry generator is consistent with its
// exact solution: for u(t, x) the exact Y field, the backward equation
// requires f(t, x, u, sigma u_x, B[u]) = -u_t - L u with L the generator of
// the forward process, whose jump part is the compensated increment integral
// int (u(t, x + c) - u - c u_x) lambda rho de. Derivatives are taken by
// central differences, the jump integral by quadrature, so agreement to a
// few parts in 1e6 certifies the algebra without reusing any of the closed
// forms under test.
void check_generator_identity(const FBSDEProblem& p, double t, double x)
{
    const double h = 1e-5;
    const auto& u = p.exact.y;
    const double u0 = u(t, x);
    const double ut = (u(t + h, x) - u(t - h, x)) / (2.0 * h);
    const double ux = (u(t, x + h) - u(t, x - h)) / (2.0 * h);
    const double uxx = (u(t, x + h) - 2.0 * u0 + u(t, x - h)) / (h * h);

    const FiniteActivityLevyMeasure& nu = p.measure;
    const QuadratureRule1D gl = gauss_legendre(32, nu.e_min, nu.e_max);
    const double jump_integral =
        nu.lambda
        * gl.integrate([&](double e) {
              return nu.rho(e) * (u(t, x + p.c(t, x, e)) - u0 - p.c(t, x, e) * ux);
          });

    const double sig = p.sigma(t, x);
    const double rhs = -ut - p.b(t, x) * ux - 0.5 * sig * sig * uxx - jump_integral;
    const double lhs = p.f(t, x, u0, p.exact.z(t, x), p.exact.gamma(t, x));
    REQUIRE(lhs == Catch::Approx(rhs).margin(2e-5 * std::max(1.0, std::abs(rhs))));
}

} // namespace

TEST_CASE("registry generators satisfy the backward equation", "[core]")
{
    for (const char* name : {"example1", "example2"}) {
        const FBSDEProblem p = registry_get(name);
        for (const double t : {0.1, 0.45, 0.8}) {
            for (const double x : {0.05, 0.5, 0.95}) check_generator_identity(p, t, x);
        }
    }
}

TEST_CASE("exact Z and Gamma fields are consistent with Y", "[core]")
{
    // Z = sigma dY/dx and Gamma = integral of (Y(t, x + c) - Y(t, x)) eta
    // against the jump measure; checked by finite differences and quadrature.
    const double h = 1e-6;
    for (const char* name : {"example1", "example2"}) {
        const FBSDEProblem p = registry_get(name);
        const FiniteActivityLevyMeasure& nu = p.measure;
        const QuadratureRule1D gl = gauss_legendre(32, nu.e_min, nu.e_max);
        for (const double t : {0.2, 0.7}) {
            for (const double x : {0.15, 0.6}) {
                const double ux = (p.exact.y(t, x + h) - p.exact.y(t, x - h)) / (2.0 * h);
                REQUIRE(p.exact.z(t, x)
                        == Catch::Approx(p.sigma(t, x) * ux).epsilon(1e-4));
                const double gamma = nu.lambda
                    * gl.integrate([&](double e) {
                          return nu.rho(e) * nu.eta(e)
                                 * (p.exact.y(t, x + p.c(t, x, e)) - p.exact.y(t, x));
                      });
                REQUIRE(p.exact.gamma(t, x) == Catch::Approx(gamma).margin(1e-10));
            }
        }
    }
}
