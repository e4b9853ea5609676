#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <stdexcept>

#include <jbsde/quad/rules.hpp>

using namespace jbsde;

TEST_CASE("normal rule reproduces known node tables", "[quad]")
{
    const QuadratureRule1D r1 = gauss_hermite_normal(1);
    REQUIRE(r1.kind == MeasureKind::standard_normal);
    REQUIRE(r1.size() == 1);
    REQUIRE(r1.nodes[0] == Catch::Approx(0.0).margin(1e-15));
    REQUIRE(r1.weights[0] == Catch::Approx(1.0).margin(1e-15));

    const QuadratureRule1D r2 = gauss_hermite_normal(2);
    REQUIRE(r2.nodes[0] == Catch::Approx(-1.0).margin(1e-14));
    REQUIRE(r2.nodes[1] == Catch::Approx(1.0).margin(1e-14));
    REQUIRE(r2.weights[0] == Catch::Approx(0.5).margin(1e-14));
    REQUIRE(r2.weights[1] == Catch::Approx(0.5).margin(1e-14));

    const QuadratureRule1D r3 = gauss_hermite_normal(3);
    REQUIRE(r3.nodes[0] == Catch::Approx(-std::sqrt(3.0)).margin(1e-13));
    REQUIRE(r3.nodes[1] == 0.0);
    REQUIRE(r3.nodes[2] == Catch::Approx(std::sqrt(3.0)).margin(1e-13));
    REQUIRE(r3.weights[0] == Catch::Approx(1.0 / 6.0).margin(1e-13));
    REQUIRE(r3.weights[1] == Catch::Approx(2.0 / 3.0).margin(1e-13));

    const QuadratureRule1D r8 = gauss_hermite_normal(8);
    REQUIRE(r8.nodes[0] == Catch::Approx(-4.144547186125894).margin(1e-12));
    REQUIRE(r8.nodes[3] == Catch::Approx(-0.539079811351375).margin(1e-12));
    REQUIRE(r8.nodes[4] == Catch::Approx(0.539079811351375).margin(1e-12));
    REQUIRE(r8.weights[0] == Catch::Approx(1.12614538375097e-4).margin(1e-15));
    REQUIRE(r8.weights[3] == Catch::Approx(0.373012257679077).margin(1e-12));

    // symmetry is exact by construction
    for (std::size_t i = 0; i < r8.size(); ++i) {
        REQUIRE(r8.nodes[i] == -r8.nodes[r8.size() - 1 - i]);
        REQUIRE(r8.weights[i] == r8.weights[r8.size() - 1 - i]);
    }
}

TEST_CASE("normal rule integrates moments exactly through degree 2n-1", "[quad]")
{
    // standard normal even moments are the double factorials
    const double moments[] = {1.0, 1.0, 3.0, 15.0, 105.0, 945.0, 10395.0, 135135.0};
    const QuadratureRule1D r8 = gauss_hermite_normal(8);
    for (int k = 0; k <= 7; ++k) {
        const double got = r8.integrate([&](double x) { return std::pow(x, 2 * k); });
        REQUIRE(got == Catch::Approx(moments[k]).epsilon(1e-12));
        const double odd = r8.integrate([&](double x) { return std::pow(x, 2 * k + 1); });
        REQUIRE(odd == Catch::Approx(0.0).margin(1e-9));
    }

    for (int n : {1, 2, 3, 4, 8, 16, 32, 64}) {
        const QuadratureRule1D r = gauss_hermite_normal(n);
        double mass = 0.0;
        for (double w : r.weights) mass += w;
        REQUIRE(mass == Catch::Approx(1.0).margin(1e-13));
    }
}

TEST_CASE("interval rule reproduces known node tables", "[quad]")
{
    const QuadratureRule1D r2 = gauss_legendre(2, -1.0, 1.0);
    REQUIRE(r2.kind == MeasureKind::lebesgue_interval);
    REQUIRE(r2.a == -1.0);
    REQUIRE(r2.b == 1.0);
    REQUIRE(r2.nodes[0] == Catch::Approx(-1.0 / std::sqrt(3.0)).margin(1e-14));
    REQUIRE(r2.nodes[1] == Catch::Approx(1.0 / std::sqrt(3.0)).margin(1e-14));
    REQUIRE(r2.weights[0] == Catch::Approx(1.0).margin(1e-14));
    REQUIRE(r2.weights[1] == Catch::Approx(1.0).margin(1e-14));

    const QuadratureRule1D r8 = gauss_legendre(8, -1.0, 1.0);
    REQUIRE(r8.nodes[0] == Catch::Approx(-0.9602898564975363).margin(1e-12));
    REQUIRE(r8.nodes[3] == Catch::Approx(-0.1834346424956498).margin(1e-12));
    REQUIRE(r8.weights[0] == Catch::Approx(0.10122853629037626).margin(1e-12));
    REQUIRE(r8.weights[3] == Catch::Approx(0.3626837833783620).margin(1e-12));
}

TEST_CASE("interval rule has Lebesgue mass and polynomial exactness", "[quad]")
{
    for (auto [a, b] : {std::pair{-1.0, 1.0}, {0.0, 1.0}, {-2.0, 5.0}}) {
        for (int n : {1, 2, 4, 8, 20, 64}) {
            const QuadratureRule1D r = gauss_legendre(n, a, b);
            double mass = 0.0;
            for (double w : r.weights) mass += w;
            REQUIRE(mass == Catch::Approx(b - a).margin(1e-13 * std::abs(b - a)));
        }
    }

    const QuadratureRule1D r8 = gauss_legendre(8, -1.0, 1.0);
    const double x8 = r8.integrate([](double x) { return std::pow(x, 8); });
    REQUIRE(std::abs(x8 - 2.0 / 9.0) < 1e-14);

    const QuadratureRule1D u4 = gauss_legendre(4, 0.0, 1.0);
    REQUIRE(u4.integrate([](double x) { return std::pow(x, 7); })
            == Catch::Approx(1.0 / 8.0).margin(1e-14));

    // degree 2n is no longer exact, so the rule is not accidentally larger
    const QuadratureRule1D r2 = gauss_legendre(2, 0.0, 1.0);
    REQUIRE(std::abs(r2.integrate([](double x) { return std::pow(x, 4); }) - 0.2) > 1e-4);
}

TEST_CASE("rule constructors reject bad sizes and intervals", "[quad]")
{
    REQUIRE_THROWS_AS(gauss_hermite_normal(0), std::invalid_argument);
    REQUIRE_THROWS_AS(gauss_hermite_normal(65), std::invalid_argument);
    REQUIRE_THROWS_AS(gauss_legendre(0, 0.0, 1.0), std::invalid_argument);
    REQUIRE_THROWS_AS(gauss_legendre(65, 0.0, 1.0), std::invalid_argument);
    REQUIRE_THROWS_AS(gauss_legendre(4, 1.0, 1.0), std::invalid_argument);
    REQUIRE_THROWS_AS(gauss_legendre(4, 2.0, -1.0), std::invalid_argument);
}

TEST_CASE("cached rules hand out stable shared tables", "[quad]")
{
    const QuadratureRule1D* a = &cached_gauss_hermite_normal(8);
    const QuadratureRule1D* b = &cached_gauss_hermite_normal(8);
    REQUIRE(a == b);
    REQUIRE(a != &cached_gauss_hermite_normal(12));

    const QuadratureRule1D* p = &cached_gauss_legendre(8, -1.0, 1.0);
    REQUIRE(p == &cached_gauss_legendre(8, -1.0, 1.0));
    REQUIRE(p != &cached_gauss_legendre(8, 0.0, 1.0));
    REQUIRE(p->nodes == gauss_legendre(8, -1.0, 1.0).nodes);
}
