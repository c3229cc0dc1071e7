#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gcl/errors.hpp"
#include "gcl/polynomials.hpp"
#include "gcl/rng.hpp"
#include "oracles.hpp"

using namespace gcl;

TEST_CASE("shifted Legendre values") {
    CHECK(poly::shifted_legendre(2, 0.5) == doctest::Approx(-0.5).epsilon(1e-15));
    CHECK(poly::shifted_legendre(0, 0.3) == 1.0);
    CHECK(poly::shifted_legendre(3, 0.25) == doctest::Approx(0.4375).epsilon(1e-14));
    CHECK(poly::shifted_legendre(1, 0.8) == doctest::Approx(0.6));
}

TEST_CASE("shifted Legendre rejects u outside (0,1)") {
    CHECK_THROWS_AS(poly::shifted_legendre(2, 0.0), DomainError);
    CHECK_THROWS_AS(poly::shifted_legendre(2, 1.0), DomainError);
    CHECK_THROWS_AS(poly::shifted_legendre(1, -0.2), DomainError);
}

TEST_CASE("Hermite values") {
    CHECK(poly::hermite(3, 2.0) == 2.0);
    for (double x : {-3.5, 0.0, 0.7, 12.0}) CHECK(poly::hermite(1, x) == x);
    CHECK(poly::hermite(4, 1.0) == -2.0);
    CHECK(poly::hermite(0, 5.0) == 1.0);
}

TEST_CASE("closed forms match the recurrence at random points") {
    rng::Stream stream(11, 0);
    for (int t = 0; t < 100; ++t) {
        const double u = stream.uniform();
        const double x = 8.0 * stream.uniform() - 4.0;
        const double closed_p[] = {1.0, 2 * u - 1, 6 * u * u - 6 * u + 1, 20 * u * u * u - 30 * u * u + 12 * u - 1};
        const double closed_h[] = {1.0, x, x * x - 1, x * x * x - 3 * x};
        for (int r = 0; r <= 3; ++r) {
            CHECK(poly::shifted_legendre(r, u) == doctest::Approx(closed_p[r]).epsilon(1e-12));
            CHECK(poly::hermite(r, x) == doctest::Approx(closed_h[r]).epsilon(1e-12));
        }
        // He_{r+1} = x He_r - r He_{r-1}
        for (int r = 1; r <= 7; ++r) {
            CHECK(poly::hermite(r + 1, x) ==
                  doctest::Approx(x * poly::hermite(r, x) - r * poly::hermite(r - 1, x)).epsilon(1e-12));
        }
    }
}

TEST_CASE("expanded coefficients agree with evaluation up to degree 6") {
    const poly::PolynomialFamily legendre{poly::Family::ShiftedLegendre, 6};
    const poly::PolynomialFamily hermite{poly::Family::Hermite, 6};
    for (int r = 0; r <= 6; ++r) {
        for (double u : {0.05, 0.3, 0.5, 0.77, 0.99}) {
            CHECK(poly::evaluate_power_basis(legendre.coefficients(r), u) ==
                  doctest::Approx(legendre(r, u)).epsilon(1e-12));
        }
        for (double x : {-2.5, -0.1, 0.0, 1.3, 4.0}) {
            CHECK(poly::evaluate_power_basis(hermite.coefficients(r), x) ==
                  doctest::Approx(hermite(r, x)).epsilon(1e-12).scale(1.0));
        }
    }
    CHECK(poly::shifted_legendre_coefficients(2) == std::vector<double>{1.0, -6.0, 6.0});
    CHECK(poly::hermite_coefficients(4) == std::vector<double>{3.0, 0.0, -6.0, 0.0, 1.0});
}

TEST_CASE("hermite_sequence matches single evaluations") {
    const auto seq = poly::hermite_sequence(6, 1.7);
    REQUIRE(seq.size() == 7);
    for (int r = 0; r <= 6; ++r) CHECK(seq[r] == doctest::Approx(poly::hermite(r, 1.7)).epsilon(1e-14));
}

TEST_CASE("shifted Legendre orthogonality on (0,1)") {
    for (int r = 0; r <= 5; ++r) {
        for (int s = r + 1; s <= 5; ++s) {
            const double v = oracle::simpson(
                [&](double u) { return poly::shifted_legendre(r, u) * poly::shifted_legendre(s, u); }, 1e-13,
                1.0 - 1e-13, 4000);
            CHECK(std::fabs(v) < 1e-10);
        }
    }
}

TEST_CASE("Hermite orthogonality under the Gaussian weight") {
    for (int r = 0; r <= 5; ++r) {
        for (int s = r + 1; s <= 5; ++s) {
            const double v = oracle::simpson(
                [&](double x) { return poly::hermite(r, x) * poly::hermite(s, x) * oracle::normal_pdf(x); }, -14.0,
                14.0, 20000);
            CHECK(std::fabs(v) < 1e-8);
        }
        // norm: E(He_r^2) = r!
        const double norm = oracle::simpson(
            [&](double x) { return std::pow(poly::hermite(r, x), 2) * oracle::normal_pdf(x); }, -14.0, 14.0, 20000);
        CHECK(norm == doctest::Approx(std::tgamma(r + 1.0)).epsilon(1e-9));
    }
}
