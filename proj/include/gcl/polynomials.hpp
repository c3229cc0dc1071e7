#pragma once

#include <vector>

namespace gcl::poly {

enum class Family { ShiftedLegendre, Hermite };

/// Shifted Legendre polynomial P*_r on (0,1). Degrees 0..3 use the closed
/// forms, higher degrees the three-term recurrence. Throws DomainError when
/// u is outside (0,1).
double shifted_legendre(int r, double u);

/// Probabilists' Hermite polynomial He_r(x).
double hermite(int r, double x);

/// He_0(x) .. He_max(x) in one pass of the recurrence.
std::vector<double> hermite_sequence(int max_degree, double x);

/// Power-basis coefficients c_0..c_r (value = sum c_k x^k), built by
/// expanding the recurrence in exact-integer double arithmetic.
std::vector<double> shifted_legendre_coefficients(int r);
std::vector<double> hermite_coefficients(int r);

/// Horner evaluation of a power-basis polynomial.
double evaluate_power_basis(const std::vector<double>& coefficients, double x);

struct PolynomialFamily {
    Family kind;
    int max_degree;

    double operator()(int r, double x) const;
    std::vector<double> coefficients(int r) const;
};

}  // namespace gcl::poly
