#include "gcl/polynomials.hpp"

#include "gcl/errors.hpp"

#include <string>

namespace gcl::poly {

namespace {

void check_degree(int r) {
    if (r < 0) throw DomainError("polynomial degree must be non-negative, got " + std::to_string(r));
}

}  // namespace

double shifted_legendre(int r, double u) {
    check_degree(r);
    if (!(u > 0.0 && u < 1.0)) {
        throw DomainError("shifted Legendre argument must lie in (0,1), got " + std::to_string(u));
    }
    switch (r) {
        case 0: return 1.0;
        case 1: return 2.0 * u - 1.0;
        case 2: return 6.0 * u * u - 6.0 * u + 1.0;
        case 3: return ((20.0 * u - 30.0) * u + 12.0) * u - 1.0;
        default: break;
    }
    // (k+1) P*_{k+1} = (2k+1)(2u-1) P*_k - k P*_{k-1}
    const double t = 2.0 * u - 1.0;
    double prev = 6.0 * u * u - 6.0 * u + 1.0;
    double curr = ((20.0 * u - 30.0) * u + 12.0) * u - 1.0;
    for (int k = 3; k < r; ++k) {
        const double next = ((2.0 * k + 1.0) * t * curr - k * prev) / (k + 1.0);
        prev = curr;
        curr = next;
    }
    return curr;
}

double hermite(int r, double x) {
    check_degree(r);
    switch (r) {
        case 0: return 1.0;
        case 1: return x;
        case 2: return x * x - 1.0;
        case 3: return x * (x * x - 3.0);
        default: break;
    }
    double prev = x * x - 1.0;
    double curr = x * (x * x - 3.0);
    for (int k = 3; k < r; ++k) {
        const double next = x * curr - k * prev;
        prev = curr;
        curr = next;
    }
    return curr;
}

std::vector<double> hermite_sequence(int max_degree, double x) {
    check_degree(max_degree);
    std::vector<double> h(static_cast<std::size_t>(max_degree) + 1);
    h[0] = 1.0;
    if (max_degree >= 1) h[1] = x;
    for (int k = 1; k < max_degree; ++k) h[k + 1] = x * h[k] - k * h[k - 1];
    return h;
}

std::vector<double> shifted_legendre_coefficients(int r) {
    check_degree(r);
    // P*_0 = 1, P*_1 = 2u - 1
    std::vector<double> prev{1.0};
    if (r == 0) return prev;
    std::vector<double> curr{-1.0, 2.0};
    for (int k = 1; k < r; ++k) {
        std::vector<double> next(static_cast<std::size_t>(k) + 2, 0.0);
        const double a = 2.0 * k + 1.0;
        for (std::size_t j = 0; j < curr.size(); ++j) {
            next[j + 1] += a * 2.0 * curr[j];
            next[j] -= a * curr[j];
        }
        for (std::size_t j = 0; j < prev.size(); ++j) next[j] -= k * prev[j];
        for (double& c : next) c /= (k + 1.0);
        prev = std::move(curr);
        curr = std::move(next);
    }
    return curr;
}

std::vector<double> hermite_coefficients(int r) {
    check_degree(r);
    std::vector<double> prev{1.0};
    if (r == 0) return prev;
    std::vector<double> curr{0.0, 1.0};
    for (int k = 1; k < r; ++k) {
        std::vector<double> next(static_cast<std::size_t>(k) + 2, 0.0);
        for (std::size_t j = 0; j < curr.size(); ++j) next[j + 1] += curr[j];
        for (std::size_t j = 0; j < prev.size(); ++j) next[j] -= k * prev[j];
        prev = std::move(curr);
        curr = std::move(next);
    }
    return curr;
}

double evaluate_power_basis(const std::vector<double>& coefficients, double x) {
    double acc = 0.0;
    for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) acc = acc * x + *it;
    return acc;
}

double PolynomialFamily::operator()(int r, double x) const {
    if (r > max_degree) {
        throw DomainError("degree " + std::to_string(r) + " exceeds family maximum " +
                          std::to_string(max_degree));
    }
    return kind == Family::ShiftedLegendre ? shifted_legendre(r, x) : hermite(r, x);
}

std::vector<double> PolynomialFamily::coefficients(int r) const {
    return kind == Family::ShiftedLegendre ? shifted_legendre_coefficients(r) : hermite_coefficients(r);
}

}  // namespace gcl::poly
