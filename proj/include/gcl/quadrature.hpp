#pragma once

#include <functional>
#include <span>

namespace gcl::quad {

struct Result {
    double value = 0.0;
    double error = 0.0;
};

/// Adaptive 15/31-point Gauss-Kronrod on [a, b]; `tolerance` is relative to
/// the L1 norm of the integrand.
Result integrate(const std::function<double(double)>& f, double a, double b,
                 double tolerance = 1e-12, unsigned max_depth = 12);

/// Sum of adaptive integrals over consecutive pairs of sorted breakpoints, with
/// `tolerance` relative to the L1 norm of the whole range.
Result integrate_pieces(const std::function<double(double)>& f, std::span<const double> breakpoints,
                        double tolerance = 1e-12, unsigned max_depth = 12);

}  // namespace gcl::quad
