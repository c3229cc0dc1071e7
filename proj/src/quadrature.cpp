#include "gcl/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <vector>

namespace gcl::quad {

Result integrate(const std::function<double(double)>& f, double a, double b, double tolerance,
                 unsigned max_depth) {
    if (!(b > a)) return {};
    double error = 0.0;
    const double value =
        boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, max_depth, tolerance, &error);
    return {value, error};
}

Result integrate_pieces(const std::function<double(double)>& f, std::span<const double> breakpoints,
                        double tolerance, unsigned max_depth) {
    if (breakpoints.size() < 2) return {};
    const std::size_t pieces = breakpoints.size() - 1;
    std::vector<Result> rough(pieces);
    std::vector<double> l1(pieces);
    double scale = 0.0;
    for (std::size_t i = 0; i < pieces; ++i) {
        double norm = 0.0;
        rough[i].value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
            f, breakpoints[i], breakpoints[i + 1], 0, 0.0, &rough[i].error, &norm);
        l1[i] = norm;
        scale += norm;
    }
    // Each piece only needs an error small against the whole integral, so
    // negligible pieces are not refined to their own relative tolerance.
    const double target = tolerance * scale;
    Result total;
    for (std::size_t i = 0; i < pieces; ++i) {
        Result piece = rough[i];
        if (piece.error > target) {
            const double relative = std::min(0.1, std::max(tolerance, target / l1[i]));
            piece = integrate(f, breakpoints[i], breakpoints[i + 1], relative, max_depth);
        }
        total.value += piece.value;
        total.error += piece.error;
    }
    return total;
}

}  // namespace gcl::quad
