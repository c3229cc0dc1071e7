#include "gcl/distributions.hpp"

#include "gcl/errors.hpp"
#include "gcl/gaussian.hpp"
#include "gcl/rng.hpp"

#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <limits>
#include <string>

namespace gcl {

namespace {

constexpr double kLevelLimit = 38.0;

}  // namespace

double QuantileDistribution::at_normal_score(double z) const {
    if (normal_score) return normal_score(z);
    if (z <= 0.0) return quantile(gauss::cdf(z));
    // Upper tail: 1 - sf(z) rounds to the nearest double, so clamp into (0,1).
    const double u = 1.0 - gauss::sf(z);
    return quantile(std::min(u, std::nextafter(1.0, 0.0)));
}

double QuantileDistribution::normal_level(double x) const {
    if (x <= at_normal_score(-kLevelLimit)) return -std::numeric_limits<double>::infinity();
    if (x >= at_normal_score(kLevelLimit)) return std::numeric_limits<double>::infinity();
    const auto f = [this, x](double z) { return at_normal_score(z) - x; };
    std::uintmax_t iterations = 200;
    const auto bracket = boost::math::tools::toms748_solve(
        f, -kLevelLimit, kLevelLimit, boost::math::tools::eps_tolerance<double>(52), iterations);
    return 0.5 * (bracket.first + bracket.second);
}

std::pair<double, double> QuantileDistribution::cdf_pair(double x) const {
    const double z = normal_level(x);
    return {gauss::cdf(z), gauss::sf(z)};
}

namespace dist {

double tukey_gh_transform(double z, const TukeyGH& params) {
    const double tail = std::exp(0.5 * params.h * z * z);
    if (params.g == 0.0) return z * tail;
    return std::expm1(params.g * z) / params.g * tail;
}

double tukey_gh_quantile(double u, const TukeyGH& params) {
    return tukey_gh_transform(gauss::quantile(u), params);
}

QuantileDistribution gaussian(double mean, double sd) {
    if (!(sd > 0.0)) throw DomainError("Gaussian sd must be positive");
    return {"N(" + std::to_string(mean) + "," + std::to_string(sd * sd) + ")",
            [mean, sd](double u) { return mean + sd * gauss::quantile(u); },
            [mean, sd](double z) { return mean + sd * z; }, true};
}

QuantileDistribution uniform(double a, double b) {
    if (!(b > a)) throw DomainError("uniform needs a < b");
    return {"U(" + std::to_string(a) + "," + std::to_string(b) + ")",
            [a, b](double u) {
                if (!(u > 0.0 && u < 1.0)) throw DomainError("quantile argument must lie in (0,1)");
                return a + (b - a) * u;
            },
            [a, b](double z) { return z <= 0.0 ? a + (b - a) * gauss::cdf(z) : b - (b - a) * gauss::sf(z); },
            true};
}

QuantileDistribution exponential(double rate) {
    if (!(rate > 0.0)) throw DomainError("exponential rate must be positive");
    return {"Exp(" + std::to_string(rate) + ")",
            [rate](double u) {
                if (!(u > 0.0 && u < 1.0)) throw DomainError("quantile argument must lie in (0,1)");
                return -std::log1p(-u) / rate;
            },
            // -log(1 - Phi(z)) = -log Phi(-z)
            [rate](double z) { return -gauss::log_cdf(-z) / rate; }, false};
}

QuantileDistribution tukey_gh(const TukeyGH& params) {
    if (params.h < 0.0) throw DomainError("Tukey h must be non-negative");
    return {"Tukey(g=" + std::to_string(params.g) + ",h=" + std::to_string(params.h) + ")",
            [params](double u) { return tukey_gh_quantile(u, params); },
            [params](double z) { return tukey_gh_transform(z, params); }, params.g == 0.0};
}

QuantileDistribution reflected(const QuantileDistribution& base) {
    QuantileDistribution out;
    out.label = "-" + base.label;
    out.quantile = [base](double u) { return -base.quantile(1.0 - u); };
    out.normal_score = [base](double z) { return -base.at_normal_score(-z); };
    out.symmetric = base.symmetric;
    return out;
}

Sample sample_distribution(const QuantileDistribution& dist, std::size_t n, std::uint64_t seed,
                           std::uint64_t stream) {
    if (n < 1) throw DomainError("sample size must be >= 1");
    rng::Stream generator(seed, stream);
    std::vector<double> values(n);
    for (double& v : values) v = dist.quantile(generator.uniform());
    return Sample(std::move(values));
}

}  // namespace dist
}  // namespace gcl
