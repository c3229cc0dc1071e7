#pragma once

#include "gcl/sample.hpp"

#include <cstdint>
#include <functional>
#include <string>

namespace gcl {

/// A distribution given by its quantile function F^{-1}: (0,1) -> R.
///
/// `normal_score`, when present, evaluates z -> F^{-1}(Phi(z)) directly. All
/// integrals over u are carried out in that normal-score coordinate, so
/// providing it keeps full precision deep in the tails (Tukey, exponential).
struct QuantileDistribution {
    std::string label;
    std::function<double(double)> quantile;
    std::function<double(double)> normal_score;
    bool symmetric = false;

    double operator()(double u) const { return quantile(u); }

    /// F^{-1}(Phi(z)).
    double at_normal_score(double z) const;

    /// Phi^{-1}(F(x)) by root finding on the normal-score map; +-infinity
    /// outside the support.
    double normal_level(double x) const;

    /// F(x) as a pair (F(x), 1 - F(x)), each accurate in its own tail.
    std::pair<double, double> cdf_pair(double x) const;
};

namespace dist {

struct TukeyGH {
    double g = 0.0;
    double h = 0.0;
};

/// ((e^{gz} - 1)/g) exp(h z^2/2); z exp(h z^2/2) when g = 0.
double tukey_gh_transform(double z, const TukeyGH& params);

/// transform(Phi^{-1}(u)); DomainError at u in {0, 1}.
double tukey_gh_quantile(double u, const TukeyGH& params);

QuantileDistribution gaussian(double mean = 0.0, double sd = 1.0);
QuantileDistribution uniform(double a = 0.0, double b = 1.0);
QuantileDistribution exponential(double rate = 1.0);
QuantileDistribution tukey_gh(const TukeyGH& params);

/// Distribution of -X.
QuantileDistribution reflected(const QuantileDistribution& base);

/// n inverse-CDF draws from the (seed, stream) generator.
Sample sample_distribution(const QuantileDistribution& dist, std::size_t n, std::uint64_t seed,
                           std::uint64_t stream = 0);

}  // namespace dist
}  // namespace gcl
