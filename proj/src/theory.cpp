#include "gcl/theory.hpp"

#include "gcl/errors.hpp"
#include "gcl/gaussian.hpp"
#include "gcl/polynomials.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace gcl::theory {

namespace {

double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double out = 1.0;
    for (int j = 1; j <= k; ++j) out = out * (n - k + j) / j;
    return std::round(out);
}

}  // namespace

double normal_score_of(double u, double uc) {
    if (!(u > 0.0)) return -std::numeric_limits<double>::infinity();
    if (!(uc > 0.0)) return std::numeric_limits<double>::infinity();
    return u <= uc ? gauss::quantile(u) : gauss::quantile_complement(uc);
}

std::string_view to_string(MomentFamily f) noexcept {
    switch (f) {
        case MomentFamily::L: return "L";
        case MomentFamily::HL: return "HL";
        case MomentFamily::RL: return "RL";
    }
    return "L";
}

std::vector<double> l_moment_order_statistic_coefficients(int r) {
    if (r < 1) throw DomainError("moment order must be >= 1");
    std::vector<double> a(static_cast<std::size_t>(r), 0.0);
    for (int k = 0; k <= r - 1; ++k) a[r - k - 1] = (k % 2 == 0 ? 1.0 : -1.0) * binomial(r - 1, k) / r;
    return a;
}

std::vector<double> rl_moment_order_statistic_coefficients(int r, bool unit_spacings) {
    if (r < 1) throw DomainError("moment order must be >= 1");
    std::vector<double> a(static_cast<std::size_t>(r), 0.0);
    if (r == 1) {
        a[0] = 1.0;
        return a;
    }
    for (int k = 0; k <= r - 2; ++k) {
        const int upper = r - k;
        const double spacing = unit_spacings ? 1.0 : gauss::expected_spacing(upper - 1, upper, r);
        const double c = (k % 2 == 0 ? 1.0 : -1.0) * binomial(r - 2, k) / (r * spacing);
        a[upper - 1] += c;
        a[upper - 2] -= c;
    }
    return a;
}

MomentWeight::MomentWeight(MomentFamily family, int r) : family_(family), r_(r) {
    if (r < 1) throw DomainError("moment order must be >= 1");
    if (family == MomentFamily::L) a_ = l_moment_order_statistic_coefficients(r);
    if (family == MomentFamily::RL) a_ = rl_moment_order_statistic_coefficients(r);
    if (!a_.empty()) {
        // r C(r-1, j-1) u^{j-1} (1-u)^{r-j} expanded in powers of u.
        power_.assign(static_cast<std::size_t>(r), 0.0);
        for (int j = 1; j <= r; ++j) {
            const double scale = a_[j - 1] * r * binomial(r - 1, j - 1);
            for (int l = 0; l <= r - j; ++l) {
                power_[j - 1 + l] += scale * (l % 2 == 0 ? 1.0 : -1.0) * binomial(r - j, l);
            }
        }
    }
}

double MomentWeight::operator()(double u, double uc) const {
    if (family_ == MomentFamily::HL) {
        if (r_ == 1) return 1.0;
        if (!(u > 0.0 && uc > 0.0)) {
            // He_{r-1}(+-inf) only matters through measure-zero endpoints.
            return 0.0;
        }
        return poly::hermite(r_ - 1, normal_score_of(u, uc));
    }
    (void)uc;
    return poly::evaluate_power_basis(power_, u);
}

double MomentWeight::at_normal_score(double z) const {
    if (family_ == MomentFamily::HL) return poly::hermite(r_ - 1, z);
    return (*this)(gauss::cdf(z), gauss::sf(z));
}

quad::Result integrate_normal_scores(const std::function<double(double)>& g, std::span<const double> breakpoints,
                                     const TailOptions& options) {
    const double core = -gauss::quantile(options.start_eps);
    std::vector<double> extra(breakpoints.begin(), breakpoints.end());
    std::sort(extra.begin(), extra.end());

    const auto integrate_split = [&](double a, double b) {
        std::vector<double> points{a};
        for (double p : extra) {
            if (p > a && p < b) points.push_back(p);
        }
        points.push_back(b);
        return quad::integrate_pieces(g, points, options.quad_tolerance, options.max_depth);
    };

    quad::Result total = integrate_split(-core, core);
    double eps = options.start_eps;
    double inner = core;
    int quiet = 0;
    while (quiet < options.quiet_slices) {
        eps *= 0.5;
        const double outer = std::min(-gauss::quantile(eps), options.z_limit);
        const auto upper = integrate_split(inner, outer);
        const auto lower = integrate_split(-outer, -inner);
        total.value += upper.value + lower.value;
        total.error += upper.error + lower.error;
        const double threshold = options.abs_tol + options.rel_tol * std::fabs(total.value);
        quiet = (std::fabs(upper.value) <= threshold && std::fabs(lower.value) <= threshold) ? quiet + 1 : 0;
        if (quiet < options.quiet_slices && outer >= options.z_limit) {
            throw NonConvergenceError("tail integral did not settle before normal score " +
                                      std::to_string(options.z_limit));
        }
        inner = outer;
    }
    return total;
}

double theoretical_moment(const QuantileDistribution& dist, MomentFamily family, int r) {
    const MomentWeight weight(family, r);
    const auto g = [&](double z) {
        const double phi = gauss::pdf(z);
        if (phi == 0.0) return 0.0;
        return dist.at_normal_score(z) * weight.at_normal_score(z) * phi;
    };
    const double zero = 0.0;
    return integrate_normal_scores(g, std::span(&zero, 1)).value;
}

double theoretical_ratio(const QuantileDistribution& dist, MomentFamily family, int r) {
    const double scale = theoretical_moment(dist, family, 2);
    if (!(scale > 0.0)) throw ZeroScaleError("theoretical scale is not positive");
    return theoretical_moment(dist, family, r) / scale;
}

ConventionalMoments theoretical_conventional(const QuantileDistribution& dist) {
    const double zero = 0.0;
    const auto moment = [&](double centre, int k) {
        const auto g = [&](double z) {
            const double phi = gauss::pdf(z);
            if (phi == 0.0) return 0.0;
            return std::pow(dist.at_normal_score(z) - centre, k) * phi;
        };
        return integrate_normal_scores(g, std::span(&zero, 1)).value;
    };
    const double mean = moment(0.0, 1);
    const double m2 = moment(mean, 2);
    if (!(m2 > 0.0)) throw ZeroScaleError("theoretical variance is not positive");
    const double m3 = moment(mean, 3);
    const double m4 = moment(mean, 4);
    return {mean, m2, m3 / std::pow(m2, 1.5), m4 / (m2 * m2) - 3.0};
}

double theoretical_bowley(const QuantileDistribution& dist, double p) {
    if (!(p > 0.0 && p < 0.5)) throw DomainError("Bowley skewness needs 0 < p < 0.5");
    const double lower = dist.quantile(p);
    const double median = dist.quantile(0.5);
    const double upper = dist.quantile(1.0 - p);
    return ((upper - median) - (median - lower)) / (upper - lower);
}

double theoretical_ruppert(const QuantileDistribution& dist, double p1, double p2) {
    if (!(p1 > 0.0 && p1 < p2 && p2 < 0.5)) throw DomainError("Ruppert kurtosis needs 0 < p1 < p2 < 0.5");
    return (dist.quantile(1.0 - p1) - dist.quantile(p1)) / (dist.quantile(1.0 - p2) - dist.quantile(p2));
}

double theoretical_statistic(const QuantileDistribution& dist, Statistic s) {
    switch (s) {
        case Statistic::Mean: return theoretical_moment(dist, MomentFamily::L, 1);
        case Statistic::Sd: return std::sqrt(theoretical_conventional(dist).variance);
        case Statistic::Skewness: return theoretical_conventional(dist).skewness;
        case Statistic::Kurtosis: return theoretical_conventional(dist).kurtosis;
        case Statistic::L2: return theoretical_moment(dist, MomentFamily::L, 2);
        case Statistic::LSkewness: return theoretical_ratio(dist, MomentFamily::L, 3);
        case Statistic::LKurtosis: return theoretical_ratio(dist, MomentFamily::L, 4);
        case Statistic::HL2: return theoretical_moment(dist, MomentFamily::HL, 2);
        case Statistic::HLSkewness: return theoretical_ratio(dist, MomentFamily::HL, 3);
        case Statistic::HLKurtosis: return theoretical_ratio(dist, MomentFamily::HL, 4);
        case Statistic::RL2: return theoretical_moment(dist, MomentFamily::RL, 2);
        case Statistic::RLSkewness: return theoretical_ratio(dist, MomentFamily::RL, 3);
        case Statistic::RLKurtosis: return theoretical_ratio(dist, MomentFamily::RL, 4);
        case Statistic::Bowley: return theoretical_bowley(dist);
        case Statistic::Ruppert: return theoretical_ruppert(dist);
    }
    return 0.0;
}

}  // namespace gcl::theory
