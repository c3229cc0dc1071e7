#pragma once

#include "gcl/gaussian.hpp"
#include "gcl/sample.hpp"
#include "gcl/statistic.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <tuple>
#include <vector>

namespace gcl {

/// Coefficients c_{r,i} of the L-statistics (1/n) sum_i c_{r,i} X_{i:n},
/// r = 1..max_r, for one sample size.
class LStatisticWeights {
public:
    LStatisticWeights(int n, int max_r) : n_(n), max_r_(max_r), c_(static_cast<std::size_t>(n) * max_r, 0.0) {}

    int n() const noexcept { return n_; }
    int max_r() const noexcept { return max_r_; }

    std::span<double> row(int r) { return {c_.data() + static_cast<std::size_t>(r - 1) * n_, std::size_t(n_)}; }
    std::span<const double> row(int r) const {
        return {c_.data() + static_cast<std::size_t>(r - 1) * n_, std::size_t(n_)};
    }

    /// (1/n) sum_i c_{r,i} x_i over already-sorted data.
    double apply(int r, std::span<const double> sorted) const;

private:
    int n_;
    int max_r_;
    std::vector<double> c_;
};

/// Which L-statistic estimates the HL-moments.
enum class HlEstimator {
    Sample,  ///< E(He_{r-1}(Z_{i:n})) weights (the default "sample HL-moments")
    BH,      ///< Brown-Hettmansperger: n * integral of He_{r-1}(Phi^{-1}(u)) over ((i-1)/n, i/n)
    Plugin,  ///< He_{r-1}(Phi^{-1}(i/(n+1)))
};

std::string_view to_string(HlEstimator e) noexcept;
HlEstimator parse_hl_estimator(std::string_view id);

// --- weight builders ------------------------------------------------------

/// Unbiased sample L-moment weights (probability-weighted-moment form).
LStatisticWeights l_moment_weights(int n, int max_r);
LStatisticWeights hl_weights(HlEstimator estimator, int n, int max_r);
LStatisticWeights hl_sample_weights(const gauss::OrderStatisticTable& table, int max_r);
LStatisticWeights hl_bh_weights(int n, int max_r);
LStatisticWeights hl_plugin_weights(int n, int max_r);

// --- sample estimators ----------------------------------------------------

struct ConventionalShape {
    double skewness;
    double kurtosis;  ///< excess kurtosis
};

/// Divide-by-n moment skewness and excess kurtosis; DegenerateSampleError if
/// all values are equal.
ConventionalShape conventional_sample_skewness_kurtosis(const Sample& s);

/// lambda_hat_{n,1..max_r}; InsufficientSampleError when n < max_r.
std::vector<double> sample_l_moments(const Sample& s, int max_r);

struct ShapeRatios {
    double skewness;
    double kurtosis;
};

/// (lambda_hat_3 / lambda_hat_2, lambda_hat_4 / lambda_hat_2).
ShapeRatios sample_l_moment_ratios(const Sample& s);

/// eta_hat_{n,1..max_r} with E(He_{r-1}(Z_{i:n})) weights; no bias correction.
std::vector<double> sample_hl_moments(const Sample& s, int max_r);
std::vector<double> sample_hl_moments_bh(const Sample& s, int max_r);
std::vector<double> sample_hl_moments_plugin(const Sample& s, int max_r);

/// Monte-Carlo mean of the HL ratio eta_hat_r / eta_hat_2 over `replicates`
/// standard-Gaussian samples of size n (replicate j uses stream j of `seed`).
/// Cached per (n, replicates, seed, estimator); persisted under $GCL_CACHE_DIR.
double hl_bias_correction(int n, int r, int replicates, std::uint64_t seed,
                          HlEstimator estimator = HlEstimator::Sample);

struct HlBias {
    int n;
    int replicates;
    std::uint64_t seed;
    HlEstimator estimator;
    std::vector<double> mean_ratio;  ///< index r-1, r = 1..4
};

/// All four mean ratios at once (OpenMP over replicates, serial reduction).
HlBias estimate_hl_bias(int n, int replicates, std::uint64_t seed, HlEstimator estimator, bool parallel = true);

inline constexpr int kDefaultBiasReplicates = 10000;
inline constexpr std::uint64_t kDefaultBiasSeed = 20180301;

/// Bias-corrected HL-skewness and HL-kurtosis.
ShapeRatios sample_hl_moment_ratios(const Sample& s, HlEstimator estimator = HlEstimator::Sample,
                                    int replicates = kDefaultBiasReplicates,
                                    std::uint64_t seed = kDefaultBiasSeed);

struct RlMoments {
    double location;  ///< rho_hat_1
    double scale;     ///< rho_hat_2
    double skewness;  ///< rho_hat*_3
    double kurtosis;  ///< rho_hat*_4
};

RlMoments sample_rl_moments(const Sample& s);
RlMoments rl_from_l_moments(std::span<const double> l_moments);

/// Empirical quantile at p: linear interpolation of the order statistics at
/// position p(n+1), clamped to [X_{1:n}, X_{n:n}].
double empirical_quantile(std::span<const double> sorted, double p);

double bowley_skewness(const Sample& s, double p = 0.25);
double ruppert_kurtosis(const Sample& s, double p1 = 0.1, double p2 = 0.3);

// --- full summary ---------------------------------------------------------

struct SummaryStatistics {
    std::size_t n = 0;
    double mean = 0.0;
    double sd = 0.0;  ///< divide-by-n convention
    double skewness = 0.0;
    double kurtosis = 0.0;
    double l2 = 0.0;
    double l_skewness = 0.0;
    double l_kurtosis = 0.0;
    double hl2 = 0.0;
    double hl_skewness = 0.0;
    double hl_kurtosis = 0.0;
    double rl2 = 0.0;
    double rl_skewness = 0.0;
    double rl_kurtosis = 0.0;
    double bowley = 0.0;   ///< NaN when the interquartile range is zero
    double ruppert = 0.0;  ///< NaN when the inner interfractile range is zero

    double get(Statistic s) const noexcept;
};

struct SummaryOptions {
    HlEstimator hl_estimator = HlEstimator::Sample;
    int bias_replicates = kDefaultBiasReplicates;
    std::uint64_t bias_seed = kDefaultBiasSeed;

    auto key() const { return std::tuple(static_cast<int>(hl_estimator), bias_replicates, bias_seed); }
};

/// Everything compute_summary needs for one sample size: weight tables and
/// HL bias terms. Immutable once built.
struct SummaryContext {
    int n;
    SummaryOptions options;
    LStatisticWeights l_weights;
    LStatisticWeights hl_weights;
    double hl_bias3;
    double hl_bias4;

    static SummaryContext build(int n, const SummaryOptions& options);
};

/// Thread-safe store of contexts keyed by (n, options).
class ContextCache {
public:
    static ContextCache& global();
    std::shared_ptr<const SummaryContext> get(int n, const SummaryOptions& options);

private:
    std::mutex mutex_;
    std::map<std::tuple<int, int, int, std::uint64_t>, std::shared_ptr<const SummaryContext>> contexts_;
};

inline constexpr std::size_t kMinSummarySize = 8;

/// Every field of SummaryStatistics; DegenerateSampleError (tagged with
/// `variable_id`) for constant samples, InsufficientSampleError for n < 8.
SummaryStatistics compute_summary(const Sample& s, const SummaryContext& context,
                                  const std::string& variable_id = {});
SummaryStatistics compute_summary(const Sample& s, const SummaryOptions& options = {},
                                  const std::string& variable_id = {});

}  // namespace gcl
