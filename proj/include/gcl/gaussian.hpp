#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <json.hpp>

namespace gcl::gauss {

double pdf(double x) noexcept;
double cdf(double x) noexcept;
/// Upper tail 1 - Phi(x), accurate for large x.
double sf(double x) noexcept;
double log_cdf(double x) noexcept;

/// Phi^{-1}(u): Wichura's AS241 rational approximation followed by one
/// Newton step. Throws DomainError unless 0 < u < 1.
double quantile(double u);

/// Phi^{-1}(1 - q) for a small upper-tail probability q, without forming 1 - q.
double quantile_complement(double q);

/// E(Z_{i:n}^k) for standard Gaussian order statistics, by adaptive
/// Gauss-Kronrod quadrature on [-9, 9] with a log-space Beta weight.
double expected_order_statistic_power(int i, int n, int k);

/// Immutable table of E(Z_{i:n}^k), i = 1..n, k = 1..max_power.
class OrderStatisticTable {
public:
    static constexpr int kFormatVersion = 1;

    /// Parallel construction over i (OpenMP).
    static OrderStatisticTable compute(int n, int max_power);
    /// Single-threaded reference construction.
    static OrderStatisticTable compute_serial(int n, int max_power);

    int n() const noexcept { return n_; }
    int max_power() const noexcept { return max_power_; }

    /// E(Z_{i:n}^k) with 1-based i.
    double moment(int i, int k) const;

    /// E(Z_{i:n}) for i = 1..n.
    std::vector<double> first_moments() const;

    /// E(He_degree(Z_{i:n})) for i = 1..n; needs degree <= max_power.
    std::vector<double> hermite_expectations(int degree) const;

    nlohmann::json to_json() const;
    static OrderStatisticTable from_json(const nlohmann::json& doc);

private:
    OrderStatisticTable(int n, int max_power, std::vector<double> values)
        : n_(n), max_power_(max_power), values_(std::move(values)) {}

    static OrderStatisticTable build(int n, int max_power, bool parallel);

    int n_;
    int max_power_;
    std::vector<double> values_;  // row i-1, column k-1
};

/// Process-wide store of order-statistic tables keyed by (n, max_power).
/// Completed tables are immutable and shared; when a cache directory is
/// configured they are also persisted as versioned JSON.
class TableCache {
public:
    explicit TableCache(std::optional<std::filesystem::path> directory = std::nullopt)
        : directory_(std::move(directory)) {}

    /// Cache rooted at $GCL_CACHE_DIR when set, memory-only otherwise.
    static TableCache& global();

    std::shared_ptr<const OrderStatisticTable> get(int n, int max_power);

    const std::optional<std::filesystem::path>& directory() const noexcept { return directory_; }

private:
    std::optional<std::filesystem::path> directory_;
    std::mutex mutex_;
    std::map<std::pair<int, int>, std::shared_ptr<const OrderStatisticTable>> tables_;
};

/// delta_{i,j:k}(Phi) = E(Z_{j:k}) - E(Z_{i:k}); requires 1 <= i < j <= k.
double expected_spacing(int i, int j, int k);

/// The four Gaussian spacings the RL-moment transforms of orders 2..4 need.
struct GaussianSpacings {
    double d12_2;  // delta_{1,2:2}
    double d12_3;  // delta_{1,2:3}
    double d23_4;  // delta_{2,3:4}
    double d34_4;  // delta_{3,4:4}
};
const GaussianSpacings& gaussian_spacings();

/// Constants of the RL weight polynomials R_1..R_3:
/// R_1 = c1 P*_1, R_2 = c2 P*_2,
/// R_3 = c4 {(6 c3 + 2) u^3 - 3 (3 c3 + 1) u^2 + (3 c3 + 3) u - 1}.
struct RlConstants {
    double c1;
    double c2;
    double c3;
    double c4;
};
RlConstants rl_polynomial_constants();

/// rho*_4 = scale * lambda*_4 - offset.
double rl_kurtosis_scale();
double rl_kurtosis_offset();
/// delta_{1,2:2}(Phi) / delta_{1,2:3}(Phi), the L- to RL-skewness factor.
double rl_skewness_scale();

}  // namespace gcl::gauss
