#pragma once

#include "gcl/distributions.hpp"
#include "gcl/statistic.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace gcl::robust {

/// (1 - eps) F + eps delta_x, or with `symmetric` the two-point version
/// (1 - eps) F + (eps/2)(delta_x + delta_{-x}).
struct ContaminationSpec {
    QuantileDistribution base;
    double x = 0.0;
    std::vector<double> eps_sequence;  ///< empty: default_eps_sequence
    bool symmetric = false;
};

/// The mixture for one eps, with its atoms located on the base's probability
/// scale. Quantiles are found by inverting the mixture CDF piecewise.
class Mixture {
public:
    struct Atom {
        double x;
        double weight;
        double level;       ///< F(x)
        double level_c;     ///< 1 - F(x)
        double normal;      ///< Phi^{-1}(F(x)), +-inf outside the support
        double start;       ///< mixture probability where the atom's mass begins
        double start_c;     ///< 1 - start
        double end_c;       ///< 1 - (start + weight)
    };

    Mixture(const QuantileDistribution& base, double x, double eps, bool symmetric);

    double eps() const noexcept { return eps_; }
    const std::vector<Atom>& atoms() const noexcept { return atoms_; }
    const QuantileDistribution& base() const noexcept { return base_; }

    /// Total atom weight strictly below normal score z of the base.
    double weight_below(double z) const noexcept;

    double quantile(double p) const;

    QuantileDistribution as_distribution() const;

private:
    QuantileDistribution base_;
    double eps_;
    std::vector<Atom> atoms_;
};

/// DomainError unless 0 < eps < 0.5.
QuantileDistribution contaminated_quantile(const ContaminationSpec& spec, double eps);

/// Seven halving steps from min(1e-2, 0.05 min(F(x), 1 - F(x))), taken over
/// both x and -x when `symmetric`.
std::vector<double> default_eps_sequence(const QuantileDistribution& base, double x, bool symmetric = false);

struct InfluenceEstimate {
    double value = 0.0;          ///< extrapolated to eps -> 0
    double raw_quotient = 0.0;   ///< (theta(F_eps) - theta(F)) / eps at the smallest eps
    double error = 0.0;          ///< extrapolation error estimate
    std::vector<double> eps;
    std::vector<double> quotients;
};

/// The statistics with a population functional here: every shape measure
/// plus the L2/HL2/RL2 scales and the mean.
bool has_functional(Statistic s) noexcept;

/// Neville extrapolation of the difference quotients to eps = 0 over the four
/// smallest eps. NonConvergenceError when the quotients at the two smallest
/// eps differ by more than 5% (plus an absolute floor of 1e-6).
InfluenceEstimate influence_estimate(const ContaminationSpec& spec, Statistic statistic);

struct SifComparison {
    double x;
    double sif;
    double iff;
    double tolerance;
    bool equal;
};

/// |SIF - IF| at each point against max(10 x combined error estimate, 1e-6 (1 + |IF|)).
std::vector<SifComparison> compare_sif_if(Statistic statistic, const QuantileDistribution& base,
                                          std::span<const double> points);

/// True when every comparison agrees; DomainError for an asymmetric base.
bool sif_equals_if_check(Statistic statistic, const QuantileDistribution& base, std::span<const double> points);

struct ExpectedGrowth {
    double exponent;
    bool log_correction;    ///< HL: Theta(|x| log(|x|+1)^{(r-1)/2})
    double log_power;       ///< (r - 1)/2 for HL, 0 otherwise
};

/// Orders at Tukey h > 0: Bowley/Ruppert 0, L/RL 1, HL 1 with a log factor,
/// conventional skewness 3 and kurtosis 4.
ExpectedGrowth expected_growth(Statistic s);

struct GrowthOptions {
    std::vector<double> x_grid;  ///< empty: default_x_grid()
    double fit_min = 31.622776601683793;  // 10^1.5
    double fit_max = 100.0;
    std::optional<bool> symmetric;  ///< default: symmetric for kurtosis measures
    bool parallel = true;
};

/// 33 log-spaced points on [1, 100] (16 per decade).
std::vector<double> default_x_grid();

struct GrowthOrderEstimate {
    Statistic statistic;
    double h = 0.0;
    bool symmetric = false;
    double exponent = 0.0;               ///< slope of log|IF| on log|x|
    double log_correction_power = 0.0;   ///< c in log|IF| - log|x| = a + c log log(|x|+1)
    double r_squared = 0.0;
    double log_correction_r_squared = 0.0;
    double x_min = 0.0;
    double x_max = 0.0;
    int points = 0;
    std::vector<double> x;
    std::vector<double> influence;
    std::vector<std::string> failures;  ///< per-cell non-convergence messages
};

/// IF (or SIF) on the grid at T_{g,h} and least-squares fits over the points
/// in [fit_min, fit_max] (at least 8). Cells that fail to converge are
/// recorded and left out of the fit.
GrowthOrderEstimate growth_order(Statistic statistic, const dist::TukeyGH& base, const GrowthOptions& options = {});

/// Exponent within `tolerance` of the expected order; HL needs an exponent
/// above 1 but below the conventional orders and a positive log correction.
bool growth_order_passes(const GrowthOrderEstimate& estimate, double tolerance = 0.3);

/// Conventional skewness/kurtosis, L-, RL-, HL-skewness/kurtosis, Bowley, Ruppert.
std::vector<Statistic> default_robustness_statistics();

std::string growth_report_csv(std::span<const GrowthOrderEstimate> estimates);
nlohmann::json growth_report_json(std::span<const GrowthOrderEstimate> estimates);

}  // namespace gcl::robust
