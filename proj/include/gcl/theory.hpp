#pragma once

#include "gcl/distributions.hpp"
#include "gcl/quadrature.hpp"
#include "gcl/statistic.hpp"

#include <functional>
#include <span>
#include <string_view>
#include <vector>

namespace gcl::theory {

enum class MomentFamily { L, HL, RL };

std::string_view to_string(MomentFamily f) noexcept;

/// Weight J_r of the L-functional theta_r = int_0^1 F^{-1}(u) J_r(u) du.
///
/// L and RL weights come from coefficients a_j on the expected order
/// statistics E(X_{j:r}): J_r(u) = sum_j a_j r C(r-1, j-1) u^{j-1} (1-u)^{r-j}.
/// HL weights are He_{r-1}(Phi^{-1}(u)), which uses 1-u in the upper tail.
class MomentWeight {
public:
    MomentWeight(MomentFamily family, int r);

    MomentFamily family() const noexcept { return family_; }
    int order() const noexcept { return r_; }

    /// J_r(u) with uc = 1 - u supplied by the caller.
    double operator()(double u, double uc) const;

    /// J_r(Phi(z)).
    double at_normal_score(double z) const;

    /// a_1..a_r (empty for HL).
    const std::vector<double>& order_statistic_coefficients() const noexcept { return a_; }

private:
    MomentFamily family_;
    int r_;
    std::vector<double> a_;
    std::vector<double> power_;  // J_r in powers of u
};

/// Phi^{-1} from whichever of u, uc = 1 - u is smaller; +-inf at the ends.
double normal_score_of(double u, double uc);

/// Coefficients on E(X_{j:r}) of lambda_r (Hosking's form).
std::vector<double> l_moment_order_statistic_coefficients(int r);

/// Coefficients on E(X_{j:r}) of rho_r built from the Gaussian expected
/// spacings delta_{j-1,j:r}(Phi); passing unit spacings gives the L-moment ones.
std::vector<double> rl_moment_order_statistic_coefficients(int r, bool unit_spacings = false);

struct TailOptions {
    double start_eps = 1e-6;   ///< core interval is Phi^{-1}(eps) .. Phi^{-1}(1 - eps)
    double abs_tol = 1e-12;    ///< a tail slice is negligible below abs_tol + rel_tol |total|
    double rel_tol = 0.0;
    double z_limit = 37.5;     ///< give up (NonConvergenceError) beyond this normal score
    int quiet_slices = 2;      ///< consecutive negligible slices needed to stop
    double quad_tolerance = 1e-12;
    unsigned max_depth = 12;
};

/// int g(z) dz over the real line, where g already contains phi(z): a core
/// interval plus tail slices at halving tail probabilities until they stop
/// contributing. `breakpoints` are extra normal scores where g has kinks or
/// jumps.
quad::Result integrate_normal_scores(const std::function<double(double)>& g,
                                     std::span<const double> breakpoints = {}, const TailOptions& options = {});

/// theta_r(F) for the family; NonConvergenceError when the tails do not settle.
double theoretical_moment(const QuantileDistribution& dist, MomentFamily family, int r);

/// theta_r(F) / theta_2(F).
double theoretical_ratio(const QuantileDistribution& dist, MomentFamily family, int r);

struct ConventionalMoments {
    double mean;
    double variance;
    double skewness;
    double kurtosis;  ///< excess
};

ConventionalMoments theoretical_conventional(const QuantileDistribution& dist);

double theoretical_bowley(const QuantileDistribution& dist, double p = 0.25);
double theoretical_ruppert(const QuantileDistribution& dist, double p1 = 0.1, double p2 = 0.3);

/// Population value of any Statistic (the L2/HL2/RL2 scales are unnormalised
/// moments of order 2; sd is the square root of the variance).
double theoretical_statistic(const QuantileDistribution& dist, Statistic s);

}  // namespace gcl::theory
