#include "gcl/gaussian.hpp"

#include "gcl/cache_io.hpp"
#include "gcl/errors.hpp"
#include "gcl/polynomials.hpp"
#include "gcl/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

namespace gcl::gauss {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kLogSqrt2Pi = 0.91893853320467274178;
constexpr double kTruncation = 9.0;

// Wichura, AS241 PPND16.
double ppnd16(double p) {
    const double q = p - 0.5;
    if (std::fabs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        const double num =
            (((((((2509.0809287301226727 * r + 33430.575583588128105) * r + 67265.770927008700853) * r +
                 45921.953931549871457) * r + 13731.693765509461125) * r + 1971.5909503065514427) * r +
              133.14166789178437745) * r + 3.387132872796366608);
        const double den =
            (((((((5226.495278852545925 * r + 28729.085735721942674) * r + 39307.89580009271061) * r +
                 21213.794301586595867) * r + 5394.1960214247511077) * r + 687.1870074920579083) * r +
              42.313330701600911252) * r + 1.0);
        return q * num / den;
    }
    double r = q < 0.0 ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double val;
    if (r <= 5.0) {
        r -= 1.6;
        const double num =
            (((((((7.7454501427834140764e-4 * r + 0.0227238449892691845833) * r + 0.24178072517745061177) * r +
                 1.27045825245236838258) * r + 3.64784832476320460504) * r + 5.7694972214606914055) * r +
              4.6303378461565452959) * r + 1.42343711074968357734);
        const double den =
            (((((((1.05075007164441684324e-9 * r + 5.475938084995344946e-4) * r + 0.0151986665636164571966) * r +
                 0.14810397642748007459) * r + 0.68976733498510000455) * r + 1.6763848301838038494) * r +
              2.05319162663775882187) * r + 1.0);
        val = num / den;
    } else {
        r -= 5.0;
        const double num =
            (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r + 0.0012426609473880784386) * r +
                 0.026532189526576123093) * r + 0.29656057182850489123) * r + 1.7848265399172913358) * r +
              5.4637849111641143699) * r + 6.6579046435011037772);
        const double den =
            (((((((2.04426310338993978564e-15 * r + 1.4215117583164458887e-7) * r + 1.8463183175100546818e-5) * r +
                 7.868691311456132591e-4) * r + 0.0148753612908506148525) * r + 0.13692988092273580531) * r +
              0.59983220655588793769) * r + 1.0);
        val = num / den;
    }
    return q < 0.0 ? -val : val;
}

double log_sf(double x) noexcept { return log_cdf(-x); }

// Order-statistic density kernel exp(log c + (i-1) log Phi + (n-i) log(1-Phi) + log phi).
struct OrderStatisticDensity {
    int i;
    int n;
    double log_coefficient;

    OrderStatisticDensity(int i_, int n_)
        : i(i_), n(n_),
          log_coefficient(std::lgamma(n_ + 1.0) - std::lgamma(static_cast<double>(i_)) -
                          std::lgamma(n_ - i_ + 1.0)) {}

    double operator()(double z) const noexcept {
        double log_density = log_coefficient - 0.5 * z * z - kLogSqrt2Pi;
        if (i > 1) log_density += (i - 1) * log_cdf(z);
        if (n > i) log_density += (n - i) * log_sf(z);
        return std::exp(log_density);
    }
};

// Breakpoints bracketing the bulk of Z_{i:n}: the mode sits near
// Phi^{-1}(i/(n+1)) with spread sqrt(p(1-p)/(n+2)) / phi.
std::vector<double> order_statistic_breakpoints(int i, int n) {
    const double p = static_cast<double>(i) / (n + 1.0);
    const double centre = quantile(p);
    const double spread = std::sqrt(p * (1.0 - p) / (n + 2.0)) / pdf(centre);
    std::vector<double> points{-kTruncation, kTruncation};
    for (double m : {-12.0, -6.0, -3.0, -1.0, 0.0, 1.0, 3.0, 6.0, 12.0}) {
        const double z = centre + m * spread;
        if (z > -kTruncation && z < kTruncation) points.push_back(z);
    }
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    return points;
}

double integrate_order_statistic_power(const OrderStatisticDensity& density, int k,
                                       const std::vector<double>& breakpoints) {
    const auto integrand = [&density, k](double z) { return std::pow(z, k) * density(z); };
    return quad::integrate_pieces(integrand, breakpoints, 1e-12).value;
}

void check_indices(int i, int n) {
    if (n < 1 || i < 1 || i > n) {
        throw IndexError("order statistic index i=" + std::to_string(i) + " outside 1.." + std::to_string(n));
    }
}

}  // namespace

double pdf(double x) noexcept { return std::exp(-0.5 * x * x - kLogSqrt2Pi); }

double cdf(double x) noexcept { return 0.5 * std::erfc(-x * kInvSqrt2); }

double sf(double x) noexcept { return 0.5 * std::erfc(x * kInvSqrt2); }

double log_cdf(double x) noexcept {
    if (x > 0.0) return std::log1p(-sf(x));
    const double c = cdf(x);
    if (c > 0.0) return std::log(c);
    // Mills-ratio asymptote once erfc underflows.
    return -0.5 * x * x - std::log(-x) - kLogSqrt2Pi;
}

double quantile(double u) {
    if (!(u > 0.0 && u < 1.0)) throw DomainError("normal quantile requires 0 < u < 1, got " + std::to_string(u));
    double x = ppnd16(u);
    // One Newton step on the tail that keeps full relative precision.
    const double density = pdf(x);
    if (density > 0.0) {
        const double residual = u <= 0.5 ? cdf(x) - u : (1.0 - u) - sf(x);
        x -= residual / density;
    }
    return x;
}

double quantile_complement(double q) { return -quantile(q); }

double expected_order_statistic_power(int i, int n, int k) {
    check_indices(i, n);
    if (k < 1) throw DomainError("power must be >= 1");
    // Odd powers of the median of an odd sample vanish by symmetry.
    if (k % 2 == 1 && 2 * i == n + 1) return 0.0;
    const OrderStatisticDensity density(i, n);
    return integrate_order_statistic_power(density, k, order_statistic_breakpoints(i, n));
}

OrderStatisticTable OrderStatisticTable::build(int n, int max_power, bool parallel) {
    if (n < 1) throw DomainError("order-statistic table needs n >= 1");
    if (max_power < 1) throw DomainError("order-statistic table needs max_power >= 1");
    const int half = (n + 1) / 2;
    std::vector<double> values(static_cast<std::size_t>(n) * max_power, 0.0);
    // Only i <= (n+1)/2 is integrated; the rest follows from
    // E(Z_{n+1-i:n}^k) = (-1)^k E(Z_{i:n}^k), so antisymmetry holds exactly.
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (int i = 1; i <= half; ++i) {
        const OrderStatisticDensity density(i, n);
        const auto breakpoints = order_statistic_breakpoints(i, n);
        const int mirror = n + 1 - i;
        for (int k = 1; k <= max_power; ++k) {
            double v = 0.0;
            if (!(k % 2 == 1 && mirror == i)) v = integrate_order_statistic_power(density, k, breakpoints);
            values[static_cast<std::size_t>(i - 1) * max_power + (k - 1)] = v;
            values[static_cast<std::size_t>(mirror - 1) * max_power + (k - 1)] = (k % 2 == 0) ? v : -v;
        }
    }
    return OrderStatisticTable(n, max_power, std::move(values));
}

OrderStatisticTable OrderStatisticTable::compute(int n, int max_power) { return build(n, max_power, true); }

OrderStatisticTable OrderStatisticTable::compute_serial(int n, int max_power) {
    return build(n, max_power, false);
}

double OrderStatisticTable::moment(int i, int k) const {
    check_indices(i, n_);
    if (k < 1 || k > max_power_) {
        throw IndexError("power " + std::to_string(k) + " outside 1.." + std::to_string(max_power_));
    }
    return values_[static_cast<std::size_t>(i - 1) * max_power_ + (k - 1)];
}

std::vector<double> OrderStatisticTable::first_moments() const {
    std::vector<double> out(static_cast<std::size_t>(n_));
    for (int i = 1; i <= n_; ++i) out[i - 1] = moment(i, 1);
    return out;
}

std::vector<double> OrderStatisticTable::hermite_expectations(int degree) const {
    if (degree > max_power_) {
        throw IndexError("Hermite degree " + std::to_string(degree) + " needs powers beyond table maximum " +
                         std::to_string(max_power_));
    }
    const auto coefficients = poly::hermite_coefficients(degree);
    std::vector<double> out(static_cast<std::size_t>(n_));
    for (int i = 1; i <= n_; ++i) {
        double acc = coefficients[0];
        for (int k = 1; k <= degree; ++k) {
            if (coefficients[k] != 0.0) acc += coefficients[k] * moment(i, k);
        }
        out[i - 1] = acc;
    }
    return out;
}

nlohmann::json OrderStatisticTable::to_json() const {
    return {{"format", "gcl-order-statistic-table"},
            {"version", kFormatVersion},
            {"n", n_},
            {"max_power", max_power_},
            {"values", values_}};
}

OrderStatisticTable OrderStatisticTable::from_json(const nlohmann::json& doc) {
    if (doc.value("format", "") != "gcl-order-statistic-table" || doc.value("version", 0) != kFormatVersion) {
        throw Error("unsupported order-statistic table format");
    }
    const int n = doc.at("n").get<int>();
    const int max_power = doc.at("max_power").get<int>();
    auto values = doc.at("values").get<std::vector<double>>();
    if (values.size() != static_cast<std::size_t>(n) * max_power) {
        throw Error("order-statistic table has wrong number of values");
    }
    return OrderStatisticTable(n, max_power, std::move(values));
}

TableCache& TableCache::global() {
    static TableCache cache(cache::directory_from_env());
    return cache;
}

std::shared_ptr<const OrderStatisticTable> TableCache::get(int n, int max_power) {
    const std::lock_guard lock(mutex_);
    const auto key = std::make_pair(n, max_power);
    if (auto it = tables_.find(key); it != tables_.end()) return it->second;

    std::shared_ptr<const OrderStatisticTable> table;
    std::optional<std::filesystem::path> file;
    if (directory_) {
        file = *directory_ / ("order_stats_n" + std::to_string(n) + "_k" + std::to_string(max_power) + ".json");
        if (auto doc = cache::read_json(*file)) {
            try {
                table = std::make_shared<const OrderStatisticTable>(OrderStatisticTable::from_json(*doc));
            } catch (const std::exception&) {
                table.reset();
            }
        }
    }
    if (!table) {
        table = std::make_shared<const OrderStatisticTable>(OrderStatisticTable::compute(n, max_power));
        if (file) cache::write_json(*file, table->to_json());
    }
    tables_.emplace(key, table);
    return table;
}

double expected_spacing(int i, int j, int k) {
    if (!(1 <= i && i < j && j <= k)) {
        throw IndexError("expected spacing needs 1 <= i < j <= k, got (" + std::to_string(i) + ", " +
                         std::to_string(j) + ", " + std::to_string(k) + ")");
    }
    const auto table = TableCache::global().get(k, 1);
    return table->moment(j, 1) - table->moment(i, 1);
}

const GaussianSpacings& gaussian_spacings() {
    static const GaussianSpacings spacings{
        expected_spacing(1, 2, 2),
        expected_spacing(1, 2, 3),
        expected_spacing(2, 3, 4),
        expected_spacing(3, 4, 4),
    };
    return spacings;
}

RlConstants rl_polynomial_constants() {
    const auto& d = gaussian_spacings();
    return {1.0 / d.d12_2, 1.0 / d.d12_3, 1.0 + 2.0 * d.d34_4 / d.d23_4, 1.0 / d.d34_4};
}

double rl_kurtosis_scale() {
    const auto& d = gaussian_spacings();
    return d.d12_2 / 5.0 * (3.0 / d.d23_4 + 2.0 / d.d34_4);
}

double rl_kurtosis_offset() {
    const auto& d = gaussian_spacings();
    return 3.0 * d.d12_2 / 5.0 * (1.0 / d.d23_4 - 1.0 / d.d34_4);
}

double rl_skewness_scale() {
    const auto& d = gaussian_spacings();
    return d.d12_2 / d.d12_3;
}

}  // namespace gcl::gauss
