#include "gcl/moments.hpp"

#include "gcl/cache_io.hpp"
#include "gcl/errors.hpp"
#include "gcl/polynomials.hpp"
#include "gcl/rng.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <numeric>
#include <optional>

namespace gcl {

namespace {

void require_size(const Sample& s, std::size_t minimum, const char* what) {
    if (s.size() < minimum) {
        throw InsufficientSampleError(std::string(what) + " needs at least " + std::to_string(minimum) +
                                      " observations, got " + std::to_string(s.size()));
    }
}

void require_not_constant(const Sample& s, const std::string& variable_id = {}) {
    const auto sorted = s.sorted();
    if (sorted.empty() || sorted.front() == sorted.back()) {
        throw DegenerateSampleError("all observations are equal", variable_id);
    }
}

double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double out = 1.0;
    for (int j = 1; j <= k; ++j) out = out * (n - k + j) / j;
    return std::round(out);
}

std::vector<double> apply_all(const LStatisticWeights& w, std::span<const double> sorted) {
    std::vector<double> out(static_cast<std::size_t>(w.max_r()));
    for (int r = 1; r <= w.max_r(); ++r) out[r - 1] = w.apply(r, sorted);
    return out;
}

struct BiasKey {
    int n;
    int replicates;
    std::uint64_t seed;
    int estimator;
    auto operator<=>(const BiasKey&) const = default;
};

std::mutex bias_mutex;
std::map<BiasKey, HlBias>& bias_store() {
    static std::map<BiasKey, HlBias> store;
    return store;
}

const HlBias& cached_bias(int n, int replicates, std::uint64_t seed, HlEstimator estimator) {
    const std::lock_guard lock(bias_mutex);
    const BiasKey key{n, replicates, seed, static_cast<int>(estimator)};
    auto& store = bias_store();
    if (auto it = store.find(key); it != store.end()) return it->second;

    std::optional<std::filesystem::path> file;
    if (auto dir = cache::directory_from_env()) {
        file = *dir / ("hl_bias_n" + std::to_string(n) + "_R" + std::to_string(replicates) + "_s" +
                       std::to_string(seed) + "_" + std::string(to_string(estimator)) + ".json");
        if (auto doc = cache::read_json(*file)) {
            if (doc->value("format", "") == "gcl-hl-bias" && doc->value("version", 0) == 1) {
                HlBias bias{n, replicates, seed, estimator, doc->at("mean_ratio").get<std::vector<double>>()};
                return store.emplace(key, std::move(bias)).first->second;
            }
        }
    }
    HlBias bias = estimate_hl_bias(n, replicates, seed, estimator);
    if (file) {
        cache::write_json(*file, {{"format", "gcl-hl-bias"},
                                  {"version", 1},
                                  {"n", n},
                                  {"replicates", replicates},
                                  {"seed", seed},
                                  {"estimator", std::string(to_string(estimator))},
                                  {"mean_ratio", bias.mean_ratio}});
    }
    return store.emplace(key, std::move(bias)).first->second;
}

}  // namespace

double LStatisticWeights::apply(int r, std::span<const double> sorted) const {
    const auto c = row(r);
    double acc = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) acc += c[i] * sorted[i];
    return acc / n_;
}

std::string_view to_string(HlEstimator e) noexcept {
    switch (e) {
        case HlEstimator::Sample: return "sample";
        case HlEstimator::BH: return "bh";
        case HlEstimator::Plugin: return "plugin";
    }
    return "sample";
}

HlEstimator parse_hl_estimator(std::string_view id) {
    if (id == "sample") return HlEstimator::Sample;
    if (id == "bh") return HlEstimator::BH;
    if (id == "plugin") return HlEstimator::Plugin;
    throw DomainError("unknown HL estimator '" + std::string(id) + "'; expected sample, bh or plugin");
}

LStatisticWeights l_moment_weights(int n, int max_r) {
    if (n < max_r) {
        throw InsufficientSampleError("sample L-moments of order " + std::to_string(max_r) + " need n >= " +
                                      std::to_string(max_r));
    }
    LStatisticWeights w(n, max_r);
    // b_k = (1/n) sum_i [prod_{j=1..k} (i-j)/(n-j)] X_{i:n};
    // lambda_{m+1} = sum_k (-1)^{m-k} C(m,k) C(m+k,k) b_k.
    std::vector<double> pwm(static_cast<std::size_t>(n) * max_r);
    for (int i = 1; i <= n; ++i) {
        double v = 1.0;
        for (int k = 0; k < max_r; ++k) {
            if (k > 0) v *= static_cast<double>(i - k) / (n - k);
            pwm[static_cast<std::size_t>(k) * n + (i - 1)] = v;
        }
    }
    for (int r = 1; r <= max_r; ++r) {
        const int m = r - 1;
        auto c = w.row(r);
        for (int k = 0; k <= m; ++k) {
            const double coef = ((m - k) % 2 == 0 ? 1.0 : -1.0) * binomial(m, k) * binomial(m + k, k);
            for (int i = 0; i < n; ++i) c[i] += coef * pwm[static_cast<std::size_t>(k) * n + i];
        }
    }
    return w;
}

LStatisticWeights hl_sample_weights(const gauss::OrderStatisticTable& table, int max_r) {
    LStatisticWeights w(table.n(), max_r);
    for (int r = 1; r <= max_r; ++r) {
        const auto e = table.hermite_expectations(r - 1);
        std::copy(e.begin(), e.end(), w.row(r).begin());
    }
    return w;
}

LStatisticWeights hl_bh_weights(int n, int max_r) {
    LStatisticWeights w(n, max_r);
    std::vector<double> z(static_cast<std::size_t>(n) + 1);
    z[0] = -std::numeric_limits<double>::infinity();
    z[n] = std::numeric_limits<double>::infinity();
    for (int i = 1; i < n; ++i) {
        // Take Phi^{-1} from the nearer tail so both ends keep precision.
        z[i] = (2 * i <= n) ? gauss::quantile(static_cast<double>(i) / n)
                            : gauss::quantile_complement(static_cast<double>(n - i) / n);
    }
    std::fill(w.row(1).begin(), w.row(1).end(), 1.0);
    for (int r = 2; r <= max_r; ++r) {
        // d/dz[-He_{r-2}(z) phi(z)] = He_{r-1}(z) phi(z)
        const auto antiderivative = [r](double x) {
            if (std::isinf(x)) return 0.0;
            return -poly::hermite(r - 2, x) * gauss::pdf(x);
        };
        auto c = w.row(r);
        for (int i = 1; i <= n; ++i) c[i - 1] = n * (antiderivative(z[i]) - antiderivative(z[i - 1]));
    }
    return w;
}

LStatisticWeights hl_plugin_weights(int n, int max_r) {
    LStatisticWeights w(n, max_r);
    for (int i = 1; i <= n; ++i) {
        const double z = gauss::quantile(static_cast<double>(i) / (n + 1.0));
        const auto h = poly::hermite_sequence(max_r - 1, z);
        for (int r = 1; r <= max_r; ++r) w.row(r)[i - 1] = h[r - 1];
    }
    return w;
}

LStatisticWeights hl_weights(HlEstimator estimator, int n, int max_r) {
    if (n < 2) throw InsufficientSampleError("sample HL-moments need n >= 2");
    switch (estimator) {
        case HlEstimator::Sample:
            return hl_sample_weights(*gauss::TableCache::global().get(n, std::max(3, max_r - 1)), max_r);
        case HlEstimator::BH: return hl_bh_weights(n, max_r);
        case HlEstimator::Plugin: return hl_plugin_weights(n, max_r);
    }
    return hl_plugin_weights(n, max_r);
}

ConventionalShape conventional_sample_skewness_kurtosis(const Sample& s) {
    require_size(s, 2, "conventional skewness/kurtosis");
    require_not_constant(s);
    const auto x = s.values();
    const double n = static_cast<double>(x.size());
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : x) {
        const double d = v - mean;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    return {m3 / std::pow(m2, 1.5), m4 / (m2 * m2) - 3.0};
}

std::vector<double> sample_l_moments(const Sample& s, int max_r) {
    if (max_r < 1) throw DomainError("max_r must be >= 1");
    require_size(s, static_cast<std::size_t>(max_r), "sample L-moments");
    return apply_all(l_moment_weights(static_cast<int>(s.size()), max_r), s.sorted());
}

ShapeRatios sample_l_moment_ratios(const Sample& s) {
    const auto l = sample_l_moments(s, 4);
    if (!(l[1] > 0.0)) throw ZeroScaleError("L-scale is zero");
    return {l[2] / l[1], l[3] / l[1]};
}

std::vector<double> sample_hl_moments(const Sample& s, int max_r) {
    require_size(s, 2, "sample HL-moments");
    return apply_all(hl_weights(HlEstimator::Sample, static_cast<int>(s.size()), max_r), s.sorted());
}

std::vector<double> sample_hl_moments_bh(const Sample& s, int max_r) {
    require_size(s, 2, "sample HL-moments");
    return apply_all(hl_bh_weights(static_cast<int>(s.size()), max_r), s.sorted());
}

std::vector<double> sample_hl_moments_plugin(const Sample& s, int max_r) {
    require_size(s, 2, "sample HL-moments");
    return apply_all(hl_plugin_weights(static_cast<int>(s.size()), max_r), s.sorted());
}

HlBias estimate_hl_bias(int n, int replicates, std::uint64_t seed, HlEstimator estimator, bool parallel) {
    if (n < 2) throw InsufficientSampleError("HL bias needs n >= 2");
    if (replicates < 1) throw DomainError("HL bias needs at least one replicate");
    constexpr int kMaxR = 4;
    const auto weights = hl_weights(estimator, n, kMaxR);
    std::vector<double> ratios(static_cast<std::size_t>(replicates) * kMaxR);
#pragma omp parallel if (parallel)
    {
        std::vector<double> draws(static_cast<std::size_t>(n));
#pragma omp for schedule(static)
        for (int j = 0; j < replicates; ++j) {
            rng::Stream stream(seed, static_cast<std::uint64_t>(j));
            for (double& v : draws) v = stream.normal();
            std::sort(draws.begin(), draws.end());
            const double scale = weights.apply(2, draws);
            for (int r = 1; r <= kMaxR; ++r) {
                ratios[static_cast<std::size_t>(j) * kMaxR + (r - 1)] = weights.apply(r, draws) / scale;
            }
        }
    }
    std::vector<double> mean(kMaxR, 0.0);
    for (int j = 0; j < replicates; ++j) {
        for (int r = 0; r < kMaxR; ++r) mean[r] += ratios[static_cast<std::size_t>(j) * kMaxR + r];
    }
    for (double& m : mean) m /= replicates;
    return {n, replicates, seed, estimator, std::move(mean)};
}

double hl_bias_correction(int n, int r, int replicates, std::uint64_t seed, HlEstimator estimator) {
    if (r < 1 || r > 4) throw DomainError("HL bias is tabulated for orders 1..4");
    return cached_bias(n, replicates, seed, estimator).mean_ratio[r - 1];
}

ShapeRatios sample_hl_moment_ratios(const Sample& s, HlEstimator estimator, int replicates, std::uint64_t seed) {
    require_size(s, 2, "sample HL-moment ratios");
    const int n = static_cast<int>(s.size());
    const auto eta = apply_all(hl_weights(estimator, n, 4), s.sorted());
    if (!(eta[1] > 0.0)) throw ZeroScaleError("HL-scale is zero");
    const auto& bias = cached_bias(n, replicates, seed, estimator);
    return {eta[2] / eta[1] - bias.mean_ratio[2], eta[3] / eta[1] - bias.mean_ratio[3]};
}

RlMoments rl_from_l_moments(std::span<const double> l) {
    if (l.size() < 4) throw DomainError("RL-moments need L-moments of orders 1..4");
    if (!(l[1] > 0.0)) throw ZeroScaleError("L-scale is zero");
    const auto& d = gauss::gaussian_spacings();
    const double l_kurt = l[3] / l[1];
    return {l[0], l[1] / d.d12_2, gauss::rl_skewness_scale() * (l[2] / l[1]),
            gauss::rl_kurtosis_scale() * l_kurt - gauss::rl_kurtosis_offset()};
}

RlMoments sample_rl_moments(const Sample& s) { return rl_from_l_moments(sample_l_moments(s, 4)); }

double empirical_quantile(std::span<const double> sorted, double p) {
    if (sorted.empty()) throw InsufficientSampleError("empirical quantile of an empty sample");
    const double n = static_cast<double>(sorted.size());
    const double h = p * (n + 1.0);
    if (h <= 1.0) return sorted.front();
    if (h >= n) return sorted.back();
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const double frac = h - static_cast<double>(lo);
    return sorted[lo - 1] + frac * (sorted[lo] - sorted[lo - 1]);
}

double bowley_skewness(const Sample& s, double p) {
    if (!(p > 0.0 && p < 0.5)) throw DomainError("Bowley skewness needs 0 < p < 0.5");
    const auto x = s.sorted();
    const double lower = empirical_quantile(x, p);
    const double median = empirical_quantile(x, 0.5);
    const double upper = empirical_quantile(x, 1.0 - p);
    const double range = upper - lower;
    if (!(range > 0.0)) throw ZeroScaleError("Bowley skewness: interquantile range is zero");
    return ((upper - median) - (median - lower)) / range;
}

double ruppert_kurtosis(const Sample& s, double p1, double p2) {
    if (!(p1 > 0.0 && p1 < p2 && p2 < 0.5)) throw DomainError("Ruppert kurtosis needs 0 < p1 < p2 < 0.5");
    const auto x = s.sorted();
    const double inner = empirical_quantile(x, 1.0 - p2) - empirical_quantile(x, p2);
    if (!(inner > 0.0)) throw ZeroScaleError("Ruppert kurtosis: inner interfractile range is zero");
    return (empirical_quantile(x, 1.0 - p1) - empirical_quantile(x, p1)) / inner;
}

double SummaryStatistics::get(Statistic s) const noexcept {
    switch (s) {
        case Statistic::Mean: return mean;
        case Statistic::Sd: return sd;
        case Statistic::Skewness: return skewness;
        case Statistic::Kurtosis: return kurtosis;
        case Statistic::L2: return l2;
        case Statistic::LSkewness: return l_skewness;
        case Statistic::LKurtosis: return l_kurtosis;
        case Statistic::HL2: return hl2;
        case Statistic::HLSkewness: return hl_skewness;
        case Statistic::HLKurtosis: return hl_kurtosis;
        case Statistic::RL2: return rl2;
        case Statistic::RLSkewness: return rl_skewness;
        case Statistic::RLKurtosis: return rl_kurtosis;
        case Statistic::Bowley: return bowley;
        case Statistic::Ruppert: return ruppert;
    }
    return std::numeric_limits<double>::quiet_NaN();
}

SummaryContext SummaryContext::build(int n, const SummaryOptions& options) {
    if (n < static_cast<int>(kMinSummarySize)) {
        throw InsufficientSampleError("summary statistics need n >= " + std::to_string(kMinSummarySize));
    }
    const auto& bias = cached_bias(n, options.bias_replicates, options.bias_seed, options.hl_estimator);
    return {n,
            options,
            l_moment_weights(n, 4),
            gcl::hl_weights(options.hl_estimator, n, 4),
            bias.mean_ratio[2],
            bias.mean_ratio[3]};
}

ContextCache& ContextCache::global() {
    static ContextCache cache;
    return cache;
}

std::shared_ptr<const SummaryContext> ContextCache::get(int n, const SummaryOptions& options) {
    const std::lock_guard lock(mutex_);
    const auto key = std::tuple_cat(std::tuple(n), options.key());
    if (auto it = contexts_.find(key); it != contexts_.end()) return it->second;
    auto context = std::make_shared<const SummaryContext>(SummaryContext::build(n, options));
    contexts_.emplace(key, context);
    return context;
}

SummaryStatistics compute_summary(const Sample& s, const SummaryContext& context, const std::string& variable_id) {
    if (s.size() < kMinSummarySize) {
        throw InsufficientSampleError((variable_id.empty() ? std::string() : variable_id + ": ") +
                                      "summary statistics need n >= " + std::to_string(kMinSummarySize));
    }
    if (static_cast<int>(s.size()) != context.n) throw DomainError("summary context built for a different n");
    require_not_constant(s, variable_id);

    SummaryStatistics out;
    out.n = s.size();
    const auto x = s.values();
    const auto sorted = s.sorted();
    const double n = static_cast<double>(x.size());

    out.mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : x) {
        const double d = v - out.mean;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    out.sd = std::sqrt(m2);
    out.skewness = m3 / std::pow(m2, 1.5);
    out.kurtosis = m4 / (m2 * m2) - 3.0;

    const auto l = apply_all(context.l_weights, sorted);
    out.l2 = l[1];
    out.l_skewness = l[2] / l[1];
    out.l_kurtosis = l[3] / l[1];

    const auto eta = apply_all(context.hl_weights, sorted);
    out.hl2 = eta[1];
    out.hl_skewness = eta[2] / eta[1] - context.hl_bias3;
    out.hl_kurtosis = eta[3] / eta[1] - context.hl_bias4;

    const auto rl = rl_from_l_moments(l);
    out.rl2 = rl.scale;
    out.rl_skewness = rl.skewness;
    out.rl_kurtosis = rl.kurtosis;

    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double q25 = empirical_quantile(sorted, 0.25);
    const double q50 = empirical_quantile(sorted, 0.5);
    const double q75 = empirical_quantile(sorted, 0.75);
    out.bowley = (q75 - q25) > 0.0 ? ((q75 - q50) - (q50 - q25)) / (q75 - q25) : nan;
    const double inner = empirical_quantile(sorted, 0.7) - empirical_quantile(sorted, 0.3);
    out.ruppert = inner > 0.0 ? (empirical_quantile(sorted, 0.9) - empirical_quantile(sorted, 0.1)) / inner : nan;
    return out;
}

SummaryStatistics compute_summary(const Sample& s, const SummaryOptions& options, const std::string& variable_id) {
    if (s.size() < kMinSummarySize) {
        throw InsufficientSampleError((variable_id.empty() ? std::string() : variable_id + ": ") +
                                      "summary statistics need n >= " + std::to_string(kMinSummarySize));
    }
    const auto context = ContextCache::global().get(static_cast<int>(s.size()), options);
    return compute_summary(s, *context, variable_id);
}

}  // namespace gcl
