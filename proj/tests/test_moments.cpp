#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gcl/distributions.hpp"
#include "gcl/errors.hpp"
#include "gcl/moments.hpp"
#include "gcl/rng.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

using namespace gcl;

namespace {

std::vector<double> normal_draws(std::size_t n, std::uint64_t seed, std::uint64_t stream = 0) {
    rng::Stream s(seed, stream);
    std::vector<double> x(n);
    for (double& v : x) v = s.normal();
    return x;
}

std::vector<double> exponential_draws(std::size_t n, std::uint64_t seed, std::uint64_t stream = 0) {
    rng::Stream s(seed, stream);
    std::vector<double> x(n);
    for (double& v : x) v = -std::log(s.uniform());
    return x;
}

std::vector<double> negated(std::vector<double> x) {
    for (double& v : x) v = -v;
    return x;
}

double hermite_oracle(int r, double z) {
    switch (r) {
        case 0: return 1.0;
        case 1: return z;
        case 2: return z * z - 1.0;
        default: return z * z * z - 3.0 * z;
    }
}

}  // namespace

TEST_CASE("conventional skewness and kurtosis") {
    const auto sym = conventional_sample_skewness_kurtosis(Sample({-1.0, 0.0, 1.0}));
    CHECK(sym.skewness == doctest::Approx(0.0));

    const std::vector<double> x{0.0, 0.0, 0.0, 1.0};
    const auto m = oracle::moments_about_mean(x);
    const auto c = conventional_sample_skewness_kurtosis(Sample(x));
    CHECK(c.skewness == doctest::Approx(m[3] / std::pow(m[2], 1.5)).epsilon(1e-14));
    CHECK(c.kurtosis == doctest::Approx(m[4] / (m[2] * m[2]) - 3.0).epsilon(1e-14));

    const auto big = conventional_sample_skewness_kurtosis(Sample(normal_draws(100000, 11)));
    CHECK(std::abs(big.skewness) < 0.05);
    CHECK(std::abs(big.kurtosis) < 0.05);

    CHECK_THROWS_AS(conventional_sample_skewness_kurtosis(Sample({2.0, 2.0, 2.0})), DegenerateSampleError);
    CHECK_THROWS_AS(conventional_sample_skewness_kurtosis(Sample({2.0})), InsufficientSampleError);
}

TEST_CASE("sample L-moments") {
    const auto l = sample_l_moments(Sample({1.0, 2.0}), 2);
    CHECK(l[0] == doctest::Approx(1.5));
    CHECK(l[1] == doctest::Approx(0.5));

    const std::vector<double> x{3.0, -1.0, 4.0, 1.5, 9.0, 2.6};
    CHECK(sample_l_moments(Sample(x), 1)[0] == doctest::Approx(19.1 / 6.0).epsilon(1e-15));

    CHECK_THROWS_AS(sample_l_moments(Sample({1.0, 2.0, 3.0}), 4), InsufficientSampleError);
    CHECK_THROWS_AS(sample_l_moments(Sample({1.0, 2.0}), 0), DomainError);
}

TEST_CASE("sample L-moments equal the brute-force U-statistic") {
    rng::Stream stream(3, 0);
    double worst = 0.0;
    for (int t = 0; t < 200; ++t) {
        const int n = 4 + static_cast<int>(stream.below(9));
        std::vector<double> x(n);
        for (double& v : x) v = 5.0 * stream.normal() + stream.uniform();
        Sample s(x);
        const auto l = sample_l_moments(s, 4);
        const std::vector<double> sorted(s.sorted().begin(), s.sorted().end());
        for (int r = 1; r <= 4; ++r) worst = std::max(worst, std::abs(l[r - 1] - oracle::l_moment_u_statistic(sorted, r)));
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("L-moment ratios on reference samples") {
    std::vector<double> grid(1000);
    for (int i = 0; i < 1000; ++i) grid[i] = (i + 0.5) / 1000.0;
    const auto u = sample_l_moment_ratios(Sample(grid));
    CHECK(std::abs(u.skewness) < 0.01);
    CHECK(std::abs(u.kurtosis) < 0.01);

    const auto g = sample_l_moment_ratios(Sample(normal_draws(100000, 12)));
    CHECK(g.kurtosis == doctest::Approx(0.1226).epsilon(0.04));

    const auto e = sample_l_moment_ratios(Sample(exponential_draws(100000, 13)));
    CHECK(std::abs(e.skewness - 1.0 / 3.0) < 0.01);

    CHECK_THROWS_AS(sample_l_moment_ratios(Sample({1.0, 1.0, 1.0, 1.0, 1.0})), ZeroScaleError);
}

TEST_CASE("L-kurtosis lies above the skewness bound") {
    rng::Stream stream(9, 0);
    bool ok = true;
    for (int t = 0; t < 10000 && ok; ++t) {
        const int n = 20 + static_cast<int>(stream.below(30));
        std::vector<double> x(n);
        const double skew = 3.0 * stream.uniform();
        for (double& v : x) {
            const double z = stream.normal();
            v = z + skew * z * z * (stream.uniform() < 0.5 ? 1.0 : 0.2);
        }
        const auto r = sample_l_moment_ratios(Sample(x));
        ok = std::abs(r.skewness) < 1.0 && r.kurtosis >= 0.25 * (5.0 * r.skewness * r.skewness - 1.0) - 1e-12 &&
             r.kurtosis < 1.0;
    }
    CHECK(ok);
}

TEST_CASE("HL-moment basics") {
    const std::vector<double> x{0.3, 2.0, -1.2, 5.5, 0.0, 1.7, -0.4};
    const Sample s(x);
    const auto eta = sample_hl_moments(s, 4);
    double mean = 0.0;
    for (double v : x) mean += v;
    CHECK(eta[0] == doctest::Approx(mean / 7.0).epsilon(1e-13));
    CHECK(eta[1] > 0.0);

    const auto flipped = sample_hl_moments(Sample(negated(x)), 4);
    CHECK(flipped[2] == doctest::Approx(-eta[2]).epsilon(1e-12));
    CHECK(flipped[3] == doctest::Approx(eta[3]).epsilon(1e-12));

    CHECK_THROWS_AS(sample_hl_moments(Sample({1.0}), 4), InsufficientSampleError);
    CHECK_THROWS_AS(sample_hl_moment_ratios(Sample({1.0, 1.0, 1.0})), ZeroScaleError);
}

TEST_CASE("HL bias terms at the Gaussian") {
    CHECK(hl_bias_correction(20, 4, kDefaultBiasReplicates, kDefaultBiasSeed) == doctest::Approx(-0.2833).epsilon(0.035));
    CHECK(hl_bias_correction(50, 4, kDefaultBiasReplicates, kDefaultBiasSeed) == doctest::Approx(-0.1733).epsilon(0.06));
    CHECK(std::abs(hl_bias_correction(20, 3, kDefaultBiasReplicates, kDefaultBiasSeed)) < 0.01);
    CHECK(std::abs(hl_bias_correction(20, 1, kDefaultBiasReplicates, kDefaultBiasSeed)) < 0.02);
    CHECK_THROWS_AS(hl_bias_correction(20, 5, 100, 1), DomainError);

    const auto serial = estimate_hl_bias(30, 500, 4, HlEstimator::Sample, false);
    const auto parallel = estimate_hl_bias(30, 500, 4, HlEstimator::Sample, true);
    CHECK(serial.mean_ratio == parallel.mean_ratio);
}

TEST_CASE("bias-corrected HL ratios centre on the Gaussian") {
    double skew = 0.0, kurt = 0.0;
    const int reps = 10000;
    for (int j = 0; j < reps; ++j) {
        const auto r = sample_hl_moment_ratios(Sample(normal_draws(50, 777, j)));
        skew += r.skewness;
        kurt += r.kurtosis;
    }
    CHECK(std::abs(skew / reps) < 0.01);
    CHECK(std::abs(kurt / reps) < 0.01);
}

TEST_CASE("HL ratios are affine invariant and see skewness") {
    const auto x = exponential_draws(200, 21);
    const Sample s(x);
    const auto r = sample_hl_moment_ratios(s);
    const auto a = sample_hl_moment_ratios(s.affine(3.0, 7.0));
    CHECK(a.skewness == doctest::Approx(r.skewness).epsilon(1e-10));
    CHECK(a.kurtosis == doctest::Approx(r.kurtosis).epsilon(1e-10));
    CHECK(r.skewness > 0.0);

    const auto left = sample_hl_moment_ratios(Sample(negated(exponential_draws(2000, 22))), HlEstimator::Sample, 1000, 5);
    CHECK(left.skewness < 0.0);
}

TEST_CASE("Brown-Hettmansperger weights") {
    const int n = 25;
    const auto w = hl_bh_weights(n, 4);
    for (double c : w.row(1)) CHECK(c == doctest::Approx(1.0));
    double sum2 = 0.0;
    for (double c : w.row(2)) sum2 += c;
    CHECK(std::abs(sum2) < 1e-12);

    double worst = 0.0;
    for (int r = 1; r <= 4; ++r) {
        for (int i = 1; i <= n; ++i) {
            const double lo = i == 1 ? -12.0 : oracle::normal_quantile(static_cast<double>(i - 1) / n);
            const double hi = i == n ? 12.0 : oracle::normal_quantile(static_cast<double>(i) / n);
            const double expected =
                n * oracle::simpson([r](double z) { return hermite_oracle(r - 1, z) * oracle::normal_pdf(z); }, lo, hi, 4000);
            worst = std::max(worst, std::abs(w.row(r)[i - 1] - expected));
        }
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("plug-in HL estimator by hand") {
    const auto eta = sample_hl_moments_plugin(Sample({4.0, 1.0, 2.0}), 2);
    const double z = oracle::normal_quantile(0.75);
    CHECK(eta[0] == doctest::Approx(7.0 / 3.0));
    CHECK(eta[1] == doctest::Approx(z * (4.0 - 1.0) / 3.0).epsilon(1e-12));
}

TEST_CASE("HL estimators agree for large samples") {
    const Sample s = dist::sample_distribution(dist::tukey_gh({0.3, 0.1}), 2000, 8);
    const auto a = sample_hl_moments(s, 4);
    const auto b = sample_hl_moments_bh(s, 4);
    const auto c = sample_hl_moments_plugin(s, 4);
    for (int r = 2; r <= 4; ++r) {
        CHECK(b[r - 1] / b[1] == doctest::Approx(a[r - 1] / a[1]).epsilon(0.05).scale(0.05));
    }
    CHECK(c[2] / c[1] == doctest::Approx(a[2] / a[1]).epsilon(0.05).scale(0.05));
}

TEST_CASE("RL-moments") {
    const auto x = exponential_draws(500, 31);
    const Sample s(x);
    const auto l = sample_l_moments(s, 4);
    const auto rl = sample_rl_moments(s);
    const auto& d = gauss::gaussian_spacings();
    CHECK(rl.location == doctest::Approx(l[0]).epsilon(1e-14));
    CHECK(rl.scale == doctest::Approx(l[1] / d.d12_2).epsilon(1e-14));
    CHECK(rl.skewness == doctest::Approx(gauss::rl_skewness_scale() * l[2] / l[1]).epsilon(1e-10));
    CHECK(rl.kurtosis == doctest::Approx(1.7560 * (l[3] / l[1] - 0.1226)).scale(1.0).epsilon(1e-3));

    const auto g = sample_rl_moments(Sample(normal_draws(100000, 32)));
    CHECK(std::abs(g.skewness) < 0.02);
    CHECK(std::abs(g.kurtosis) < 0.02);

    const std::vector<double> short_l{1.0, 0.0, 0.0, 0.0};
    CHECK_THROWS_AS(rl_from_l_moments(short_l), ZeroScaleError);
}

TEST_CASE("empirical quantiles and Bowley skewness") {
    const std::vector<double> sorted{0.0, 1.0, 2.0, 3.0, 10.0};
    CHECK(empirical_quantile(sorted, 0.25) == doctest::Approx(0.5));
    CHECK(empirical_quantile(sorted, 0.5) == doctest::Approx(2.0));
    CHECK(empirical_quantile(sorted, 0.75) == doctest::Approx(6.5));
    CHECK(empirical_quantile(sorted, 0.01) == 0.0);
    CHECK(empirical_quantile(sorted, 0.99) == 10.0);
    CHECK(bowley_skewness(Sample(sorted)) == doctest::Approx(0.5));

    CHECK(bowley_skewness(Sample({-2.0, -1.0, 0.0, 1.0, 2.0})) == doctest::Approx(0.0));
    const Sample s(exponential_draws(99, 41));
    CHECK(bowley_skewness(s.affine(2.5, -4.0)) == doctest::Approx(bowley_skewness(s)).epsilon(1e-12));
    CHECK_THROWS_AS(bowley_skewness(Sample({1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 5.0})), ZeroScaleError);
    CHECK_THROWS_AS(bowley_skewness(s, 0.5), DomainError);
}

TEST_CASE("Ruppert kurtosis") {
    const double expected = (oracle::normal_quantile(0.9) - oracle::normal_quantile(0.1)) /
                            (oracle::normal_quantile(0.7) - oracle::normal_quantile(0.3));
    const Sample g(normal_draws(100000, 51));
    CHECK(ruppert_kurtosis(g) == doctest::Approx(expected).epsilon(0.02));
    CHECK(ruppert_kurtosis(g.affine(0.1, 3.0)) == doctest::Approx(ruppert_kurtosis(g)).epsilon(1e-12));
    const Sample heavy = dist::sample_distribution(dist::tukey_gh({0.0, 0.5}), 100000, 52);
    CHECK(ruppert_kurtosis(heavy) > ruppert_kurtosis(g) + 0.1);
    CHECK_THROWS_AS(ruppert_kurtosis(g, 0.3, 0.1), DomainError);
}

TEST_CASE("location-scale equivariance of every summary statistic") {
    const Sample s(exponential_draws(64, 61));
    const auto base = compute_summary(s);
    const auto moved = compute_summary(s.affine(4.0, -2.0));
    const auto flipped = compute_summary(s.affine(-1.0, 0.0));
    const std::pair<double SummaryStatistics::*, bool> shape[] = {
        {&SummaryStatistics::skewness, true},     {&SummaryStatistics::kurtosis, false},
        {&SummaryStatistics::l_skewness, true},   {&SummaryStatistics::l_kurtosis, false},
        {&SummaryStatistics::hl_skewness, true},  {&SummaryStatistics::hl_kurtosis, false},
        {&SummaryStatistics::rl_skewness, true},  {&SummaryStatistics::rl_kurtosis, false},
        {&SummaryStatistics::bowley, true},       {&SummaryStatistics::ruppert, false},
    };
    for (const auto& [field, odd] : shape) {
        CHECK(moved.*field == doctest::Approx(base.*field).epsilon(1e-10));
        // The Monte-Carlo bias term is not itself odd, so reflection shifts HL skewness by twice it.
        const double shift = field == &SummaryStatistics::hl_skewness
                                 ? 2.0 * hl_bias_correction(64, 3, kDefaultBiasReplicates, kDefaultBiasSeed)
                                 : 0.0;
        CHECK(flipped.*field == doctest::Approx(odd ? -(base.*field) - shift : base.*field).epsilon(1e-10));
    }
    CHECK(moved.mean == doctest::Approx(4.0 * base.mean - 2.0));
    CHECK(moved.sd == doctest::Approx(4.0 * base.sd));
    CHECK(moved.l2 == doctest::Approx(4.0 * base.l2));
    CHECK(moved.hl2 == doctest::Approx(4.0 * base.hl2));
    CHECK(moved.rl2 == doctest::Approx(4.0 * base.rl2));
}

TEST_CASE("sampling distribution of L-skewness is close to Gaussian") {
    const int reps = 2000;
    std::vector<double> t3(reps);
    for (int j = 0; j < reps; ++j) t3[j] = sample_l_moment_ratios(Sample(exponential_draws(2000, 71, j))).skewness;
    const auto m = oracle::moments_about_mean(t3);
    CHECK(std::abs(m[3] / std::pow(m[2], 1.5)) < 0.2);
    CHECK(m[1] == doctest::Approx(1.0 / 3.0).epsilon(0.01));
}

TEST_CASE("compute_summary") {
    CHECK_THROWS_AS(compute_summary(Sample(std::vector<double>(10, 3.0)), {}, "flat"), DegenerateSampleError);
    CHECK_THROWS_AS(compute_summary(Sample({1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0})), InsufficientSampleError);

    const Sample g(normal_draws(817, 81));
    const auto a = compute_summary(g);
    const auto b = compute_summary(g);
    CHECK(std::abs(a.skewness) < 0.25);
    CHECK(std::abs(a.l_skewness) < 0.05);
    CHECK(std::abs(a.hl_skewness) < 0.1);
    CHECK(std::abs(a.hl_kurtosis) < 0.1);
    CHECK(std::abs(a.rl_kurtosis) < 0.1);
    CHECK(a.l_kurtosis == doctest::Approx(0.1226).epsilon(0.2));
    CHECK(a.n == 817);
    for (auto s : {Statistic::Mean, Statistic::Skewness, Statistic::HLKurtosis, Statistic::Ruppert}) {
        CHECK(a.get(s) == b.get(s));
    }

    const auto ctx = SummaryContext::build(817, {});
    const auto c = compute_summary(g, ctx);
    CHECK(c.hl_kurtosis == a.hl_kurtosis);
    CHECK(c.rl_skewness == a.rl_skewness);
}
