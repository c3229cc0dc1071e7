#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gcl/distributions.hpp"
#include "gcl/errors.hpp"
#include "gcl/moments.hpp"
#include "gcl/rng.hpp"
#include "oracles.hpp"

#include <cmath>

using namespace gcl;

TEST_CASE("Tukey g-and-h transform") {
    for (double z : {-3.0, -0.4, 0.0, 1.1, 5.0}) CHECK(dist::tukey_gh_transform(z, {0.0, 0.0}) == z);
    for (auto p : {dist::TukeyGH{0.5, 0.2}, dist::TukeyGH{-1.0, 0.0}, dist::TukeyGH{0.0, 0.7}}) {
        CHECK(dist::tukey_gh_transform(0.0, p) == 0.0);
    }
    CHECK(dist::tukey_gh_transform(1.0, {1.0, 0.0}) == doctest::Approx(M_E - 1.0).epsilon(1e-15));
    CHECK(dist::tukey_gh_transform(2.0, {0.3, 0.1}) ==
          doctest::Approx((std::exp(0.6) - 1.0) / 0.3 * std::exp(0.2)).epsilon(1e-15));
}

TEST_CASE("Tukey g-and-h quantile") {
    CHECK(dist::tukey_gh_quantile(0.5, {0.4, 0.3}) == 0.0);
    for (double u : {0.01, 0.3, 0.8}) {
        CHECK(dist::tukey_gh_quantile(u, {0.0, 0.0}) == doctest::Approx(oracle::normal_quantile(u)).epsilon(1e-12));
    }
    const double z = oracle::normal_quantile(0.9);
    CHECK(dist::tukey_gh_quantile(0.9, {0.0, 0.5}) == doctest::Approx(z * std::exp(0.25 * z * z)).epsilon(1e-12));
    CHECK_THROWS_AS(dist::tukey_gh_quantile(0.0, {0.0, 0.2}), DomainError);
    CHECK_THROWS_AS(dist::tukey_gh_quantile(1.0, {0.0, 0.2}), DomainError);
    CHECK_THROWS_AS(dist::tukey_gh({0.0, -0.1}), DomainError);
}

TEST_CASE("transform is increasing for random (g, h)") {
    rng::Stream stream(5, 1);
    bool monotone = true;
    for (int t = 0; t < 200; ++t) {
        const dist::TukeyGH p{4.0 * stream.uniform() - 2.0, stream.uniform()};
        double previous = -INFINITY;
        for (int k = 0; k < 1000; ++k) {
            const double v = dist::tukey_gh_transform(-6.0 + 12.0 * k / 999.0, p);
            monotone = monotone && v > previous;
            previous = v;
        }
    }
    CHECK(monotone);
}

TEST_CASE("symmetric quantiles for g = 0") {
    for (double h : {0.0, 0.2, 0.5}) {
        const auto d = dist::tukey_gh({0.0, h});
        for (int k = 1; k < 100; ++k) {
            const double u = k / 100.0;
            CHECK(d.quantile(u) == doctest::Approx(-d.quantile(1.0 - u)).scale(1.0).epsilon(1e-10));
        }
    }
}

TEST_CASE("quantile functions are monotone on a fine grid") {
    for (const auto& d : {dist::gaussian(1.0, 2.0), dist::uniform(-1.0, 3.0), dist::exponential(0.5),
                          dist::tukey_gh({0.3, 0.2}), dist::reflected(dist::exponential())}) {
        double previous = -INFINITY;
        bool monotone = true;
        for (int k = 1; k < 1000; ++k) {
            const double v = d.quantile(k / 1000.0);
            monotone = monotone && v >= previous;
            previous = v;
        }
        CHECK_MESSAGE(monotone, d.label);
    }
}

TEST_CASE("normal-score form agrees with the quantile function") {
    for (const auto& d : {dist::gaussian(1.0, 2.0), dist::uniform(), dist::exponential(2.0), dist::tukey_gh({0.5, 0.1})}) {
        for (double z : {-4.0, -1.0, 0.0, 0.5, 3.0}) {
            CHECK(d.at_normal_score(z) == doctest::Approx(d.quantile(oracle::normal_cdf(z))).epsilon(1e-9));
        }
        for (double u : {0.05, 0.5, 0.9}) {
            const double x = d.quantile(u);
            const auto [F, Fc] = d.cdf_pair(x);
            CHECK(F == doctest::Approx(u).epsilon(1e-9));
            CHECK(Fc == doctest::Approx(1.0 - u).epsilon(1e-9));
        }
    }
    CHECK(dist::exponential().normal_level(-1.0) == -INFINITY);
}

TEST_CASE("seeded sampling") {
    const auto a = dist::sample_distribution(dist::gaussian(), 50, 77);
    const auto b = dist::sample_distribution(dist::gaussian(), 50, 77);
    const auto c = dist::sample_distribution(dist::gaussian(), 50, 77, 1);
    CHECK(std::equal(a.values().begin(), a.values().end(), b.values().begin()));
    CHECK(!std::equal(a.values().begin(), a.values().end(), c.values().begin()));
    CHECK_THROWS_AS(dist::sample_distribution(dist::gaussian(), 0, 1), DomainError);
}

TEST_CASE("generator streams are reproducible bit for bit") {
    rng::Stream s(42, 3);
    const std::uint64_t first = s.next();
    rng::Stream t(42, 3);
    CHECK(t.next() == first);
    rng::Stream u(42, 4);
    CHECK(u.next() != first);
    rng::Stream v(1, 0);
    for (int i = 0; i < 1000; ++i) {
        const auto k = v.below(7);
        CHECK(k < 7);
        const double x = v.uniform();
        CHECK((x > 0.0 && x < 1.0));
    }
}

TEST_CASE("uniform sample mean") {
    const auto s = dist::sample_distribution(dist::uniform(), 1000000, 2024);
    double mean = 0.0;
    for (double v : s.values()) mean += v;
    mean /= 1e6;
    CHECK(mean == doctest::Approx(0.5).epsilon(0.004));
}

TEST_CASE("heavier tails raise L-kurtosis above the Gaussian value") {
    const auto s = dist::sample_distribution(dist::tukey_gh({0.0, 0.3}), 100000, 8);
    CHECK(sample_l_moment_ratios(s).kurtosis > 0.1226);
}

TEST_CASE("T_{0,0} sampling reproduces Gaussian L-moment ratios") {
    const auto s = dist::sample_distribution(dist::tukey_gh({0.0, 0.0}), 100000, 9);
    const auto r = sample_l_moment_ratios(s);
    CHECK(std::fabs(r.skewness) < 0.01);
    CHECK(r.kurtosis == doctest::Approx(0.1226).epsilon(0.005 / 0.1226));
}
