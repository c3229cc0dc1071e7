#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gcl/robustness.hpp"

#include <algorithm>
#include <cmath>

using namespace gcl;

TEST_CASE("growth orders at Tukey h = 0.2") {
    for (auto s : robust::default_robustness_statistics()) {
        const auto e = robust::growth_order(s, {0.0, 0.2});
        INFO(to_string(s), " exponent ", e.exponent, " log power ", e.log_correction_power);
        CHECK(e.failures.empty());
        CHECK(robust::growth_order_passes(e));
        if (s == Statistic::HLSkewness) {
            // |IF| / (x log(x + 1)) stays within a factor of 3 over the top decade.
            double lo = 1e300, hi = 0.0;
            for (std::size_t i = 0; i < e.x.size(); ++i) {
                if (e.x[i] < 10.0) continue;
                const double ratio = std::abs(e.influence[i]) / (e.x[i] * std::log(e.x[i] + 1.0));
                lo = std::min(lo, ratio);
                hi = std::max(hi, ratio);
            }
            CHECK(hi / lo < 3.0);
        }
    }
}

TEST_CASE("L-kurtosis growth does not depend on h") {
    const auto a = robust::growth_order(Statistic::LKurtosis, {0.0, 0.1});
    const auto b = robust::growth_order(Statistic::LKurtosis, {0.0, 0.3});
    CHECK(a.exponent == doctest::Approx(b.exponent).epsilon(0.1));
}
