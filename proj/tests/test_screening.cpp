#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gcl/errors.hpp"
#include "gcl/rng.hpp"
#include "gcl/screening.hpp"

#include <cmath>
#include <sstream>

using namespace gcl;
using namespace gcl::screen;

namespace {

DataMatrix parse(const std::string& text, char delimiter = '\t') {
    std::istringstream in(text);
    return load_matrix(in, delimiter);
}

DataMatrix random_matrix(std::size_t p, std::size_t n, std::uint64_t seed) {
    std::vector<std::string> vars, samples;
    for (std::size_t i = 0; i < p; ++i) vars.push_back("v" + std::to_string(i));
    for (std::size_t j = 0; j < n; ++j) samples.push_back("s" + std::to_string(j));
    std::vector<double> values(p * n);
    for (std::size_t i = 0; i < p; ++i) {
        rng::Stream s(seed, i);
        for (std::size_t j = 0; j < n; ++j) values[i * n + j] = s.normal() + 0.3 * s.normal() * s.normal();
    }
    return DataMatrix(vars, samples, values);
}

double trapezoid(const std::vector<double>& x, const std::vector<double>& y) {
    double total = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) total += 0.5 * (y[i] + y[i - 1]) * (x[i] - x[i - 1]);
    return total;
}

}  // namespace

TEST_CASE("load_matrix") {
    const auto m = parse("id\ta\tb\tc\td\ng1\t1\t2\t3\t4\ng2\t5\tNA\t7\t\ng3\t-1\t0.5\tx\t2e3\n");
    CHECK(m.p() == 3);
    CHECK(m.n() == 4);
    CHECK(m.sample_ids()[2] == "c");
    CHECK(m.at(0, 3) == 4.0);
    CHECK(m.is_missing(1, 1));
    CHECK(m.is_missing(1, 3));
    CHECK(m.is_missing(2, 2));
    CHECK(m.at(2, 3) == 2000.0);
    CHECK(m.observed(1) == std::vector<double>{5.0, 7.0});
    CHECK(m.find("g3") == 2u);
    CHECK_FALSE(m.find("g9").has_value());

    const auto csv = parse("id,a,b\nx,1,2\n", ',');
    CHECK(csv.at(0, 1) == 2.0);

    CHECK_THROWS_AS(parse("id\ta\tb\ng1\t1\t2\ng1\t3\t4\n"), DuplicateIdError);
    CHECK_THROWS_AS(parse("id\ta\tb\ng1\t1\n"), ParseError);
    CHECK_THROWS_AS(parse(""), EmptyInputError);
    CHECK_THROWS_AS(parse("id\ta\tb\n"), EmptyInputError);
}

TEST_CASE("ranking splits every variable into entries or exclusions") {
    auto base = random_matrix(30, 40, 1);
    std::vector<std::string> ids = base.variable_ids();
    std::vector<double> values;
    for (std::size_t i = 0; i < base.p(); ++i) {
        for (std::size_t j = 0; j < base.n(); ++j) values.push_back(i == 4 ? 2.0 : (i == 9 && j > 3 ? NAN : base.at(i, j)));
    }
    const DataMatrix m(ids, base.sample_ids(), values);
    const auto summaries = summarize(m);
    const auto list = rank(summaries, Statistic::LSkewness, Direction::Ascending);
    CHECK(list.entries.size() + list.excluded.size() == m.p());
    REQUIRE(list.excluded.size() == 2);
    CHECK(list.excluded[0].variable_id == "v4");
    CHECK(list.excluded[1].variable_id == "v9");
    for (std::size_t i = 1; i < list.entries.size(); ++i) CHECK(list.entries[i - 1].metric <= list.entries[i].metric);
}

TEST_CASE("ties are broken by variable id") {
    std::vector<VariableSummary> rows(3);
    const char* names[] = {"b", "c", "a"};
    for (int i = 0; i < 3; ++i) {
        rows[i].variable_id = names[i];
        rows[i].statistics = SummaryStatistics{};
        rows[i].statistics->l_kurtosis = 0.1;
    }
    for (auto d : {Direction::Ascending, Direction::Descending}) {
        const auto list = rank(rows, Statistic::LKurtosis, d);
        CHECK(list.entries[0].variable_id == "a");
        CHECK(list.entries[2].variable_id == "c");
    }
}

TEST_CASE("bottom_k and top_k") {
    const auto m = random_matrix(20, 30, 2);
    const auto list = rank(summarize(m), Statistic::HLSkewness, Direction::Descending);
    const auto low = bottom_k(list, 7);
    REQUIRE(low.size() == 7);
    for (std::size_t i = 1; i < low.size(); ++i) CHECK(low[i - 1].metric <= low[i].metric);
    CHECK(low[0].metric == list.entries.back().metric);
    const auto high = top_k(list, 7);
    CHECK(high[0].metric == list.entries.front().metric);
    CHECK(bottom_k(list, 0).empty());
    CHECK(top_k(list, 20).size() == 20);
    CHECK_THROWS_AS(bottom_k(list, 21), DomainError);
}

TEST_CASE("rankings are invariant to positive affine maps and flip under negation") {
    const auto m = random_matrix(25, 50, 3);
    const std::vector<Statistic> stats{Statistic::Skewness, Statistic::LSkewness, Statistic::HLKurtosis, Statistic::Bowley};
    const auto base = screen::screen(m, stats, Direction::Ascending);
    const auto moved = screen::screen(m.affine(2.5, 100.0), stats, Direction::Ascending);
    const auto flipped = screen::screen(m.affine(-1.0, 0.0), stats, Direction::Ascending);
    for (auto s : stats) {
        const auto& a = base.at(s).entries;
        const auto& b = moved.at(s).entries;
        const auto& c = flipped.at(s).entries;
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].variable_id == b[i].variable_id);
        const bool reverses = s != Statistic::HLKurtosis;
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].variable_id == c[reverses ? a.size() - 1 - i : i].variable_id);
        }
    }
}

TEST_CASE("results do not depend on threading") {
    const auto m = random_matrix(60, 35, 4);
    const auto serial = summarize(m, {}, false);
    const auto parallel = summarize(m, {}, true);
    REQUIRE(serial.size() == parallel.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
        for (auto s : kAllStatistics) {
            const double a = serial[i].statistics->get(s), b = parallel[i].statistics->get(s);
            CHECK((a == b || (std::isnan(a) && std::isnan(b))));
        }
    }
}

TEST_CASE("a planted left-skewed variable ranks first") {
    int hits = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        auto base = random_matrix(100, 200, 100 + seed);
        std::vector<double> values;
        rng::Stream planted(seed, 999);
        for (std::size_t i = 0; i < base.p(); ++i) {
            for (std::size_t j = 0; j < base.n(); ++j) values.push_back(i == 37 ? std::log(planted.uniform()) : base.at(i, j));
        }
        const DataMatrix m(base.variable_ids(), base.sample_ids(), values);
        const std::vector<Statistic> stats{Statistic::LSkewness};
        const auto lists = screen::screen(m, stats, Direction::Ascending);
        hits += bottom_k(lists.at(Statistic::LSkewness), 1)[0].variable_id == "v37";
    }
    CHECK(hits == 20);
}

TEST_CASE("kernel density") {
    rng::Stream s(5, 0);
    std::vector<double> x(400);
    std::vector<std::string> labels(400);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const bool a = i % 3 == 0;
        x[i] = a ? 3.0 + s.normal() : s.normal();
        labels[i] = a ? "case" : "control";
    }
    const auto kde = kernel_density(x, labels);
    CHECK(kde.grid.size() == 512);
    CHECK(trapezoid(kde.grid, kde.density) == doctest::Approx(1.0).epsilon(0.01));
    REQUIRE(kde.class_density.size() == 2);
    const auto& a = kde.class_density.at("case");
    const auto& b = kde.class_density.at("control");
    CHECK(trapezoid(kde.grid, a) == doctest::Approx(134.0 / 400.0).epsilon(0.02));
    for (std::size_t i = 0; i < kde.grid.size(); i += 37) {
        CHECK(a[i] + b[i] == doctest::Approx(kde.density[i]).epsilon(0.02).scale(1e-3));
    }

    const std::vector<std::string> one(400, "all");
    const auto single = kernel_density(x, one);
    for (std::size_t i = 0; i < kde.grid.size(); i += 37) {
        CHECK(single.class_density.at("all")[i] == doctest::Approx(single.density[i]).epsilon(1e-12));
    }
}

TEST_CASE("plot export") {
    const auto m = random_matrix(3, 20, 6);
    const std::vector<std::string> vars{"v1"};
    const auto j = export_marginal_plot_data(m, vars);
    CHECK(j.dump().find("v1") != std::string::npos);
    const std::vector<std::string> unknown{"v1", "nope"};
    CHECK_THROWS_AS(export_marginal_plot_data(m, unknown), DomainError);
}

TEST_CASE("ranked list TSV") {
    RankedList list;
    list.statistic = Statistic::LSkewness;
    list.entries = {{"g2", -0.5}, {"g1", 0.25}};
    CHECK(ranked_list_tsv(list) == "rank\tvariable_id\tmetric\n1\tg2\t-0.5\n2\tg1\t0.25\n");
    const auto j = ranked_list_json(list);
    CHECK(j["entries"][1]["variable_id"] == "g1");
}
