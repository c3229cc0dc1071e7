#include "gcl/gsea.hpp"

#include "gcl/errors.hpp"
#include "gcl/rng.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <unordered_map>

namespace gcl::gsea {

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find('\t', start);
        out.push_back(line.substr(start, pos == std::string::npos ? std::string::npos : pos - start));
        if (pos == std::string::npos) return out;
        start = pos + 1;
    }
}

std::string format_number(double v) {
    if (!std::isfinite(v)) return "NA";
    return fmt::format("{:.10g}", v);
}

double log_choose(std::uint64_t n, std::uint64_t k) {
    return std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
           std::lgamma(static_cast<double>(n - k) + 1.0);
}

struct SetTotals {
    double weight = 0.0;
    double misses = 0.0;
};

SetTotals totals(std::span<const double> weights, std::span<const std::uint32_t> hits) {
    SetTotals t;
    for (auto h : hits) t.weight += weights[h];
    t.misses = static_cast<double>(weights.size() - hits.size());
    if (hits.empty()) throw DomainError("gene set has no ranked members");
    if (t.misses == 0.0) throw DomainError("gene set covers the whole ranked list (no misses)");
    if (!(t.weight > 0.0)) throw DomainError("gene set members all have zero weight");
    return t;
}

}  // namespace

GeneSetCollection load_gmt(std::istream& in) {
    GeneSetCollection out;
    std::set<std::string> names;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split_tabs(line);
        while (!fields.empty() && fields.back().empty()) fields.pop_back();
        if (fields.size() < 3) {
            throw ParseError(fmt::format("GMT line needs a name, a description and members, found {} field(s)",
                                         fields.size()),
                             line_no);
        }
        if (fields[0].empty()) throw ParseError("empty gene set name", line_no, 1);
        if (!names.insert(fields[0]).second) throw DuplicateIdError(fields[0]);
        GeneSet set{fields[0], fields[1], {}};
        std::set<std::string> seen;
        for (std::size_t j = 2; j < fields.size(); ++j) {
            if (!fields[j].empty() && seen.insert(fields[j]).second) set.members.push_back(fields[j]);
        }
        out.sets.push_back(std::move(set));
    }
    return out;
}

GeneSetCollection load_gmt_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open GMT file '" + path.string() + "'");
    return load_gmt(in);
}

GeneSetCollection filter_sets(const GeneSetCollection& collection, std::span<const std::string> universe,
                              std::size_t min_size, std::size_t max_size) {
    const std::set<std::string> known(universe.begin(), universe.end());
    GeneSetCollection out;
    out.skipped = collection.skipped;
    for (const auto& set : collection.sets) {
        GeneSet kept{set.name, set.description, {}};
        for (const auto& m : set.members) {
            if (known.count(m)) kept.members.push_back(m);
        }
        const std::size_t overlap = kept.members.size();
        if (overlap < min_size) {
            out.skipped.push_back({set.name, overlap, fmt::format("overlap {} below minimum size {}", overlap, min_size)});
        } else if (overlap > max_size) {
            out.skipped.push_back({set.name, overlap, fmt::format("overlap {} above maximum size {}", overlap, max_size)});
        } else if (overlap == known.size()) {
            out.skipped.push_back({set.name, overlap, "set covers every ranked variable"});
        } else {
            out.sets.push_back(std::move(kept));
        }
    }
    return out;
}

std::vector<std::vector<std::uint32_t>> set_positions(const screen::RankedList& list,
                                                      const GeneSetCollection& collection) {
    std::unordered_map<std::string, std::uint32_t> position;
    for (std::size_t j = 0; j < list.entries.size(); ++j) {
        position.emplace(list.entries[j].variable_id, static_cast<std::uint32_t>(j));
    }
    std::vector<std::vector<std::uint32_t>> out;
    for (const auto& set : collection.sets) {
        std::vector<std::uint32_t> hits;
        for (const auto& m : set.members) {
            if (auto it = position.find(m); it != position.end()) hits.push_back(it->second);
        }
        std::sort(hits.begin(), hits.end());
        hits.erase(std::unique(hits.begin(), hits.end()), hits.end());
        out.push_back(std::move(hits));
    }
    return out;
}

std::vector<double> hit_weights(const screen::RankedList& list, double p) {
    std::vector<double> w;
    w.reserve(list.entries.size());
    for (const auto& e : list.entries) w.push_back(p == 0.0 ? 1.0 : std::pow(std::fabs(e.metric), p));
    return w;
}

EnrichmentScore enrichment_score_dense(std::span<const double> weights, std::span<const std::uint8_t> in_set) {
    if (in_set.size() != weights.size()) throw DomainError("membership mask and weights differ in length");
    std::vector<std::uint32_t> hits;
    for (std::size_t j = 0; j < in_set.size(); ++j) {
        if (in_set[j]) hits.push_back(static_cast<std::uint32_t>(j));
    }
    const auto t = totals(weights, hits);
    EnrichmentScore best{0.0, 0};
    double cumulative = 0.0;
    double misses = 0.0;
    for (std::size_t j = 0; j < weights.size(); ++j) {
        if (in_set[j]) {
            cumulative += weights[j];
        } else {
            misses += 1.0;
        }
        const double v = cumulative / t.weight - misses / t.misses;
        if (best.position == 0 || std::fabs(v) > std::fabs(best.es)) best = {v, j + 1};
    }
    return best;
}

EnrichmentScore enrichment_score_sparse(std::span<const double> weights, std::span<const std::uint32_t> hits) {
    const auto t = totals(weights, hits);
    EnrichmentScore best{0.0, 0};
    const auto consider = [&best](double v, std::size_t position) {
        if (best.position == 0 || std::fabs(v) > std::fabs(best.es)) best = {v, position};
    };
    double cumulative = 0.0;
    std::int64_t previous = -1;
    for (std::size_t i = 0; i < hits.size(); ++i) {
        const std::int64_t h = hits[i];
        const double misses = static_cast<double>(h - static_cast<std::int64_t>(i));
        // Lowest point of the run of misses since the previous hit.
        if (h > previous + 1) consider(cumulative / t.weight - misses / t.misses, static_cast<std::size_t>(h));
        cumulative += weights[h];
        consider(cumulative / t.weight - misses / t.misses, static_cast<std::size_t>(h) + 1);
        previous = h;
    }
    // Trailing misses only move the sum back toward zero.
    if (best.position == 0) consider(0.0, weights.size());
    return best;
}

std::vector<double> running_profile(std::span<const double> weights, std::span<const std::uint32_t> hits) {
    const auto t = totals(weights, hits);
    std::vector<double> out(weights.size());
    double cumulative = 0.0;
    double misses = 0.0;
    std::size_t next = 0;
    for (std::size_t j = 0; j < weights.size(); ++j) {
        if (next < hits.size() && hits[next] == j) {
            cumulative += weights[j];
            ++next;
        } else {
            misses += 1.0;
        }
        out[j] = cumulative / t.weight - misses / t.misses;
    }
    return out;
}

EnrichmentProfile enrichment_score(const screen::RankedList& list, std::span<const std::string> members, double p) {
    GeneSetCollection single;
    single.sets.push_back({"set", "", std::vector<std::string>(members.begin(), members.end())});
    const auto hits = set_positions(list, single).front();
    if (hits.empty()) throw DomainError("gene set does not intersect the ranked list");
    const auto weights = hit_weights(list, p);
    const auto score = enrichment_score_sparse(weights, hits);
    return {score.es, score.position, hits, running_profile(weights, hits)};
}

NullMatrix permutation_null(std::span<const double> weights, std::span<const std::vector<std::uint32_t>> sets,
                            std::size_t permutations, std::uint64_t seed, bool parallel) {
    if (permutations < 1) throw DomainError("at least one permutation is required");
    NullMatrix null(permutations, sets.size());
    const std::size_t n = weights.size();
    const auto count = static_cast<std::ptrdiff_t>(permutations);
#pragma omp parallel if (parallel)
    {
        std::vector<std::uint32_t> moved(n);
        std::vector<std::uint32_t> hits;
#pragma omp for schedule(static)
        for (std::ptrdiff_t k = 0; k < count; ++k) {
            rng::Stream stream(seed, static_cast<std::uint64_t>(k));
            std::iota(moved.begin(), moved.end(), 0u);
            rng::shuffle(std::span<std::uint32_t>(moved), stream);
            for (std::size_t m = 0; m < sets.size(); ++m) {
                hits.clear();
                for (auto h : sets[m]) hits.push_back(moved[h]);
                std::sort(hits.begin(), hits.end());
                null.at(static_cast<std::size_t>(k), m) = enrichment_score_sparse(weights, hits).es;
            }
        }
    }
    return null;
}

NullMatrix permutation_null(const screen::RankedList& list, const GeneSetCollection& sets, std::size_t permutations,
                            std::uint64_t seed, double p, bool parallel) {
    const auto positions = set_positions(list, sets);
    return permutation_null(hit_weights(list, p), positions, permutations, seed, parallel);
}

double nominal_p_value(double es, std::span<const double> null_scores) {
    std::size_t same_sign = 0;
    std::size_t extreme = 0;
    for (double v : null_scores) {
        if (es > 0.0) {
            if (v > 0.0) {
                ++same_sign;
                if (v >= es) ++extreme;
            }
        } else if (v <= 0.0) {
            ++same_sign;
            if (v <= es) ++extreme;
        }
    }
    if (same_sign == 0) return 1.0;
    return static_cast<double>(extreme) / static_cast<double>(same_sign);
}

void assign_fdr(std::vector<EnrichmentResult>& results, const NullMatrix& null, std::span<const double> levels,
                std::vector<std::string>* warnings) {
    std::vector<double> positive, negative;
    for (double v : null.values()) (v > 0.0 ? positive : negative).push_back(v);
    std::sort(positive.begin(), positive.end());
    std::sort(negative.begin(), negative.end());
    for (auto& r : results) {
        double numerator, denominator;
        if (r.es > 0.0) {
            denominator = static_cast<double>(positive.size());
            numerator = static_cast<double>(positive.end() - std::upper_bound(positive.begin(), positive.end(), r.es));
        } else {
            denominator = static_cast<double>(negative.size());
            numerator = static_cast<double>(std::upper_bound(negative.begin(), negative.end(), r.es) - negative.begin());
        }
        if (denominator == 0.0) {
            r.fdr_q = 1.0;
            if (warnings) {
                warnings->push_back(fmt::format("{}: no {} null scores; FDR set to 1", r.set_name,
                                                r.es > 0.0 ? "positive" : "non-positive"));
            }
        } else {
            r.fdr_q = std::min(1.0, numerator / denominator);
        }
        r.enriched.clear();
        for (double level : levels) r.enriched.push_back(r.fdr_q < level);
    }
}

GseaReport run_gsea(const screen::RankedList& list, const GeneSetCollection& collection, const GseaOptions& options) {
    std::vector<std::string> universe;
    universe.reserve(list.entries.size());
    for (const auto& e : list.entries) universe.push_back(e.variable_id);

    GseaReport report;
    report.statistic = list.statistic;
    report.fdr_levels = options.fdr_levels;
    report.tested = filter_sets(collection, universe, options.min_size, options.max_size);
    report.skipped = report.tested.skipped;
    if (report.tested.sets.empty()) throw EmptyInputError("no gene set survives filtering against the ranked list");

    const auto weights = hit_weights(list, options.weight_p);
    const auto positions = set_positions(list, report.tested);
    const auto null = permutation_null(weights, positions, options.permutations, options.seed, options.parallel);

    std::vector<double> column(null.permutations());
    for (std::size_t m = 0; m < positions.size(); ++m) {
        const auto score = enrichment_score_sparse(weights, positions[m]);
        for (std::size_t k = 0; k < null.permutations(); ++k) column[k] = null.at(k, m);
        EnrichmentResult r;
        r.set_name = report.tested.sets[m].name;
        r.size = positions[m].size();
        r.es = score.es;
        r.position = score.position;
        r.direction = score.es > 0.0 ? 1 : -1;
        r.p_value = nominal_p_value(score.es, column);
        report.results.push_back(std::move(r));
    }
    assign_fdr(report.results, null, options.fdr_levels, &report.warnings);
    return report;
}

double fisher_exact_2x2(std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t d) {
    const std::uint64_t row1 = a + b, row2 = c + d, col1 = a + c, total = a + b + c + d;
    if (total == 0) return 1.0;
    const double log_denominator = log_choose(total, col1);
    const auto log_p = [&](std::uint64_t x) { return log_choose(row1, x) + log_choose(row2, col1 - x) - log_denominator; };
    const std::uint64_t lo = col1 > row2 ? col1 - row2 : 0;
    const std::uint64_t hi = std::min(row1, col1);
    const double observed = log_p(a);
    const double threshold = observed + std::log1p(1e-7);
    double sum = 0.0;
    for (std::uint64_t x = lo; x <= hi; ++x) {
        const double lp = log_p(x);
        if (lp <= threshold) sum += std::exp(lp);
    }
    return std::min(1.0, sum);
}

double fisher_exact_comparison(std::uint64_t count_a, std::uint64_t total_a, std::uint64_t count_b,
                               std::uint64_t total_b) {
    if (count_a > total_a || count_b > total_b) throw DomainError("enriched count exceeds the number of sets tested");
    return fisher_exact_2x2(count_a, total_a - count_a, count_b, total_b - count_b);
}

double fisher_exact_comparison(std::uint64_t count_a, std::uint64_t count_b, std::uint64_t total) {
    return fisher_exact_comparison(count_a, total, count_b, total);
}

ComparisonTable compare_ranked_lists(std::span<const screen::RankedList> lists, const GeneSetCollection& sets,
                                     const GseaOptions& options) {
    if (lists.size() < 2) throw DomainError("comparing estimators needs at least two statistics");
    ComparisonTable table;
    for (const auto& list : lists) {
        try {
            table.reports.push_back(run_gsea(list, sets, options));
        } catch (const std::exception& e) {
            table.failures.push_back(fmt::format("{}: {}", to_string(list.statistic), e.what()));
        }
    }
    for (std::size_t l = 0; l < options.fdr_levels.size(); ++l) {
        LevelComparison level{options.fdr_levels[l], {}, {}};
        for (const auto& report : table.reports) {
            const auto enriched = static_cast<std::size_t>(std::count_if(
                report.results.begin(), report.results.end(), [l](const EnrichmentResult& r) { return r.enriched[l]; }));
            level.estimators.push_back({report.statistic, enriched, report.results.size()});
        }
        std::stable_sort(level.estimators.begin(), level.estimators.end(),
                         [](const EstimatorCount& a, const EstimatorCount& b) { return a.enriched > b.enriched; });
        for (std::size_t i = 0; i < level.estimators.size(); ++i) {
            for (std::size_t j = i + 1; j < level.estimators.size(); ++j) {
                const auto& a = level.estimators[i];
                const auto& b = level.estimators[j];
                level.pairwise.push_back(
                    {a.statistic, b.statistic, fisher_exact_comparison(a.enriched, a.tested, b.enriched, b.tested)});
            }
        }
        table.levels.push_back(std::move(level));
    }
    return table;
}

ComparisonTable compare_estimators(const screen::DataMatrix& matrix, const GeneSetCollection& sets,
                                   std::span<const Statistic> statistics, const GseaOptions& options,
                                   const SummaryOptions& summary_options) {
    if (statistics.size() < 2) throw DomainError("comparing estimators needs at least two statistics");
    const auto summaries = screen::summarize(matrix, summary_options, options.parallel);
    std::vector<screen::RankedList> lists;
    for (Statistic s : statistics) lists.push_back(screen::rank(summaries, s, screen::Direction::Descending));
    return compare_ranked_lists(lists, sets, options);
}

std::string enrichment_tsv(const GseaReport& report) {
    std::string out = "set\tsize\tes\tposition\tp_value\tfdr_q";
    for (double level : report.fdr_levels) out += fmt::format("\tenriched@{:g}", level);
    out += "\n";
    for (const auto& r : report.results) {
        out += fmt::format("{}\t{}\t{}\t{}\t{}\t{}", r.set_name, r.size, format_number(r.es), r.position,
                           format_number(r.p_value), format_number(r.fdr_q));
        for (bool flag : r.enriched) out += flag ? "\t1" : "\t0";
        out += "\n";
    }
    return out;
}

nlohmann::json enrichment_json(const GseaReport& report) {
    nlohmann::json results = nlohmann::json::array();
    for (const auto& r : report.results) {
        nlohmann::json flags = nlohmann::json::object();
        for (std::size_t l = 0; l < report.fdr_levels.size(); ++l) {
            flags[fmt::format("{:g}", report.fdr_levels[l])] = static_cast<bool>(r.enriched[l]);
        }
        results.push_back({{"set", r.set_name},
                           {"size", r.size},
                           {"es", r.es},
                           {"position", r.position},
                           {"direction", r.direction},
                           {"p_value", r.p_value},
                           {"fdr_q", r.fdr_q},
                           {"enriched", flags}});
    }
    nlohmann::json skipped = nlohmann::json::array();
    for (const auto& s : report.skipped) skipped.push_back({{"set", s.name}, {"overlap", s.overlap}, {"reason", s.reason}});
    return {{"statistic", std::string(to_string(report.statistic))},
            {"fdr_levels", report.fdr_levels},
            {"results", results},
            {"skipped", skipped},
            {"warnings", report.warnings}};
}

nlohmann::json comparison_json(const ComparisonTable& table) {
    nlohmann::json levels = nlohmann::json::array();
    for (const auto& level : table.levels) {
        nlohmann::json estimators = nlohmann::json::array();
        for (const auto& e : level.estimators) {
            estimators.push_back(
                {{"statistic", std::string(to_string(e.statistic))}, {"enriched", e.enriched}, {"tested", e.tested}});
        }
        nlohmann::json pairs = nlohmann::json::array();
        for (const auto& p : level.pairwise) {
            pairs.push_back({{"row", std::string(to_string(p.row))},
                             {"column", std::string(to_string(p.column))},
                             {"p_value", p.p_value}});
        }
        levels.push_back({{"fdr_level", level.fdr_level}, {"estimators", estimators}, {"fisher_exact", pairs}});
    }
    return {{"format", "gcl-estimator-comparison"}, {"version", 1}, {"levels", levels}, {"failures", table.failures}};
}

nlohmann::json profiles_json(const screen::RankedList& list, const GseaReport& report, std::size_t top, double p) {
    std::vector<std::size_t> order(report.results.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& ra = report.results[a];
        const auto& rb = report.results[b];
        if (ra.fdr_q != rb.fdr_q) return ra.fdr_q < rb.fdr_q;
        return std::fabs(ra.es) > std::fabs(rb.es);
    });
    order.resize(std::min(top, order.size()));
    const auto weights = hit_weights(list, p);
    const auto positions = set_positions(list, report.tested);
    std::vector<double> metrics;
    for (const auto& e : list.entries) metrics.push_back(e.metric);
    nlohmann::json sets = nlohmann::json::array();
    for (auto m : order) {
        const auto& r = report.results[m];
        sets.push_back({{"set", r.set_name},
                        {"es", r.es},
                        {"position", r.position},
                        {"fdr_q", r.fdr_q},
                        {"hit_positions", positions[m]},
                        {"running_es", running_profile(weights, positions[m])}});
    }
    return {{"format", "gcl-enrichment-profiles"},
            {"version", 1},
            {"statistic", std::string(to_string(list.statistic))},
            {"rank_metrics", metrics},
            {"sets", sets}};
}

screen::RankedList load_ranked_list(std::istream& in, Statistic statistic) {
    screen::RankedList list;
    list.statistic = statistic;
    std::string line;
    std::size_t line_no = 0;
    std::set<std::string> seen;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_tabs(line);
        if (line_no == 1 && !fields.empty() && fields[0] == "rank") continue;
        if (fields.size() != 3) throw ParseError("ranked list rows need rank, variable_id and metric", line_no);
        double metric = 0.0;
        const auto& cell = fields[2];
        const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), metric);
        if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(metric)) {
            throw ParseError("metric is not a finite number", line_no, 3);
        }
        if (!seen.insert(fields[1]).second) throw DuplicateIdError(fields[1]);
        list.entries.push_back({fields[1], metric});
    }
    if (list.entries.empty()) throw EmptyInputError("ranked list is empty");
    return list;
}

screen::RankedList load_ranked_list_file(const std::filesystem::path& path, Statistic statistic) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open ranked list '" + path.string() + "'");
    return load_ranked_list(in, statistic);
}

}  // namespace gcl::gsea
