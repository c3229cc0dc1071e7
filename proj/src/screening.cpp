#include "gcl/screening.hpp"

#include "gcl/errors.hpp"
#include "gcl/gaussian.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

namespace gcl::screen {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<std::string_view> split(std::string_view line, char delimiter) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(delimiter, start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '"')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '"' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

double parse_cell(std::string_view cell) {
    cell = trim(cell);
    if (cell.empty()) return kNaN;
    if (cell.front() == '+') cell.remove_prefix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(value)) return kNaN;
    return value;
}

std::string format_number(double v) {
    if (!std::isfinite(v)) return "NA";
    return fmt::format("{:.12g}", v);
}

double sample_sd(std::span<const double> x) {
    const double n = static_cast<double>(x.size());
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    return x.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
}

}  // namespace

DataMatrix::DataMatrix(std::vector<std::string> variable_ids, std::vector<std::string> sample_ids,
                       std::vector<double> values)
    : variable_ids_(std::move(variable_ids)), sample_ids_(std::move(sample_ids)), values_(std::move(values)) {
    if (values_.size() != variable_ids_.size() * sample_ids_.size()) {
        throw DomainError("matrix values do not match its dimensions");
    }
    for (std::size_t i = 0; i < variable_ids_.size(); ++i) {
        if (!index_.emplace(variable_ids_[i], i).second) throw DuplicateIdError(variable_ids_[i]);
    }
}

std::vector<double> DataMatrix::observed(std::size_t i) const {
    std::vector<double> out;
    out.reserve(n());
    for (double v : row(i)) {
        if (!std::isnan(v)) out.push_back(v);
    }
    return out;
}

std::optional<std::size_t> DataMatrix::find(const std::string& variable_id) const {
    if (auto it = index_.find(variable_id); it != index_.end()) return it->second;
    return std::nullopt;
}

DataMatrix DataMatrix::affine(double a, double b) const {
    auto values = values_;
    for (double& v : values) {
        if (!std::isnan(v)) v = a * v + b;
    }
    return DataMatrix(variable_ids_, sample_ids_, std::move(values));
}

DataMatrix load_matrix(std::istream& in, char delimiter) {
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> samples;
    bool have_header = false;
    std::vector<std::string> ids;
    std::vector<double> values;
    std::set<std::string> seen;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split(line, delimiter);
        if (!have_header) {
            if (fields.size() < 2) throw ParseError("header needs a corner cell and at least one sample id", line_no);
            for (std::size_t j = 1; j < fields.size(); ++j) samples.emplace_back(trim(fields[j]));
            have_header = true;
            continue;
        }
        if (fields.size() != samples.size() + 1) {
            throw ParseError(fmt::format("expected {} fields, found {}", samples.size() + 1, fields.size()), line_no,
                             std::min(fields.size(), samples.size() + 1) + 1);
        }
        std::string id(trim(fields[0]));
        if (id.empty()) throw ParseError("empty variable id", line_no, 1);
        if (!seen.insert(id).second) throw DuplicateIdError(id);
        ids.push_back(std::move(id));
        for (std::size_t j = 1; j < fields.size(); ++j) values.push_back(parse_cell(fields[j]));
    }
    if (!have_header) throw EmptyInputError("matrix input is empty");
    if (ids.empty()) throw EmptyInputError("matrix has a header but no variables");
    return DataMatrix(std::move(ids), std::move(samples), std::move(values));
}

DataMatrix load_matrix_file(const std::filesystem::path& path, char delimiter) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open matrix file '" + path.string() + "'");
    return load_matrix(in, delimiter);
}

std::string_view to_string(Direction d) noexcept { return d == Direction::Ascending ? "ascending" : "descending"; }

Direction parse_direction(std::string_view text) {
    if (text == "ascending" || text == "asc") return Direction::Ascending;
    if (text == "descending" || text == "desc") return Direction::Descending;
    throw DomainError("direction must be 'ascending' or 'descending', got '" + std::string(text) + "'");
}

std::vector<VariableSummary> summarize(const DataMatrix& matrix, const SummaryOptions& options, bool parallel) {
    const std::size_t p = matrix.p();
    std::vector<std::size_t> counts(p);
    std::set<std::size_t> sizes;
    for (std::size_t i = 0; i < p; ++i) {
        counts[i] = matrix.n() - static_cast<std::size_t>(std::count_if(
                                     matrix.row(i).begin(), matrix.row(i).end(), [](double v) { return std::isnan(v); }));
        if (counts[i] >= kMinSummarySize) sizes.insert(counts[i]);
    }
    std::map<std::size_t, std::shared_ptr<const SummaryContext>> contexts;
    for (std::size_t n : sizes) contexts.emplace(n, ContextCache::global().get(static_cast<int>(n), options));

    std::vector<VariableSummary> out(p);
    const auto count = static_cast<std::ptrdiff_t>(p);
#pragma omp parallel for schedule(dynamic, 16) if (parallel)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
        auto& result = out[i];
        result.variable_id = matrix.variable_ids()[i];
        result.n_observed = counts[i];
        if (counts[i] < kMinSummarySize) {
            result.error = fmt::format("only {} non-missing values (need {})", counts[i], kMinSummarySize);
            continue;
        }
        try {
            const Sample sample(matrix.observed(i));
            result.statistics = compute_summary(sample, *contexts.at(counts[i]), result.variable_id);
        } catch (const std::exception& e) {
            result.error = e.what();
        }
    }
    return out;
}

RankedList rank(std::span<const VariableSummary> summaries, Statistic statistic, Direction direction) {
    RankedList list;
    list.statistic = statistic;
    list.direction = direction;
    for (const auto& s : summaries) {
        if (!s.statistics) {
            list.excluded.push_back({s.variable_id, s.error});
            continue;
        }
        const double metric = s.statistics->get(statistic);
        if (!std::isfinite(metric)) {
            list.excluded.push_back({s.variable_id, fmt::format("{} is undefined (zero denominator)", to_string(statistic))});
            continue;
        }
        list.entries.push_back({s.variable_id, metric});
    }
    std::sort(list.entries.begin(), list.entries.end(), [direction](const RankedEntry& a, const RankedEntry& b) {
        if (a.metric != b.metric) return direction == Direction::Descending ? a.metric > b.metric : a.metric < b.metric;
        return a.variable_id < b.variable_id;
    });
    return list;
}

std::map<Statistic, RankedList> screen(const DataMatrix& matrix, std::span<const Statistic> statistics,
                                       Direction direction, const SummaryOptions& options, bool parallel) {
    const auto summaries = summarize(matrix, options, parallel);
    std::map<Statistic, RankedList> out;
    for (Statistic s : statistics) out.emplace(s, rank(summaries, s, direction));
    return out;
}

std::vector<RankedEntry> bottom_k(const RankedList& list, std::size_t k) {
    if (k > list.entries.size()) {
        throw DomainError(fmt::format("k = {} exceeds the {} ranked entries", k, list.entries.size()));
    }
    auto sorted = list.entries;
    std::stable_sort(sorted.begin(), sorted.end(), [](const RankedEntry& a, const RankedEntry& b) {
        if (a.metric != b.metric) return a.metric < b.metric;
        return a.variable_id < b.variable_id;
    });
    sorted.resize(k);
    return sorted;
}

std::vector<RankedEntry> top_k(const RankedList& list, std::size_t k) {
    if (k > list.entries.size()) {
        throw DomainError(fmt::format("k = {} exceeds the {} ranked entries", k, list.entries.size()));
    }
    auto sorted = list.entries;
    std::stable_sort(sorted.begin(), sorted.end(), [](const RankedEntry& a, const RankedEntry& b) {
        if (a.metric != b.metric) return a.metric > b.metric;
        return a.variable_id < b.variable_id;
    });
    sorted.resize(k);
    return sorted;
}

std::string ranked_list_tsv(const RankedList& list) {
    std::string out = "rank\tvariable_id\tmetric\n";
    for (std::size_t i = 0; i < list.entries.size(); ++i) {
        out += fmt::format("{}\t{}\t{}\n", i + 1, list.entries[i].variable_id, format_number(list.entries[i].metric));
    }
    return out;
}

nlohmann::json ranked_list_json(const RankedList& list) {
    nlohmann::json entries = nlohmann::json::array();
    for (std::size_t i = 0; i < list.entries.size(); ++i) {
        entries.push_back({{"rank", i + 1}, {"variable_id", list.entries[i].variable_id}, {"metric", list.entries[i].metric}});
    }
    nlohmann::json excluded = nlohmann::json::array();
    for (const auto& e : list.excluded) excluded.push_back({{"variable_id", e.variable_id}, {"reason", e.reason}});
    return {{"statistic", std::string(to_string(list.statistic))},
            {"direction", std::string(to_string(list.direction))},
            {"entries", entries},
            {"excluded", excluded}};
}

std::string summary_tsv(std::span<const VariableSummary> summaries) {
    std::string out = "variable_id\tn\tstatus";
    for (Statistic s : kAllStatistics) out += fmt::format("\t{}", to_string(s));
    out += "\treason\n";
    for (const auto& row : summaries) {
        out += fmt::format("{}\t{}\t{}", row.variable_id, row.n_observed, row.statistics ? "OK" : "EXCLUDED");
        for (Statistic s : kAllStatistics) out += "\t" + (row.statistics ? format_number(row.statistics->get(s)) : "NA");
        out += "\t" + (row.statistics ? std::string() : row.error) + "\n";
    }
    return out;
}

DensityCurve kernel_density(std::span<const double> values, std::span<const std::string> labels,
                            std::size_t grid_points) {
    if (values.empty()) throw InsufficientSampleError("kernel density needs at least one value");
    if (!labels.empty() && labels.size() != values.size()) throw DomainError("one label per value is required");
    if (grid_points < 2) throw DomainError("density grid needs at least two points");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    const double sd = sample_sd(values);
    const double iqr = empirical_quantile(sorted, 0.75) - empirical_quantile(sorted, 0.25);
    double spread = std::min(sd, iqr / 1.34);
    if (!(spread > 0.0)) spread = sd;
    if (!(spread > 0.0)) spread = std::max(1.0, std::fabs(sorted.front())) * 1e-3;

    DensityCurve out;
    out.bandwidth = 0.9 * spread * std::pow(n, -0.2);
    const double h = out.bandwidth;
    const double lo = sorted.front() - 3.0 * h;
    const double hi = sorted.back() + 3.0 * h;
    out.grid.resize(grid_points);
    for (std::size_t g = 0; g < grid_points; ++g) {
        out.grid[g] = lo + (hi - lo) * static_cast<double>(g) / static_cast<double>(grid_points - 1);
    }
    out.density.assign(grid_points, 0.0);
    if (!labels.empty()) {
        for (const auto& label : labels) out.class_density.try_emplace(label, grid_points, 0.0);
    }
    const double norm = 1.0 / (n * h);
    for (std::size_t i = 0; i < values.size(); ++i) {
        auto* cls = labels.empty() ? nullptr : &out.class_density.at(labels[i]);
        for (std::size_t g = 0; g < grid_points; ++g) {
            const double k = gauss::pdf((out.grid[g] - values[i]) / h) * norm;
            out.density[g] += k;
            if (cls) (*cls)[g] += k;
        }
    }
    return out;
}

nlohmann::json export_marginal_plot_data(const DataMatrix& matrix, std::span<const std::string> variable_ids,
                                         std::span<const std::string> labels) {
    if (!labels.empty() && labels.size() != matrix.n()) throw DomainError("one label per sample is required");
    nlohmann::json variables = nlohmann::json::array();
    for (const auto& id : variable_ids) {
        const auto index = matrix.find(id);
        if (!index) throw DomainError("unknown variable '" + id + "'");
        std::vector<double> values;
        std::vector<std::string> value_labels;
        std::map<std::string, std::vector<double>> groups;
        for (std::size_t j = 0; j < matrix.n(); ++j) {
            if (matrix.is_missing(*index, j)) continue;
            values.push_back(matrix.at(*index, j));
            if (!labels.empty()) {
                value_labels.push_back(labels[j]);
                groups[labels[j]].push_back(values.back());
            }
        }
        nlohmann::json entry{{"variable_id", id}, {"values", values}};
        if (values.empty()) {
            entry["density"] = nullptr;
            variables.push_back(entry);
            continue;
        }
        const auto curve = kernel_density(values, value_labels);
        nlohmann::json classes = nlohmann::json::array();
        for (const auto& [label, members] : groups) {
            classes.push_back({{"label", label},
                               {"proportion", static_cast<double>(members.size()) / static_cast<double>(values.size())},
                               {"values", members},
                               {"density", curve.class_density.at(label)}});
        }
        entry["bandwidth"] = curve.bandwidth;
        entry["grid"] = curve.grid;
        entry["density"] = curve.density;
        entry["classes"] = classes;
        variables.push_back(entry);
    }
    return {{"format", "gcl-marginal-plot-data"},
            {"version", 1},
            {"kernel", "gaussian"},
            {"bandwidth_rule", "0.9 * min(sd, IQR/1.34) * n^(-1/5)"},
            {"variables", variables}};
}

std::vector<std::string> load_sample_labels(const std::filesystem::path& path, const DataMatrix& matrix,
                                            char delimiter) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open label file '" + path.string() + "'");
    std::map<std::string, std::string> by_sample;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split(line, delimiter);
        if (fields.size() < 2) throw ParseError("expected sample id and label", line_no);
        by_sample[std::string(trim(fields[0]))] = std::string(trim(fields[1]));
    }
    std::vector<std::string> out;
    for (const auto& s : matrix.sample_ids()) {
        auto it = by_sample.find(s);
        out.push_back(it == by_sample.end() ? "unlabelled" : it->second);
    }
    return out;
}

}  // namespace gcl::screen
