#pragma once

#include "gcl/moments.hpp"
#include "gcl/statistic.hpp"

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace gcl::screen {

/// p variables x n samples, row-major; missing cells hold NaN.
class DataMatrix {
public:
    DataMatrix() = default;
    DataMatrix(std::vector<std::string> variable_ids, std::vector<std::string> sample_ids, std::vector<double> values);

    std::size_t p() const noexcept { return variable_ids_.size(); }
    std::size_t n() const noexcept { return sample_ids_.size(); }

    const std::vector<std::string>& variable_ids() const noexcept { return variable_ids_; }
    const std::vector<std::string>& sample_ids() const noexcept { return sample_ids_; }

    std::span<const double> row(std::size_t i) const { return {values_.data() + i * n(), n()}; }
    double at(std::size_t i, std::size_t j) const { return values_[i * n() + j]; }
    bool is_missing(std::size_t i, std::size_t j) const { return std::isnan(at(i, j)); }

    /// Non-missing values of variable i in sample order.
    std::vector<double> observed(std::size_t i) const;

    std::optional<std::size_t> find(const std::string& variable_id) const;

    /// Cell-wise a * x + b (missing cells stay missing).
    DataMatrix affine(double a, double b) const;

private:
    std::vector<std::string> variable_ids_;
    std::vector<std::string> sample_ids_;
    std::vector<double> values_;
    std::map<std::string, std::size_t> index_;
};

/// Delimited text: a header row (corner cell, then sample ids) and one row
/// per variable (id, then values). Cells that are empty, "NA", "NaN" or not
/// numeric become missing.
DataMatrix load_matrix(std::istream& in, char delimiter = '\t');
DataMatrix load_matrix_file(const std::filesystem::path& path, char delimiter = '\t');

enum class Direction { Ascending, Descending };

std::string_view to_string(Direction d) noexcept;
Direction parse_direction(std::string_view text);

struct RankedEntry {
    std::string variable_id;
    double metric;
};

struct Exclusion {
    std::string variable_id;
    std::string reason;
};

struct RankedList {
    Statistic statistic = Statistic::Mean;
    Direction direction = Direction::Descending;
    std::vector<RankedEntry> entries;  ///< sorted by metric in `direction`, ties by variable id
    std::vector<Exclusion> excluded;
};

/// Outcome of compute_summary for one variable.
struct VariableSummary {
    std::string variable_id;
    std::size_t n_observed = 0;
    std::optional<SummaryStatistics> statistics;
    std::string error;  ///< set when statistics is empty
};

/// compute_summary for every row. Contexts for each distinct n are built
/// serially first; the per-variable loop then runs under OpenMP when
/// `parallel`, with results stored by row so the output never depends on
/// scheduling.
std::vector<VariableSummary> summarize(const DataMatrix& matrix, const SummaryOptions& options = {},
                                       bool parallel = true);

RankedList rank(std::span<const VariableSummary> summaries, Statistic statistic,
                Direction direction = Direction::Descending);

std::map<Statistic, RankedList> screen(const DataMatrix& matrix, std::span<const Statistic> statistics,
                                       Direction direction = Direction::Descending,
                                       const SummaryOptions& options = {}, bool parallel = true);

/// The k entries with the smallest metrics, ascending. DomainError if k > |entries|.
std::vector<RankedEntry> bottom_k(const RankedList& list, std::size_t k);
/// The k entries with the largest metrics, descending.
std::vector<RankedEntry> top_k(const RankedList& list, std::size_t k);

std::string ranked_list_tsv(const RankedList& list);
nlohmann::json ranked_list_json(const RankedList& list);

/// Rows of `summaries` as TSV: variable_id, n, status, then every statistic
/// (NA for excluded rows or undefined quantile measures).
std::string summary_tsv(std::span<const VariableSummary> summaries);

struct DensityCurve {
    double bandwidth = 0.0;
    std::vector<double> grid;
    std::vector<double> density;
    std::map<std::string, std::vector<double>> class_density;  ///< each scaled by its class proportion
};

/// Gaussian KDE on a 512-point grid over [min - 3h, max + 3h] with Silverman's
/// bandwidth h = 0.9 min(sd, IQR/1.34) n^{-1/5}. Class sub-densities share h.
DensityCurve kernel_density(std::span<const double> values, std::span<const std::string> labels = {},
                            std::size_t grid_points = 512);

/// Per variable: raw values, values grouped by class, the KDE and class
/// sub-densities. `labels`, when given, has one entry per sample.
/// DomainError naming any unknown variable.
nlohmann::json export_marginal_plot_data(const DataMatrix& matrix, std::span<const std::string> variable_ids,
                                         std::span<const std::string> labels = {});

/// Two-column file (sample id, class label) into labels aligned with the
/// matrix's samples; samples without a label get "unlabelled".
std::vector<std::string> load_sample_labels(const std::filesystem::path& path, const DataMatrix& matrix,
                                            char delimiter = '\t');

}  // namespace gcl::screen
