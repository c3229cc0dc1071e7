#pragma once

#include "gcl/screening.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace gcl::gsea {

struct GeneSet {
    std::string name;
    std::string description;
    std::vector<std::string> members;  ///< deduplicated, first occurrence kept
};

struct SkippedSet {
    std::string name;
    std::size_t overlap;
    std::string reason;
};

struct GeneSetCollection {
    std::vector<GeneSet> sets;
    std::vector<SkippedSet> skipped;
};

inline constexpr std::size_t kDefaultMinSize = 15;
inline constexpr std::size_t kDefaultMaxSize = 10000;

/// GMT: name, description, then members, tab separated. ParseError with the
/// line number for lines with fewer than three fields; DuplicateIdError for a
/// repeated set name.
GeneSetCollection load_gmt(std::istream& in);
GeneSetCollection load_gmt_file(const std::filesystem::path& path);

/// Restrict members to `universe` and keep sets whose overlap lies in
/// [min_size, max_size] and leaves at least one non-member; the rest move to
/// `skipped` with a reason.
GeneSetCollection filter_sets(const GeneSetCollection& collection, std::span<const std::string> universe,
                              std::size_t min_size = kDefaultMinSize, std::size_t max_size = kDefaultMaxSize);

/// Member positions (0-based, ascending) of each set within a ranked list.
std::vector<std::vector<std::uint32_t>> set_positions(const screen::RankedList& list,
                                                      const GeneSetCollection& collection);

/// |r_j|^p along the list (p = 0 gives the classic unweighted score).
std::vector<double> hit_weights(const screen::RankedList& list, double p);

struct EnrichmentScore {
    double es = 0.0;
    std::size_t position = 0;  ///< n', 1-based; earliest position on ties of |ES|
};

/// Running-sum reference over every list position.
EnrichmentScore enrichment_score_dense(std::span<const double> weights, std::span<const std::uint8_t> in_set);

/// Same value from the hit positions alone: the extremes of the running sum
/// sit at a hit or just before one, so the sweep is O(|S|).
EnrichmentScore enrichment_score_sparse(std::span<const double> weights, std::span<const std::uint32_t> hits);

/// ES(S, n) for n = 1..N.
std::vector<double> running_profile(std::span<const double> weights, std::span<const std::uint32_t> hits);

struct EnrichmentProfile {
    double es = 0.0;
    std::size_t position = 0;
    std::vector<std::uint32_t> hit_positions;
    std::vector<double> running;
};

/// ES of `members` along the ranked list. DomainError when no member is
/// ranked or when the set covers the whole list (no misses).
EnrichmentProfile enrichment_score(const screen::RankedList& list, std::span<const std::string> members,
                                   double p = 0.0);

/// K x M null enrichment scores; permutation k shuffles the labels with
/// stream (seed, k), so the matrix does not depend on the thread count.
class NullMatrix {
public:
    NullMatrix(std::size_t permutations, std::size_t sets)
        : permutations_(permutations), sets_(sets), values_(permutations * sets, 0.0) {}

    std::size_t permutations() const noexcept { return permutations_; }
    std::size_t sets() const noexcept { return sets_; }
    double& at(std::size_t k, std::size_t m) { return values_[k * sets_ + m]; }
    double at(std::size_t k, std::size_t m) const { return values_[k * sets_ + m]; }
    std::span<const double> values() const noexcept { return values_; }

private:
    std::size_t permutations_;
    std::size_t sets_;
    std::vector<double> values_;
};

NullMatrix permutation_null(std::span<const double> weights, std::span<const std::vector<std::uint32_t>> sets,
                            std::size_t permutations, std::uint64_t seed, bool parallel = true);

/// Convenience overload on a ranked list and a filtered collection.
NullMatrix permutation_null(const screen::RankedList& list, const GeneSetCollection& sets, std::size_t permutations,
                            std::uint64_t seed, double p = 0.0, bool parallel = true);

struct EnrichmentResult {
    std::string set_name;
    std::size_t size = 0;
    double es = 0.0;
    std::size_t position = 0;
    double p_value = 1.0;
    double fdr_q = 1.0;
    int direction = 1;  ///< +1 when ES > 0, -1 otherwise
    std::vector<bool> enriched;  ///< fdr_q < level, one flag per level
};

/// Sign-specific nominal p-value: the share of same-sign null scores at least
/// as extreme as `es`; 1 when the null has no score of that sign.
double nominal_p_value(double es, std::span<const double> null_scores);

/// The pooled two-branch FDR over every (set, permutation) null score:
/// #{null > ES} / #{null > 0} when ES > 0, #{null <= ES} / #{null <= 0} otherwise.
/// Zero denominators give q = 1 and a warning.
void assign_fdr(std::vector<EnrichmentResult>& results, const NullMatrix& null, std::span<const double> levels,
                std::vector<std::string>* warnings = nullptr);

struct GseaOptions {
    std::size_t permutations = 1000;
    std::uint64_t seed = 1;
    double weight_p = 0.0;
    std::vector<double> fdr_levels{0.05, 0.25};
    std::size_t min_size = kDefaultMinSize;
    std::size_t max_size = kDefaultMaxSize;
    bool parallel = true;
};

struct GseaReport {
    Statistic statistic = Statistic::Mean;
    std::vector<double> fdr_levels;
    std::vector<EnrichmentResult> results;  ///< in collection order
    std::vector<SkippedSet> skipped;
    std::vector<std::string> warnings;
    GeneSetCollection tested;
};

/// Filter -> observed ES -> permutation null -> nominal p and FDR.
/// EmptyInputError when no set survives filtering.
GseaReport run_gsea(const screen::RankedList& list, const GeneSetCollection& collection, const GseaOptions& options);

/// Two-sided Fisher exact p-value of the table [[a, b], [c, d]]: the sum of
/// hypergeometric probabilities not above the observed one (relative slack 1e-7).
double fisher_exact_2x2(std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t d);

/// Enriched / not enriched for two estimators that each tested `total` sets.
double fisher_exact_comparison(std::uint64_t count_a, std::uint64_t count_b, std::uint64_t total);
double fisher_exact_comparison(std::uint64_t count_a, std::uint64_t total_a, std::uint64_t count_b,
                               std::uint64_t total_b);

struct EstimatorCount {
    Statistic statistic;
    std::size_t enriched;
    std::size_t tested;
};

struct PairwiseComparison {
    Statistic row;
    Statistic column;
    double p_value;
};

struct LevelComparison {
    double fdr_level;
    std::vector<EstimatorCount> estimators;  ///< most enriched first
    std::vector<PairwiseComparison> pairwise;  ///< upper triangle in that order
};

struct ComparisonTable {
    std::vector<LevelComparison> levels;
    std::vector<GseaReport> reports;
    std::vector<std::string> failures;  ///< statistics whose pipeline failed
};

/// Screen, rank (descending), and run GSEA for every statistic with the same
/// permutation seed, then count enriched sets per level and compare pairs
/// with Fisher's exact test. DomainError for fewer than two statistics.
ComparisonTable compare_estimators(const screen::DataMatrix& matrix, const GeneSetCollection& sets,
                                   std::span<const Statistic> statistics, const GseaOptions& options,
                                   const SummaryOptions& summary_options = {});

/// Variant on precomputed ranked lists (one per statistic).
ComparisonTable compare_ranked_lists(std::span<const screen::RankedList> lists, const GeneSetCollection& sets,
                                     const GseaOptions& options);

std::string enrichment_tsv(const GseaReport& report);
nlohmann::json enrichment_json(const GseaReport& report);
nlohmann::json comparison_json(const ComparisonTable& table);

/// Running-ES profiles of the `top` sets with the smallest q (then largest |ES|).
nlohmann::json profiles_json(const screen::RankedList& list, const GseaReport& report, std::size_t top = 10,
                             double p = 0.0);

/// Reads the ranked-list TSV written by the screening step (rank, variable_id, metric).
screen::RankedList load_ranked_list(std::istream& in, Statistic statistic);
screen::RankedList load_ranked_list_file(const std::filesystem::path& path, Statistic statistic);

}  // namespace gcl::gsea
