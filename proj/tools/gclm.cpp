#include "gcl/cache_io.hpp"
#include "gcl/errors.hpp"
#include "gcl/gsea.hpp"
#include "gcl/moments.hpp"
#include "gcl/robustness.hpp"
#include "gcl/screening.hpp"
#include "gcl/statistic.hpp"
#include "gcl/synthetic.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>
#include <omp.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace gcl;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

class UsageError : public Error {
public:
    using Error::Error;
};

struct RunConfig {
    std::string input;
    std::string gmt;
    std::string ranked;
    std::string labels;
    std::string stat = "l_skewness";
    std::vector<std::string> stats;
    std::string hl_estimator = "sample";
    int bias_replicates = kDefaultBiasReplicates;
    std::uint64_t bias_seed = kDefaultBiasSeed;
    std::size_t permutations = 1000;
    std::vector<double> fdr_levels{0.05, 0.25};
    double weight_p = 0.0;
    std::size_t min_size = gsea::kDefaultMinSize;
    std::size_t max_size = gsea::kDefaultMaxSize;
    std::size_t profiles = 10;
    std::uint64_t seed = 1;
    int threads = 0;
    std::size_t k = 7;
    std::string direction = "ascending";
    std::string out_dir = ".";
    std::string delimiter = "\t";
    std::vector<double> h{0.2};
    std::vector<double> x_grid;
    std::size_t variables = 500;
    std::size_t samples = 300;
};

char delimiter_char(const std::string& text) {
    if (text == "\\t" || text == "tab" || text == "\t") return '\t';
    if (text == "comma") return ',';
    if (text.size() != 1) throw UsageError("--delimiter must be a single character, 'tab' or 'comma'");
    return text[0];
}

std::vector<Statistic> parse_statistics(const std::vector<std::string>& ids) {
    std::vector<Statistic> out;
    for (const auto& id : ids) out.push_back(parse_statistic(id));
    return out;
}

SummaryOptions summary_options(const RunConfig& c) {
    SummaryOptions o;
    o.hl_estimator = parse_hl_estimator(c.hl_estimator);
    o.bias_replicates = c.bias_replicates;
    o.bias_seed = c.bias_seed;
    return o;
}

gsea::GseaOptions gsea_options(const RunConfig& c) {
    gsea::GseaOptions o;
    o.permutations = c.permutations;
    o.seed = c.seed;
    o.weight_p = c.weight_p;
    o.fdr_levels = c.fdr_levels;
    o.min_size = c.min_size;
    o.max_size = c.max_size;
    return o;
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw Error("failed writing '" + path.string() + "'");
}

void write_json(const fs::path& path, const nlohmann::json& doc) { write_file(path, doc.dump(2) + "\n"); }

/// Everything that determines the outputs; the thread count does not.
nlohmann::json resolved_config(const std::string& command, const RunConfig& c) {
    nlohmann::json j{{"command", command},
                     {"input", c.input},
                     {"gmt", c.gmt},
                     {"ranked", c.ranked},
                     {"labels", c.labels},
                     {"stat", c.stat},
                     {"stats", c.stats},
                     {"hl_estimator", c.hl_estimator},
                     {"bias_replicates", c.bias_replicates},
                     {"bias_seed", c.bias_seed},
                     {"permutations", c.permutations},
                     {"fdr_levels", c.fdr_levels},
                     {"weight_p", c.weight_p},
                     {"min_size", c.min_size},
                     {"max_size", c.max_size},
                     {"profiles", c.profiles},
                     {"seed", c.seed},
                     {"k", c.k},
                     {"direction", c.direction},
                     {"delimiter", c.delimiter},
                     {"h", c.h},
                     {"x_grid", c.x_grid},
                     {"variables", c.variables},
                     {"samples", c.samples}};
    return j;
}

/// Rejects option values that are malformed rather than failing at runtime.
void validate(const RunConfig& c) {
    try {
        parse_hl_estimator(c.hl_estimator);
        screen::parse_direction(c.direction);
    } catch (const DomainError& e) {
        throw UsageError(e.what());
    }
    delimiter_char(c.delimiter);
    if (c.permutations < 1) throw UsageError("--permutations must be at least 1");
    if (c.bias_replicates < 2) throw UsageError("--bias-replicates must be at least 2");
    for (double level : c.fdr_levels) {
        if (!(level > 0.0 && level <= 1.0)) throw UsageError("--fdr-levels must lie in (0, 1]");
    }
    if (c.weight_p < 0.0) throw UsageError("--weight-p must be non-negative");
}

void print_header(const std::string& command, const RunConfig& c) {
    const auto cache = cache::directory_from_env();
    std::cerr << fmt::format(
        "gclm {}: hl_estimator={} bias_replicates={} bias_seed={} permutations={} fdr_levels={} weight_p={} "
        "min_size={} max_size={} k={} seed={} threads={} cache={}\n",
        command, c.hl_estimator, c.bias_replicates, c.bias_seed, c.permutations, fmt::join(c.fdr_levels, ","),
        c.weight_p, c.min_size, c.max_size, c.k, c.seed, c.threads > 0 ? std::to_string(c.threads) : "auto",
        cache ? cache->string() : "memory");
}

fs::path prepare(const std::string& command, const RunConfig& c) {
    print_header(command, c);
    const fs::path dir(c.out_dir);
    fs::create_directories(dir);
    write_json(dir / "run_config.json", resolved_config(command, c));
    return dir;
}

/// Prefixes parse diagnostics with the file name.
template <typename F>
auto with_path(const std::string& path, F&& load) {
    try {
        return load();
    } catch (const ParseError& e) {
        throw Error(fmt::format("{}: {}", path, e.what()));
    } catch (const DuplicateIdError& e) {
        throw Error(fmt::format("{}: {}", path, e.what()));
    }
}

screen::DataMatrix load_input(const RunConfig& c) {
    if (c.input.empty()) throw UsageError("--input is required");
    return with_path(c.input, [&] { return screen::load_matrix_file(c.input, delimiter_char(c.delimiter)); });
}

void cmd_stats(const RunConfig& c) {
    const auto matrix = load_input(c);
    const auto dir = prepare("stats", c);
    const auto summaries = screen::summarize(matrix, summary_options(c));
    write_file(dir / "summary.tsv", screen::summary_tsv(summaries));
    std::size_t excluded = 0;
    for (const auto& s : summaries) {
        if (!s.statistics) {
            ++excluded;
            std::cerr << fmt::format("excluded {}: {}\n", s.variable_id, s.error);
        }
    }
    std::cerr << fmt::format("{} variables, {} excluded\n", summaries.size(), excluded);
}

void cmd_screen(const RunConfig& c) {
    const auto statistic = parse_statistic(c.stat);
    const auto direction = screen::parse_direction(c.direction);
    const auto matrix = load_input(c);
    const auto dir = prepare("screen", c);
    const auto summaries = screen::summarize(matrix, summary_options(c));
    const auto list = screen::rank(summaries, statistic, direction);
    const std::string id(to_string(statistic));
    write_file(dir / ("ranked_" + id + ".tsv"), screen::ranked_list_tsv(list));
    write_json(dir / ("ranked_" + id + ".json"), screen::ranked_list_json(list));

    // The first k entries in ranking order are the selection.
    const std::size_t k = std::min(c.k, list.entries.size());
    screen::RankedList selection{list.statistic, list.direction,
                                 {list.entries.begin(), list.entries.begin() + static_cast<std::ptrdiff_t>(k)}, {}};
    write_file(dir / ("selection_" + id + ".tsv"), screen::ranked_list_tsv(selection));

    std::vector<std::string> ids;
    for (const auto& e : selection.entries) ids.push_back(e.variable_id);
    std::vector<std::string> labels;
    if (!c.labels.empty()) labels = screen::load_sample_labels(c.labels, matrix, delimiter_char(c.delimiter));
    write_json(dir / ("plot_data_" + id + ".json"), screen::export_marginal_plot_data(matrix, ids, labels));
    for (const auto& e : list.excluded) std::cerr << fmt::format("excluded {}: {}\n", e.variable_id, e.reason);
}

void cmd_gsea(const RunConfig& c) {
    if (c.gmt.empty()) throw UsageError("--gmt is required");
    if (c.input.empty() == c.ranked.empty()) throw UsageError("give exactly one of --input or --ranked");
    const auto statistics = parse_statistics(c.stats.empty() ? std::vector<std::string>{c.stat} : c.stats);
    if (!c.ranked.empty() && statistics.size() > 1) throw UsageError("--ranked takes a single --stat");
    const auto sets = with_path(c.gmt, [&] { return gsea::load_gmt_file(c.gmt); });
    std::vector<screen::RankedList> lists;
    if (!c.ranked.empty()) {
        lists.push_back(with_path(c.ranked, [&] { return gsea::load_ranked_list_file(c.ranked, statistics.front()); }));
    } else {
        const auto matrix = load_input(c);
        const auto summaries = screen::summarize(matrix, summary_options(c));
        for (Statistic s : statistics) lists.push_back(screen::rank(summaries, s, screen::Direction::Descending));
    }
    const auto dir = prepare("gsea", c);
    const auto options = gsea_options(c);

    const auto write_report = [&](const screen::RankedList& list, const gsea::GseaReport& report) {
        const std::string id(to_string(report.statistic));
        write_file(dir / ("enrichment_" + id + ".tsv"), gsea::enrichment_tsv(report));
        write_json(dir / ("enrichment_" + id + ".json"), gsea::enrichment_json(report));
        write_json(dir / ("profiles_" + id + ".json"), gsea::profiles_json(list, report, c.profiles, c.weight_p));
        for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
        for (const auto& s : report.skipped) std::cerr << fmt::format("skipped {}: {}\n", s.name, s.reason);
    };

    if (lists.size() == 1) {
        write_report(lists.front(), gsea::run_gsea(lists.front(), sets, options));
        return;
    }
    const auto table = gsea::compare_ranked_lists(lists, sets, options);
    for (const auto& report : table.reports) {
        for (const auto& list : lists) {
            if (list.statistic == report.statistic) write_report(list, report);
        }
    }
    write_json(dir / "comparison.json", gsea::comparison_json(table));
    for (const auto& f : table.failures) std::cerr << "failed: " << f << "\n";
    if (table.reports.empty()) throw Error("every statistic failed");
}

void cmd_robustness(const RunConfig& c) {
    if (c.h.empty()) throw UsageError("--h needs at least one value");
    for (double h : c.h) {
        if (!(h > 0.0)) throw UsageError("--h values must be positive");
    }
    const auto statistics = c.stats.empty() ? robust::default_robustness_statistics() : parse_statistics(c.stats);
    const auto dir = prepare("robustness", c);
    robust::GrowthOptions options;
    options.x_grid = c.x_grid;
    std::vector<robust::GrowthOrderEstimate> estimates;
    for (double h : c.h) {
        for (Statistic s : statistics) {
            estimates.push_back(robust::growth_order(s, dist::TukeyGH{0.0, h}, options));
            const auto& e = estimates.back();
            std::cerr << fmt::format("{} h={}: exponent {:.3f} ({})\n", to_string(s), h, e.exponent,
                                     robust::growth_order_passes(e) ? "pass" : "FAIL");
            for (const auto& f : e.failures) std::cerr << "  cell failed: " << f << "\n";
        }
    }
    write_file(dir / "growth_orders.csv", robust::growth_report_csv(estimates));
    write_json(dir / "growth_orders.json", robust::growth_report_json(estimates));
}

void cmd_simulate(const RunConfig& c) {
    const auto dir = prepare("simulate", c);
    synth::PlantedSignalOptions options;
    options.variables = c.variables;
    options.samples = c.samples;
    const auto data = synth::planted_signal(c.seed, options);
    write_file(dir / "matrix.tsv", synth::matrix_tsv(data.matrix));
    write_file(dir / "sets.gmt", synth::gmt_text(data.sets));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Robust shape statistics, variable screening, gene set enrichment and influence-function studies", "gclm"};
    app.set_help_flag("--help", "Print this help message and exit");
    app.require_subcommand(1);
    app.set_config("--config", "", "TOML/INI file of option values; flags on the command line win");
    RunConfig c;

    const auto add_common = [&c](CLI::App* sub) {
        sub->add_option("--out-dir", c.out_dir, "Output directory")->capture_default_str();
        sub->add_option("--threads", c.threads, "OpenMP threads (0: runtime default)")->capture_default_str();
        sub->add_option("--seed", c.seed, "Master seed")->capture_default_str();
    };
    const auto add_matrix = [&c](CLI::App* sub, bool required) {
        auto* opt = sub->add_option("--input", c.input, "Matrix file: header of sample ids, one row per variable");
        if (required) opt->required();
        sub->add_option("--delimiter", c.delimiter, "Field delimiter (tab, comma or one character)");
        sub->add_option("--hl-estimator", c.hl_estimator, "HL-moment estimator: sample, bh or plugin")
            ->capture_default_str();
        sub->add_option("--bias-replicates", c.bias_replicates, "Monte-Carlo replicates for the HL bias correction")
            ->capture_default_str();
        sub->add_option("--bias-seed", c.bias_seed, "Seed of the HL bias Monte-Carlo")->capture_default_str();
    };

    auto* stats = app.add_subcommand("stats", "Summary statistics for every variable");
    add_common(stats);
    add_matrix(stats, true);

    auto* scr = app.add_subcommand("screen", "Rank variables by one statistic and export the selection");
    add_common(scr);
    add_matrix(scr, true);
    scr->add_option("--stat", c.stat, "Statistic id")->capture_default_str();
    scr->add_option("--k", c.k, "Size of the selection")->capture_default_str();
    scr->add_option("--direction", c.direction, "ascending or descending")->capture_default_str();
    scr->add_option("--labels", c.labels, "Two-column file of sample id and class label");

    auto* gs = app.add_subcommand("gsea", "Gene set enrichment of statistic rankings");
    add_common(gs);
    add_matrix(gs, false);
    gs->add_option("--gmt", c.gmt, "Gene sets in GMT format")->required();
    gs->add_option("--ranked", c.ranked, "Precomputed ranked list (rank, id, metric) instead of --input");
    gs->add_option("--stat", c.stat, "Statistic id")->capture_default_str();
    gs->add_option("--stats", c.stats, "Two or more statistic ids: compare estimators")->delimiter(',');
    gs->add_option("--permutations", c.permutations, "Label permutations")->capture_default_str();
    gs->add_option("--fdr-levels", c.fdr_levels, "FDR levels")->delimiter(',')->capture_default_str();
    gs->add_option("--weight-p", c.weight_p, "Hit weight exponent p")->capture_default_str();
    gs->add_option("--min-size", c.min_size, "Smallest set tested")->capture_default_str();
    gs->add_option("--max-size", c.max_size, "Largest set tested")->capture_default_str();
    gs->add_option("--profiles", c.profiles, "Running-ES profiles exported for the top sets")->capture_default_str();

    auto* rob = app.add_subcommand("robustness", "Growth orders of influence functions at Tukey h distributions");
    add_common(rob);
    rob->add_option("--stats", c.stats, "Statistic ids (default: the full robustness set)")->delimiter(',');
    rob->add_option("--h", c.h, "Tukey h values")->delimiter(',')->capture_default_str();
    rob->add_option("--x-grid", c.x_grid, "Contamination points (default 33 log-spaced on [1,100])")->delimiter(',');

    auto* sim = app.add_subcommand("simulate", "Write the planted-signal benchmark matrix and GMT");
    add_common(sim);
    sim->add_option("--variables", c.variables, "Number of variables")->capture_default_str();
    sim->add_option("--samples", c.samples, "Number of samples")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    if (c.threads > 0) omp_set_num_threads(c.threads);
    try {
        validate(c);
        if (*stats) cmd_stats(c);
        if (*scr) cmd_screen(c);
        if (*gs) cmd_gsea(c);
        if (*rob) cmd_robustness(c);
        if (*sim) cmd_simulate(c);
    } catch (const UnknownStatisticError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return 0;
}
