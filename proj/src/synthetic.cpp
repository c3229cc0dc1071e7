#include "gcl/synthetic.hpp"

#include "gcl/rng.hpp"

#include <fmt/format.h>

#include <numeric>

namespace gcl::synth {

PlantedSignal planted_signal(std::uint64_t seed, const PlantedSignalOptions& o) {
    if (o.planted > o.variables) throw DomainError("more planted variables than variables");
    const std::size_t controls = o.variables - o.planted;
    if (o.random_sets > 0 && o.random_set_size > controls) throw DomainError("random sets larger than the control pool");

    std::vector<std::string> ids;
    for (std::size_t i = 0; i < o.planted; ++i) ids.push_back(fmt::format("planted_{:03}", i + 1));
    for (std::size_t i = 0; i < controls; ++i) ids.push_back(fmt::format("control_{:03}", i + 1));
    std::vector<std::string> samples;
    for (std::size_t j = 0; j < o.samples; ++j) samples.push_back(fmt::format("s{:03}", j + 1));

    std::vector<double> values(o.variables * o.samples);
    for (std::size_t i = 0; i < o.variables; ++i) {
        rng::Stream stream(seed, i);
        double* row = values.data() + i * o.samples;
        for (std::size_t j = 0; j < o.samples; ++j) {
            const bool shifted = i < o.planted && stream.uniform() < o.mixture_weight;
            const double z = stream.normal();
            const bool outlier = stream.uniform() < o.contamination;
            const double w = stream.normal();
            if (outlier) {
                row[j] = o.outlier_scale * w;
            } else {
                row[j] = shifted ? o.mixture_shift + o.mixture_scale * z : z;
            }
        }
    }

    PlantedSignal out{screen::DataMatrix(ids, samples, std::move(values)), {}};
    out.sets.sets.push_back({"PLANTED", "left-skewed two-component mixtures",
                             {ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(o.planted)}});
    rng::Stream picker(seed, o.variables);
    std::vector<std::size_t> pool(controls);
    std::iota(pool.begin(), pool.end(), o.planted);
    for (std::size_t s = 0; s < o.random_sets; ++s) {
        rng::shuffle(std::span<std::size_t>(pool), picker);
        gsea::GeneSet set{fmt::format("RANDOM_{:02}", s + 1), "random control variables", {}};
        for (std::size_t k = 0; k < o.random_set_size; ++k) set.members.push_back(ids[pool[k]]);
        out.sets.sets.push_back(std::move(set));
    }
    return out;
}

std::string gmt_text(const gsea::GeneSetCollection& sets) {
    std::string out;
    for (const auto& s : sets.sets) {
        out += s.name + "\t" + s.description;
        for (const auto& m : s.members) out += "\t" + m;
        out += "\n";
    }
    return out;
}

std::string matrix_tsv(const screen::DataMatrix& matrix) {
    std::string out = "id";
    for (const auto& s : matrix.sample_ids()) out += "\t" + s;
    out += "\n";
    for (std::size_t i = 0; i < matrix.p(); ++i) {
        out += matrix.variable_ids()[i];
        for (double v : matrix.row(i)) out += fmt::format("\t{:.17g}", v);
        out += "\n";
    }
    return out;
}

}  // namespace gcl::synth
