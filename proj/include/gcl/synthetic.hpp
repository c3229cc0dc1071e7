#pragma once

#include "gcl/gsea.hpp"
#include "gcl/screening.hpp"

#include <cstdint>

namespace gcl::synth {

/// Layout of the planted-signal screening benchmark.
struct PlantedSignalOptions {
    std::size_t variables = 500;
    std::size_t samples = 300;
    std::size_t planted = 50;         ///< 0.8 N(0,1) + 0.2 N(shift, scale^2)
    double mixture_weight = 0.2;
    double mixture_shift = -2.5;
    double mixture_scale = 0.5;
    /// Controls are N(0,1). Every cell of every variable is replaced, with
    /// probability contamination, by a draw from N(0, outlier_scale^2).
    double contamination = 0.03;
    double outlier_scale = 3.0;
    std::size_t random_sets = 20;
    std::size_t random_set_size = 50;
};

struct PlantedSignal {
    screen::DataMatrix matrix;
    gsea::GeneSetCollection sets;  ///< "PLANTED", then "RANDOM_01".. drawn from the controls
};

/// Variables are named planted_### and control_### and stored in that order. Everything is drawn from rng::Stream(seed, *) so the data are
/// reproducible across platforms.
PlantedSignal planted_signal(std::uint64_t seed, const PlantedSignalOptions& options = {});

std::string gmt_text(const gsea::GeneSetCollection& sets);
std::string matrix_tsv(const screen::DataMatrix& matrix);

}  // namespace gcl::synth
