#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "gcl/errors.hpp"

namespace gcl {

/// Identifiers of every per-variable measure the library produces.
enum class Statistic {
    Mean,
    Sd,
    Skewness,
    Kurtosis,
    L2,
    LSkewness,
    LKurtosis,
    HL2,
    HLSkewness,
    HLKurtosis,
    RL2,
    RLSkewness,
    RLKurtosis,
    Bowley,
    Ruppert,
};

inline constexpr std::array kAllStatistics{
    Statistic::Mean,       Statistic::Sd,         Statistic::Skewness,  Statistic::Kurtosis,
    Statistic::L2,         Statistic::LSkewness,  Statistic::LKurtosis, Statistic::HL2,
    Statistic::HLSkewness, Statistic::HLKurtosis, Statistic::RL2,       Statistic::RLSkewness,
    Statistic::RLKurtosis, Statistic::Bowley,     Statistic::Ruppert,
};

class UnknownStatisticError : public Error {
public:
    using Error::Error;
};

std::string_view to_string(Statistic s) noexcept;

/// Parses an identifier such as "l_skewness"; the error lists every valid id.
Statistic parse_statistic(std::string_view id);

std::string available_statistics();

bool is_skewness(Statistic s) noexcept;
bool is_kurtosis(Statistic s) noexcept;

}  // namespace gcl
