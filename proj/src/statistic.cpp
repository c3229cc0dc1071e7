#include "gcl/statistic.hpp"

namespace gcl {

std::string_view to_string(Statistic s) noexcept {
    switch (s) {
        case Statistic::Mean: return "mean";
        case Statistic::Sd: return "sd";
        case Statistic::Skewness: return "skewness";
        case Statistic::Kurtosis: return "kurtosis";
        case Statistic::L2: return "l2";
        case Statistic::LSkewness: return "l_skewness";
        case Statistic::LKurtosis: return "l_kurtosis";
        case Statistic::HL2: return "hl2";
        case Statistic::HLSkewness: return "hl_skewness";
        case Statistic::HLKurtosis: return "hl_kurtosis";
        case Statistic::RL2: return "rl2";
        case Statistic::RLSkewness: return "rl_skewness";
        case Statistic::RLKurtosis: return "rl_kurtosis";
        case Statistic::Bowley: return "bowley";
        case Statistic::Ruppert: return "ruppert";
    }
    return "unknown";
}

std::string available_statistics() {
    std::string out;
    for (auto s : kAllStatistics) {
        if (!out.empty()) out += ", ";
        out += to_string(s);
    }
    return out;
}

Statistic parse_statistic(std::string_view id) {
    for (auto s : kAllStatistics) {
        if (to_string(s) == id) return s;
    }
    throw UnknownStatisticError("unknown statistic '" + std::string(id) + "'; available: " + available_statistics());
}

bool is_skewness(Statistic s) noexcept {
    return s == Statistic::Skewness || s == Statistic::LSkewness || s == Statistic::HLSkewness ||
           s == Statistic::RLSkewness || s == Statistic::Bowley;
}

bool is_kurtosis(Statistic s) noexcept {
    return s == Statistic::Kurtosis || s == Statistic::LKurtosis || s == Statistic::HLKurtosis ||
           s == Statistic::RLKurtosis || s == Statistic::Ruppert;
}

}  // namespace gcl
