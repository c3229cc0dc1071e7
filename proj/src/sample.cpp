#include "gcl/sample.hpp"

#include "gcl/errors.hpp"

#include <algorithm>
#include <cmath>

namespace gcl {

Sample::Sample(std::vector<double> values) : values_(std::move(values)) {
    for (double v : values_) {
        if (!std::isfinite(v)) throw DomainError("sample values must be finite");
    }
    sorted_ = values_;
    std::stable_sort(sorted_.begin(), sorted_.end());
}

Sample Sample::affine(double a, double b) const {
    std::vector<double> out(values_.size());
    std::transform(values_.begin(), values_.end(), out.begin(), [a, b](double v) { return a * v + b; });
    return Sample(std::move(out));
}

}  // namespace gcl
