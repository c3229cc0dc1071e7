#pragma once

#include <span>
#include <vector>

namespace gcl {

/// Observations together with their order statistics X_{1:n} <= ... <= X_{n:n}.
/// Values must be finite; ties are kept (stable sort, no jitter).
class Sample {
public:
    explicit Sample(std::vector<double> values);

    std::size_t size() const noexcept { return values_.size(); }
    std::span<const double> values() const noexcept { return values_; }
    std::span<const double> sorted() const noexcept { return sorted_; }

    /// The sample a*X + b.
    Sample affine(double a, double b) const;

private:
    std::vector<double> values_;
    std::vector<double> sorted_;
};

}  // namespace gcl
