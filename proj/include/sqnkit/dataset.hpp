#pragma once

#include <vector>

#include "sqnkit/numerics.hpp"

namespace sqnkit {

/// One labeled datum: sparse features and a label in {-1, +1}.
struct SparseSample {
    SparseVector features;
    int label = 1;

    friend bool operator==(const SparseSample&, const SparseSample&) = default;
};

/// Immutable collection of samples sharing one feature dimension.
class LabeledDataset {
public:
    LabeledDataset() = default;
    /// Throws ArgumentError if a sample's dimension differs from `dim`, a label
    /// is not +-1, or the set is empty.
    LabeledDataset(std::vector<SparseSample> samples, std::size_t dim);

    std::size_t size() const noexcept { return samples_.size(); }
    std::size_t dim() const noexcept { return dim_; }
    bool empty() const noexcept { return samples_.empty(); }
    const SparseSample& operator[](std::size_t i) const { return samples_[i]; }
    const std::vector<SparseSample>& samples() const noexcept { return samples_; }

    friend bool operator==(const LabeledDataset&, const LabeledDataset&) = default;

private:
    std::vector<SparseSample> samples_;
    std::size_t dim_ = 0;
};

} // namespace sqnkit
