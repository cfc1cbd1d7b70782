#include "polyeq/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <stdexcept>
#include <string>

namespace polyeq {

namespace {

std::size_t checked_size(const std::vector<std::size_t>& shape) {
    if (shape.empty()) {
        throw std::invalid_argument("tensor shape must have at least one axis");
    }
    std::size_t n = 1;
    for (std::size_t e : shape) {
        if (e == 0) {
            throw std::invalid_argument("tensor extents must be >= 1");
        }
        n *= e;
    }
    return n;
}

} // namespace

Tensor::Tensor(std::vector<std::size_t> shape)
    : shape_(std::move(shape)), data_(checked_size(shape_), 0.0) {}

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
    if (checked_size(shape_) != data_.size()) {
        throw std::invalid_argument("tensor data length does not match shape");
    }
}

Tensor Tensor::from_values(std::vector<double> values) {
    std::vector<std::size_t> shape{values.size()};
    return Tensor(std::move(shape), std::move(values));
}

std::size_t Tensor::spatial_extent(std::size_t axis) const {
    if (axis >= spatial_rank()) {
        throw std::invalid_argument("spatial axis out of range");
    }
    return rank() == 1 ? shape_[0] : shape_[axis + 1];
}

std::vector<std::size_t> Tensor::spatial_extents() const {
    if (rank() == 1) {
        return {shape_[0]};
    }
    return std::vector<std::size_t>(shape_.begin() + 1, shape_.end());
}

std::size_t Tensor::spatial_size() const {
    return size() / channels();
}

bool operator==(const Tensor& a, const Tensor& b) {
    // bit-exact, not tolerance-based
    return a.shape_ == b.shape_ &&
           std::memcmp(a.data_.data(), b.data_.data(), a.data_.size() * sizeof(double)) == 0;
}

Tensor Tensor::reshaped(std::vector<std::size_t> shape) const {
    if (checked_size(shape) != data_.size()) {
        throw std::invalid_argument("reshape must preserve element count");
    }
    return Tensor(std::move(shape), data_);
}

namespace {

// Decomposes flat spatial index into per-axis coordinates (row-major).
void unravel(std::size_t flat, const std::vector<std::size_t>& extents, std::vector<std::size_t>& coords) {
    for (std::size_t a = extents.size(); a-- > 0;) {
        coords[a] = flat % extents[a];
        flat /= extents[a];
    }
}

std::size_t ravel(const std::vector<std::size_t>& coords, const std::vector<std::size_t>& extents) {
    std::size_t flat = 0;
    for (std::size_t a = 0; a < extents.size(); ++a) {
        flat = flat * extents[a] + coords[a];
    }
    return flat;
}

} // namespace

Tensor circular_shift(const Tensor& x, const Shift& k) {
    const std::size_t d = x.spatial_rank();
    if (k.rank() != d) {
        throw std::invalid_argument("shift rank " + std::to_string(k.rank()) +
                                    " does not match spatial rank " + std::to_string(d));
    }
    const auto extents = x.spatial_extents();

    // Normalized non-negative offsets; output(n) = x(n - k) becomes a
    // copy from source index (n - k) mod extent.
    std::vector<std::size_t> off(d);
    for (std::size_t a = 0; a < d; ++a) {
        const auto e = static_cast<std::int64_t>(extents[a]);
        std::int64_t m = k.offsets[a] % e;
        if (m < 0) {
            m += e;
        }
        off[a] = static_cast<std::size_t>(m);
    }

    Tensor out(x.shape());
    const std::size_t channels = x.channels();
    const std::size_t grid = x.spatial_size();
    std::vector<std::size_t> coords(d);
    for (std::size_t n = 0; n < grid; ++n) {
        unravel(n, extents, coords);
        for (std::size_t a = 0; a < d; ++a) {
            coords[a] = (coords[a] + extents[a] - off[a]) % extents[a];
        }
        const std::size_t src = ravel(coords, extents);
        for (std::size_t c = 0; c < channels; ++c) {
            out[c * grid + n] = x[c * grid + src];
        }
    }
    return out;
}

Tensor phase_slice(const Tensor& x, std::size_t stride, std::span<const std::size_t> phase) {
    const std::size_t d = x.spatial_rank();
    if (stride < 1) {
        throw std::invalid_argument("stride must be >= 1");
    }
    if (phase.size() != d) {
        throw std::invalid_argument("phase rank does not match spatial rank");
    }
    const auto extents = x.spatial_extents();
    std::vector<std::size_t> out_extents(d);
    for (std::size_t a = 0; a < d; ++a) {
        if (phase[a] >= stride) {
            throw std::invalid_argument("phase must lie in [0, stride)");
        }
        if (extents[a] % stride != 0) {
            throw std::invalid_argument("spatial extent " + std::to_string(extents[a]) +
                                        " not divisible by stride " + std::to_string(stride));
        }
        out_extents[a] = extents[a] / stride;
    }

    std::vector<std::size_t> out_shape = x.shape();
    for (std::size_t a = 0; a < d; ++a) {
        out_shape[x.rank() == 1 ? a : a + 1] = out_extents[a];
    }
    Tensor out(out_shape);

    const std::size_t channels = x.channels();
    const std::size_t in_grid = x.spatial_size();
    const std::size_t out_grid = out.spatial_size();
    std::vector<std::size_t> coords(d);
    for (std::size_t n = 0; n < out_grid; ++n) {
        unravel(n, out_extents, coords);
        for (std::size_t a = 0; a < d; ++a) {
            coords[a] = coords[a] * stride + phase[a];
        }
        const std::size_t src = ravel(coords, extents);
        for (std::size_t c = 0; c < channels; ++c) {
            out[c * out_grid + n] = x[c * in_grid + src];
        }
    }
    return out;
}

double lp_norm_pow(std::span<const double> values, double p) {
    if (!(p > 0.0)) {
        throw std::invalid_argument("norm order p must be > 0");
    }
    std::vector<double> powered(values.size());
    if (p == 2.0) {
        std::transform(values.begin(), values.end(), powered.begin(),
                       [](double v) { return v * v; });
    } else if (p == 1.0) {
        std::transform(values.begin(), values.end(), powered.begin(),
                       [](double v) { return std::abs(v); });
    } else {
        std::transform(values.begin(), values.end(), powered.begin(),
                       [p](double v) { return std::pow(std::abs(v), p); });
    }
    // Sorted accumulation: permutations of the same values sum to the
    // same bits, so norms of shifted signals compare consistently.
    std::sort(powered.begin(), powered.end());
    return std::accumulate(powered.begin(), powered.end(), 0.0);
}

double lp_norm(const Tensor& x, double p) {
    return std::pow(lp_norm_pow(x.values(), p), 1.0 / p);
}

} // namespace polyeq
