#ifndef POLYEQ_TENSOR_HPP
#define POLYEQ_TENSOR_HPP

#include <cstdint>
#include <span>
#include <vector>

namespace polyeq {

/// Dense N-dimensional array of doubles, row-major.
///
/// Axis convention: a rank-1 tensor is a single-channel 1-D signal; for
/// rank >= 2 the leading axis is the channel axis and the remaining axes
/// are spatial (channels x length in 1-D, channels x height x width in
/// 2-D). All operations treat tensors as immutable values.
class Tensor {
public:
    /// Zero-filled tensor. Every extent must be >= 1.
    explicit Tensor(std::vector<std::size_t> shape);

    /// Takes ownership of `data`; product(shape) must equal data.size().
    Tensor(std::vector<std::size_t> shape, std::vector<double> data);

    /// Rank-1 tensor from a flat value list.
    static Tensor from_values(std::vector<double> values);

    const std::vector<std::size_t>& shape() const { return shape_; }
    std::size_t rank() const { return shape_.size(); }
    std::size_t size() const { return data_.size(); }

    std::size_t channels() const { return rank() == 1 ? 1 : shape_[0]; }
    std::size_t spatial_rank() const { return rank() == 1 ? 1 : rank() - 1; }
    std::size_t spatial_extent(std::size_t axis) const;
    std::vector<std::size_t> spatial_extents() const;
    /// Elements of one spatial grid (product of spatial extents).
    std::size_t spatial_size() const;

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    std::span<const double> values() const { return data_; }

    double& operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }

    bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }

    /// Identical shape and bit-identical payload.
    friend bool operator==(const Tensor& a, const Tensor& b);

    /// Same data reinterpreted under a new shape of equal total size.
    Tensor reshaped(std::vector<std::size_t> shape) const;

private:
    std::vector<std::size_t> shape_;
    std::vector<double> data_;
};

/// Circular translation amounts, one signed offset per spatial axis.
struct Shift {
    std::vector<std::int64_t> offsets;

    Shift() = default;
    explicit Shift(std::vector<std::int64_t> k) : offsets(std::move(k)) {}
    Shift(std::initializer_list<std::int64_t> k) : offsets(k) {}

    std::size_t rank() const { return offsets.size(); }
    friend bool operator==(const Shift&, const Shift&) = default;
};

/// output(n) = x((n - k) mod extent) along each spatial axis; the channel
/// axis is untouched. Throws std::invalid_argument if k.rank() differs
/// from x.spatial_rank().
Tensor circular_shift(const Tensor& x, const Shift& k);

/// output(n) = x(stride*n + phase) along each spatial axis. Every spatial
/// extent must be divisible by `stride` and each phase must lie in
/// [0, stride).
Tensor phase_slice(const Tensor& x, std::size_t stride, std::span<const std::size_t> phase);

/// (sum_i |x_i|^p)^(1/p) for p > 0.
///
/// Magnitudes are accumulated in sorted order so any spatial permutation
/// of the same values produces a bit-identical result.
double lp_norm(const Tensor& x, double p);

/// sum_i |x_i|^p over a raw value range, sorted accumulation. The
/// monotone core of lp_norm, shared with the sampling argmax.
double lp_norm_pow(std::span<const double> values, double p);

} // namespace polyeq

#endif
