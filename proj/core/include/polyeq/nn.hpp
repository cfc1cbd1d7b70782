#ifndef POLYEQ_NN_HPP
#define POLYEQ_NN_HPP

#include "polyeq/sampling.hpp"
#include "polyeq/tensor.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <variant>
#include <vector>

namespace polyeq {

/// Learnable convolution: weights laid out (out, in, taps...) row-major.
/// Spatial tap counts must be odd (1x1 projections included) so circular
/// convolution preserves shape with a centered window.
struct ConvKernel {
    std::size_t out_channels = 0;
    std::size_t in_channels = 0;
    std::vector<std::size_t> taps; ///< one odd extent per spatial axis (1 or 2 axes)
    std::vector<double> weights;
    std::vector<double> bias;

    std::size_t spatial_rank() const { return taps.size(); }
    std::size_t fan_in() const;
    std::size_t weight_count() const;
    void validate() const;
};

/// Circular same-shape convolution plus bias. Accumulation runs in fixed
/// (in-channel, tap...) order per output sample, so shifting the input
/// circularly shifts the output bit-exactly.
Tensor conv_circular(const Tensor& x, const ConvKernel& k);

/// Elementwise max(0, x).
Tensor relu(const Tensor& x);

struct ReluLayer {
    friend bool operator==(const ReluLayer&, const ReluLayer&) = default;
};

using Layer = std::variant<ConvKernel, ReluLayer>;

/// Ordered stack of convolutions and ReLUs.
struct Block {
    std::vector<Layer> layers;

    Tensor forward(const Tensor& x) const;

    /// Walks the conv chain, throwing if channel counts do not link up;
    /// returns the block's output channel count.
    std::size_t check_chain(std::size_t input_channels) const;
};

/// The decoder's upsampling step: zero-insertion upsampling (adaptive or
/// fixed-grid per `variant`) followed by a circular convolution. Adaptive
/// variants require the grid index recorded by the matching downsampling
/// layer; others must not receive one.
Tensor upsample_block(const Tensor& y, const SamplingVariant& variant,
                      const std::optional<PolyphaseIndex>& index, const ConvKernel& k);

struct BlockSpec {
    std::size_t in_channels = 1;
    std::vector<std::size_t> widths; ///< output channels of each conv, in order
    std::size_t kernel_size = 3;
    std::size_t spatial_rank = 2;
};

/// Deterministic conv kernel: weights and bias uniform in [-a, a) with
/// a = 1/sqrt(fan-in), reproducible from the seed.
ConvKernel init_conv(std::size_t out_channels, std::size_t in_channels,
                     std::vector<std::size_t> taps, std::uint64_t seed);

/// Conv+ReLU stack per `spec` with seed-derived weights.
Block init_block(const BlockSpec& spec, std::uint64_t seed);

/// Weight container ("APSW"): magic, u32 version, then for each kernel a
/// shape header followed by float64 payload, all little-endian.
void save_weights(std::ostream& os, const std::vector<ConvKernel>& kernels);
std::vector<ConvKernel> load_weights(std::istream& is);

} // namespace polyeq

#endif
