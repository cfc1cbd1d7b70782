#ifndef POLYEQ_UNET_HPP
#define POLYEQ_UNET_HPP

#include "polyeq/nn.hpp"
#include "polyeq/sampling.hpp"
#include "polyeq/tensor.hpp"

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace polyeq {

struct NetworkConfig {
    std::size_t scales = 3;                            ///< L
    std::vector<std::size_t> channels = {8, 16, 32, 64}; ///< L+1 widths
    SamplingVariant variant = SamplingVariant::aps();
    NormOrder p{};
    std::uint64_t seed = 0;
    std::size_t in_channels = 1;
    std::size_t out_channels = 1;
    std::size_t kernel_size = 3;
    std::size_t spatial_rank = 2; ///< 1 for 1-D signals, 2 for images

    void validate() const;
    friend bool operator==(const NetworkConfig&, const NetworkConfig&) = default;
};

/// Per-forward record of the grids chosen by each adaptive downsampling
/// layer, scale 0 first. Empty for non-adaptive variants.
struct IndexTrace {
    std::vector<PolyphaseIndex> indices;
    int ties = 0; ///< exact polyphase-norm ties observed across all scales

    friend bool operator==(const IndexTrace&, const IndexTrace&) = default;
};

struct ForwardResult {
    Tensor output;
    IndexTrace trace;
};

/// ForwardResult plus the internal feature maps tests poke at.
struct ForwardDetail {
    Tensor output;
    IndexTrace trace;
    std::vector<Tensor> encoder_features; ///< s_e per scale, 0..L
    std::vector<Tensor> decoder_features; ///< upsampled s_d per scale, 0..L-1
};

/// Symmetric encoder-decoder network. Each encoder scale runs a conv
/// block then the variant's strided pooling; each decoder scale upsamples
/// (routing the grid index recorded by the same-scale pooling layer back
/// into adaptive upsampling), concatenates the skip feature, and runs a
/// conv block. A final 1x1 projection maps to the output channels.
///
/// Immutable after build; forward is a pure function.
struct Network {
    NetworkConfig cfg;
    std::vector<Block> encoder;         ///< L+1 blocks, index = scale
    std::vector<ConvKernel> up_kernels; ///< L kernels, index = target scale
    std::vector<Block> decoder;         ///< L blocks, index = scale
    ConvKernel output_proj;

    static Network build(const NetworkConfig& cfg);

    /// Input spatial extents must be divisible by 2^L and channels must
    /// match cfg.in_channels. A rank-1 input is treated as one channel
    /// and returned as rank-1 when out_channels == 1.
    ForwardResult forward(const Tensor& x) const;
    ForwardDetail forward_detail(const Tensor& x) const;

    std::size_t parameter_count() const;

    /// Kernels in serialization order: encoder scale 0..L, then for each
    /// decoder scale L-1..0 the upsample kernel and block, then the
    /// output projection.
    std::vector<ConvKernel> collect_kernels() const;
    void assign_kernels(std::vector<ConvKernel> kernels);
};

/// Plain-text key=value header (scales, channels, variant, p, seed, ...)
/// followed by a blank line and the APSW weight container.
void save_network(std::ostream& os, const Network& net);
Network load_network(std::istream& is);

struct FlipCheckScale {
    Shift effective_shift;   ///< shift entering this scale's pooling layer
    PolyphaseIndex observed; ///< index recorded by the shifted pass
    PolyphaseIndex predicted;///< keep-or-flip of the base pass's index
    bool pass = false;
};

struct FlipCheckReport {
    std::vector<FlipCheckScale> scales;
    bool all_pass = true;
};

/// Verifies, scale by scale, that shifting the input flips the recorded
/// polyphase index exactly when the effective shift at that scale is odd
/// (per axis), where effective shifts follow the downsampling recursion
/// k -> k/2 for even k and k -> (k + 2i - 1)/2 for odd k.
FlipCheckReport index_trace_flip_check(const Network& net, const Tensor& x, const Shift& k);

/// Channel-axis concatenation of tensors with identical spatial extents.
Tensor concat_channels(const Tensor& a, const Tensor& b);

} // namespace polyeq

#endif
