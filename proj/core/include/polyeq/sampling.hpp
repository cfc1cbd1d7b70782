#ifndef POLYEQ_SAMPLING_HPP
#define POLYEQ_SAMPLING_HPP

#include "polyeq/tensor.hpp"

#include <optional>
#include <string>
#include <string_view>

namespace polyeq {

/// Order of the l_p norm used to rank polyphase components.
struct NormOrder {
    double p = 2.0;

    NormOrder() = default;
    explicit NormOrder(double order);

    friend bool operator==(const NormOrder&, const NormOrder&) = default;
};

/// Grid selected by adaptive downsampling: one value in {0, 1} per
/// spatial axis (stride is fixed at 2 throughout).
struct PolyphaseIndex {
    std::vector<int> phase;

    PolyphaseIndex() = default;
    explicit PolyphaseIndex(std::vector<int> components);
    PolyphaseIndex(std::initializer_list<int> components);

    std::size_t rank() const { return phase.size(); }
    friend bool operator==(const PolyphaseIndex&, const PolyphaseIndex&) = default;
};

enum class SamplingKind {
    Conventional, ///< dense max-pool then fixed-grid decimation
    Lpf,          ///< anti-aliasing blur before decimation
    Aps,          ///< adaptive polyphase selection
    ApsLpf,       ///< blur before adaptive selection
};

/// Downsampling flavour of a network, e.g. "baseline", "lpf3", "aps5".
struct SamplingVariant {
    SamplingKind kind = SamplingKind::Conventional;
    int filter_size = 0; ///< blur size in {2,3,5}; 0 when kind has no blur

    static SamplingVariant conventional() { return {SamplingKind::Conventional, 0}; }
    static SamplingVariant lpf(int j) { return {SamplingKind::Lpf, j}; }
    static SamplingVariant aps() { return {SamplingKind::Aps, 0}; }
    static SamplingVariant aps_lpf(int j) { return {SamplingKind::ApsLpf, j}; }

    bool adaptive() const { return kind == SamplingKind::Aps || kind == SamplingKind::ApsLpf; }
    bool blurred() const { return kind == SamplingKind::Lpf || kind == SamplingKind::ApsLpf; }

    /// CLI label: baseline | lpf2 | lpf3 | lpf5 | aps | aps2 | aps3 | aps5.
    std::string label() const;
    static std::optional<SamplingVariant> parse(std::string_view label);

    friend bool operator==(const SamplingVariant&, const SamplingVariant&) = default;
};

/// Fixed-grid decimation y(n) = x(2n). Every spatial extent must be even.
Tensor downsample_d2(const Tensor& x);

/// Zero-insertion upsampling: output(2n) = y(n), zero at any location
/// with an odd coordinate. Doubles every spatial extent.
Tensor upsample_u2(const Tensor& y);

struct ApsResult {
    Tensor output;
    PolyphaseIndex index;
    bool tie = false; ///< another phase had a bit-identical norm
};

/// Adaptive polyphase downsampling: returns the stride-2 phase slice with
/// the highest l_p norm (norms taken jointly over all channels) together
/// with the selected grid index. Exact norm ties break toward the
/// lexicographically smallest phase and are flagged.
ApsResult aps_downsample(const Tensor& x, NormOrder p = NormOrder{});

/// Adaptive polyphase upsampling: places samples back on the grid chosen
/// by aps_downsample, i.e. circular_shift(upsample_u2(y), i).
Tensor aps_upsample(const Tensor& y, const PolyphaseIndex& i);

/// Per-channel circular convolution with the normalized binomial kernel
/// of size j in {2,3,5} ([1,1]/2, [1,2,1]/4, [1,4,6,4,1]/16), applied
/// separably along each spatial axis. Shape preserved. The even kernel
/// anchors at {n, n+1}.
Tensor blur(const Tensor& x, int filter_size);

/// Stride-1 max-pool over the circular window anchored at
/// {n - floor((w-1)/2), ..., n + floor(w/2)} per axis; shape preserved.
Tensor dense_maxpool(const Tensor& x, std::size_t window);

struct PoolResult {
    Tensor output;
    std::optional<PolyphaseIndex> index; ///< engaged for adaptive variants
    bool tie = false;
};

/// The stride-2 pooling layer of each variant: dense max-pool (window 2),
/// optional blur, then fixed or adaptive decimation.
PoolResult strided_pool(const Tensor& x, const SamplingVariant& variant, NormOrder p = NormOrder{});

} // namespace polyeq

#endif
