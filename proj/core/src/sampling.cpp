#include "polyeq/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace polyeq {

NormOrder::NormOrder(double order) : p(order) {
    if (!(order > 0.0)) {
        throw std::invalid_argument("norm order p must be > 0");
    }
}

PolyphaseIndex::PolyphaseIndex(std::vector<int> components) : phase(std::move(components)) {
    for (int v : phase) {
        if (v != 0 && v != 1) {
            throw std::invalid_argument("polyphase index components must be 0 or 1");
        }
    }
}

PolyphaseIndex::PolyphaseIndex(std::initializer_list<int> components)
    : PolyphaseIndex(std::vector<int>(components)) {}

std::string SamplingVariant::label() const {
    switch (kind) {
    case SamplingKind::Conventional:
        return "baseline";
    case SamplingKind::Lpf:
        return "lpf" + std::to_string(filter_size);
    case SamplingKind::Aps:
        return "aps";
    case SamplingKind::ApsLpf:
        return "aps" + std::to_string(filter_size);
    }
    return "?";
}

std::optional<SamplingVariant> SamplingVariant::parse(std::string_view label) {
    if (label == "baseline") {
        return conventional();
    }
    if (label == "aps") {
        return aps();
    }
    for (int j : {2, 3, 5}) {
        if (label == "lpf" + std::to_string(j)) {
            return lpf(j);
        }
        if (label == "aps" + std::to_string(j)) {
            return aps_lpf(j);
        }
    }
    return std::nullopt;
}

namespace {

void require_even_extents(const Tensor& x, const char* op) {
    for (std::size_t a = 0; a < x.spatial_rank(); ++a) {
        if (x.spatial_extent(a) % 2 != 0) {
            throw std::invalid_argument(std::string(op) + ": spatial extent " +
                                        std::to_string(x.spatial_extent(a)) + " is odd");
        }
    }
}

} // namespace

Tensor downsample_d2(const Tensor& x) {
    require_even_extents(x, "downsample_d2");
    std::vector<std::size_t> zero_phase(x.spatial_rank(), 0);
    return phase_slice(x, 2, zero_phase);
}

Tensor upsample_u2(const Tensor& y) {
    const std::size_t d = y.spatial_rank();
    const auto in_extents = y.spatial_extents();
    std::vector<std::size_t> out_shape = y.shape();
    for (std::size_t a = 0; a < d; ++a) {
        out_shape[y.rank() == 1 ? a : a + 1] = in_extents[a] * 2;
    }
    Tensor out(out_shape); // zero-filled

    std::vector<std::size_t> out_extents(d);
    for (std::size_t a = 0; a < d; ++a) {
        out_extents[a] = in_extents[a] * 2;
    }

    const std::size_t channels = y.channels();
    const std::size_t in_grid = y.spatial_size();
    const std::size_t out_grid = out.spatial_size();
    std::vector<std::size_t> coords(d);
    for (std::size_t n = 0; n < in_grid; ++n) {
        std::size_t rem = n;
        for (std::size_t a = d; a-- > 0;) {
            coords[a] = rem % in_extents[a];
            rem /= in_extents[a];
        }
        std::size_t dst = 0;
        for (std::size_t a = 0; a < d; ++a) {
            dst = dst * out_extents[a] + coords[a] * 2;
        }
        for (std::size_t c = 0; c < channels; ++c) {
            out[c * out_grid + dst] = y[c * in_grid + n];
        }
    }
    return out;
}

ApsResult aps_downsample(const Tensor& x, NormOrder p) {
    require_even_extents(x, "aps_downsample");
    const std::size_t d = x.spatial_rank();
    const std::size_t combos = std::size_t{1} << d;

    // Enumerate the 2^d corner phases in lexicographic order; ties break
    // toward the first (smallest) phase encountered.
    double best_norm = 0.0;
    std::size_t best = 0;
    bool tie = false;
    std::vector<Tensor> slices;
    slices.reserve(combos);
    std::vector<std::size_t> phase(d);
    for (std::size_t m = 0; m < combos; ++m) {
        for (std::size_t a = 0; a < d; ++a) {
            phase[a] = (m >> (d - 1 - a)) & 1;
        }
        slices.push_back(phase_slice(x, 2, phase));
        const double norm = lp_norm_pow(slices.back().values(), p.p);
        if (m == 0 || norm > best_norm) {
            best_norm = norm;
            best = m;
            tie = false;
        } else if (norm == best_norm) {
            tie = true;
        }
    }

    std::vector<int> index(d);
    for (std::size_t a = 0; a < d; ++a) {
        index[a] = static_cast<int>((best >> (d - 1 - a)) & 1);
    }
    return ApsResult{std::move(slices[best]), PolyphaseIndex(std::move(index)), tie};
}

Tensor aps_upsample(const Tensor& y, const PolyphaseIndex& i) {
    if (i.rank() != y.spatial_rank()) {
        throw std::invalid_argument("polyphase index rank does not match spatial rank");
    }
    Shift k;
    k.offsets.assign(i.phase.begin(), i.phase.end());
    return circular_shift(upsample_u2(y), k);
}

namespace {

// Normalized binomial rows; outer products form the 2-D kernels.
std::vector<double> binomial_kernel(int j) {
    switch (j) {
    case 2:
        return {0.5, 0.5};
    case 3:
        return {0.25, 0.5, 0.25};
    case 5:
        return {1.0 / 16.0, 4.0 / 16.0, 6.0 / 16.0, 4.0 / 16.0, 1.0 / 16.0};
    default:
        throw std::invalid_argument("blur filter size must be 2, 3 or 5");
    }
}

// One separable pass along spatial axis `axis`. Window offsets run from
// -floor((j-1)/2) to floor(j/2), circular; accumulation in kernel order.
Tensor convolve_axis(const Tensor& x, std::size_t axis, const std::vector<double>& kernel) {
    const std::size_t d = x.spatial_rank();
    const auto extents = x.spatial_extents();
    const std::size_t e = extents[axis];
    const auto j = static_cast<std::int64_t>(kernel.size());
    const std::int64_t lo = -((j - 1) / 2);

    // Stride of one step along `axis` within a channel grid.
    std::size_t axis_stride = 1;
    for (std::size_t a = axis + 1; a < d; ++a) {
        axis_stride *= extents[a];
    }

    Tensor out(x.shape());
    const std::size_t channels = x.channels();
    const std::size_t grid = x.spatial_size();
    std::vector<std::size_t> coords(d);
    for (std::size_t c = 0; c < channels; ++c) {
        const double* in = x.data() + c * grid;
        double* dst = out.data() + c * grid;
        for (std::size_t n = 0; n < grid; ++n) {
            std::size_t rem = n;
            for (std::size_t a = d; a-- > 0;) {
                coords[a] = rem % extents[a];
                rem /= extents[a];
            }
            const auto pos = static_cast<std::int64_t>(coords[axis]);
            const std::size_t base = n - coords[axis] * axis_stride;
            double acc = 0.0;
            for (std::int64_t t = 0; t < j; ++t) {
                std::int64_t src = pos + lo + t;
                if (src < 0) {
                    src += static_cast<std::int64_t>(e);
                } else if (src >= static_cast<std::int64_t>(e)) {
                    src -= static_cast<std::int64_t>(e);
                }
                acc += kernel[static_cast<std::size_t>(t)] * in[base + static_cast<std::size_t>(src) * axis_stride];
            }
            dst[n] = acc;
        }
    }
    return out;
}

} // namespace

Tensor blur(const Tensor& x, int filter_size) {
    const auto kernel = binomial_kernel(filter_size);
    Tensor out = convolve_axis(x, 0, kernel);
    for (std::size_t a = 1; a < x.spatial_rank(); ++a) {
        out = convolve_axis(out, a, kernel);
    }
    return out;
}

Tensor dense_maxpool(const Tensor& x, std::size_t window) {
    if (window < 1) {
        throw std::invalid_argument("max-pool window must be >= 1");
    }
    if (window == 1) {
        return x;
    }
    const std::size_t d = x.spatial_rank();
    const auto extents = x.spatial_extents();
    const auto w = static_cast<std::int64_t>(window);
    const std::int64_t lo = -((w - 1) / 2);

    std::size_t cells = 1;
    for (std::size_t a = 0; a < d; ++a) {
        cells *= window;
    }

    Tensor out(x.shape());
    const std::size_t channels = x.channels();
    const std::size_t grid = x.spatial_size();
    std::vector<std::size_t> coords(d);
    std::vector<std::size_t> probe(d);
    for (std::size_t c = 0; c < channels; ++c) {
        const double* in = x.data() + c * grid;
        double* dst = out.data() + c * grid;
        for (std::size_t n = 0; n < grid; ++n) {
            std::size_t rem = n;
            for (std::size_t a = d; a-- > 0;) {
                coords[a] = rem % extents[a];
                rem /= extents[a];
            }
            double best = -std::numeric_limits<double>::infinity();
            for (std::size_t m = 0; m < cells; ++m) {
                std::size_t rm = m;
                for (std::size_t a = d; a-- > 0;) {
                    const auto step = static_cast<std::int64_t>(rm % window);
                    rm /= window;
                    std::int64_t src = static_cast<std::int64_t>(coords[a]) + lo + step;
                    const auto e = static_cast<std::int64_t>(extents[a]);
                    if (src < 0) {
                        src += e;
                    } else if (src >= e) {
                        src -= e;
                    }
                    probe[a] = static_cast<std::size_t>(src);
                }
                std::size_t flat = 0;
                for (std::size_t a = 0; a < d; ++a) {
                    flat = flat * extents[a] + probe[a];
                }
                best = std::max(best, in[flat]);
            }
            dst[n] = best;
        }
    }
    return out;
}

PoolResult strided_pool(const Tensor& x, const SamplingVariant& variant, NormOrder p) {
    Tensor pooled = dense_maxpool(x, 2);
    if (variant.blurred()) {
        pooled = blur(pooled, variant.filter_size);
    }
    if (variant.adaptive()) {
        ApsResult aps = aps_downsample(pooled, p);
        return PoolResult{std::move(aps.output), std::move(aps.index), aps.tie};
    }
    return PoolResult{downsample_d2(pooled), std::nullopt, false};
}

} // namespace polyeq
