#include "polyeq/nn.hpp"

#include "polyeq/rng.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

namespace polyeq {

std::size_t ConvKernel::fan_in() const {
    return in_channels * std::accumulate(taps.begin(), taps.end(), std::size_t{1},
                                         std::multiplies<>());
}

std::size_t ConvKernel::weight_count() const {
    return out_channels * fan_in();
}

void ConvKernel::validate() const {
    if (out_channels == 0 || in_channels == 0) {
        throw std::invalid_argument("conv kernel needs at least one channel each way");
    }
    if (taps.empty() || taps.size() > 2) {
        throw std::invalid_argument("conv kernel supports 1 or 2 spatial axes");
    }
    for (std::size_t t : taps) {
        if (t % 2 == 0) {
            throw std::invalid_argument("conv taps must be odd for centered circular windows");
        }
    }
    if (weights.size() != weight_count() || bias.size() != out_channels) {
        throw std::invalid_argument("conv kernel payload sizes do not match header");
    }
}

namespace {

// Wrapped source index per (position, tap) pair, precomputed so the hot
// loop is branch-free: map[pos + t] == (pos + t - center) mod extent.
std::vector<std::size_t> wrap_table(std::size_t extent, std::size_t taps) {
    const auto e = static_cast<std::int64_t>(extent);
    const std::int64_t center = (static_cast<std::int64_t>(taps) - 1) / 2;
    std::vector<std::size_t> map(extent + taps);
    for (std::size_t i = 0; i < map.size(); ++i) {
        std::int64_t src = static_cast<std::int64_t>(i) - center;
        src %= e;
        if (src < 0) {
            src += e;
        }
        map[i] = static_cast<std::size_t>(src);
    }
    return map;
}

} // namespace

Tensor conv_circular(const Tensor& x, const ConvKernel& k) {
    k.validate();
    const std::size_t d = x.spatial_rank();
    if (d != k.spatial_rank()) {
        throw std::invalid_argument("kernel spatial rank does not match input");
    }
    if (x.channels() != k.in_channels) {
        throw std::invalid_argument("conv expects " + std::to_string(k.in_channels) +
                                    " input channels, got " + std::to_string(x.channels()));
    }

    const auto extents = x.spatial_extents();
    std::vector<std::size_t> out_shape;
    out_shape.push_back(k.out_channels);
    out_shape.insert(out_shape.end(), extents.begin(), extents.end());
    Tensor out(out_shape);

    const std::size_t grid = x.spatial_size();
    const double* in = x.data();
    double* dst = out.data();

    if (d == 1) {
        const std::size_t n = extents[0];
        const std::size_t kt = k.taps[0];
        const auto map = wrap_table(n, kt);
        for (std::size_t oc = 0; oc < k.out_channels; ++oc) {
            const double* wk = k.weights.data() + oc * k.in_channels * kt;
            for (std::size_t pos = 0; pos < n; ++pos) {
                double acc = k.bias[oc];
                for (std::size_t ic = 0; ic < k.in_channels; ++ic) {
                    const double* src = in + ic * grid;
                    const double* w = wk + ic * kt;
                    for (std::size_t t = 0; t < kt; ++t) {
                        acc += w[t] * src[map[pos + t]];
                    }
                }
                dst[oc * grid + pos] = acc;
            }
        }
        return out;
    }

    const std::size_t h = extents[0];
    const std::size_t w = extents[1];
    const std::size_t kh = k.taps[0];
    const std::size_t kw = k.taps[1];
    const auto rows = wrap_table(h, kh);
    const auto cols = wrap_table(w, kw);
    for (std::size_t oc = 0; oc < k.out_channels; ++oc) {
        const double* wk = k.weights.data() + oc * k.in_channels * kh * kw;
        double* out_ch = dst + oc * grid;
        for (std::size_t y = 0; y < h; ++y) {
            for (std::size_t xx = 0; xx < w; ++xx) {
                double acc = k.bias[oc];
                for (std::size_t ic = 0; ic < k.in_channels; ++ic) {
                    const double* src = in + ic * grid;
                    const double* wik = wk + ic * kh * kw;
                    for (std::size_t t0 = 0; t0 < kh; ++t0) {
                        const double* row = src + rows[y + t0] * w;
                        const double* wrow = wik + t0 * kw;
                        for (std::size_t t1 = 0; t1 < kw; ++t1) {
                            acc += wrow[t1] * row[cols[xx + t1]];
                        }
                    }
                }
                out_ch[y * w + xx] = acc;
            }
        }
    }
    return out;
}

Tensor relu(const Tensor& x) {
    Tensor out(x.shape());
    const double* in = x.data();
    double* dst = out.data();
    for (std::size_t i = 0; i < x.size(); ++i) {
        dst[i] = in[i] > 0.0 ? in[i] : 0.0;
    }
    return out;
}

Tensor Block::forward(const Tensor& x) const {
    Tensor cur = x;
    for (const Layer& layer : layers) {
        if (const auto* conv = std::get_if<ConvKernel>(&layer)) {
            cur = conv_circular(cur, *conv);
        } else {
            cur = relu(cur);
        }
    }
    return cur;
}

std::size_t Block::check_chain(std::size_t input_channels) const {
    std::size_t channels = input_channels;
    for (const Layer& layer : layers) {
        if (const auto* conv = std::get_if<ConvKernel>(&layer)) {
            conv->validate();
            if (conv->in_channels != channels) {
                throw std::invalid_argument("block conv expects " +
                                            std::to_string(conv->in_channels) +
                                            " channels, previous layer yields " +
                                            std::to_string(channels));
            }
            channels = conv->out_channels;
        }
    }
    return channels;
}

Tensor upsample_block(const Tensor& y, const SamplingVariant& variant,
                      const std::optional<PolyphaseIndex>& index, const ConvKernel& k) {
    if (variant.adaptive()) {
        if (!index) {
            throw std::invalid_argument("adaptive upsampling requires the recorded polyphase index");
        }
        return conv_circular(aps_upsample(y, *index), k);
    }
    if (index) {
        throw std::invalid_argument("non-adaptive upsampling must not receive a polyphase index");
    }
    return conv_circular(upsample_u2(y), k);
}

ConvKernel init_conv(std::size_t out_channels, std::size_t in_channels,
                     std::vector<std::size_t> taps, std::uint64_t seed) {
    ConvKernel k;
    k.out_channels = out_channels;
    k.in_channels = in_channels;
    k.taps = std::move(taps);
    const double bound = 1.0 / std::sqrt(static_cast<double>(k.fan_in()));
    std::mt19937_64 rng(seed);
    k.weights.resize(k.weight_count());
    for (double& w : k.weights) {
        w = uniform_symmetric(rng, bound);
    }
    k.bias.resize(out_channels);
    for (double& b : k.bias) {
        b = uniform_symmetric(rng, bound);
    }
    k.validate();
    return k;
}

Block init_block(const BlockSpec& spec, std::uint64_t seed) {
    if (spec.widths.empty()) {
        throw std::invalid_argument("block needs at least one conv");
    }
    std::uint64_t state = seed;
    Block block;
    std::size_t in = spec.in_channels;
    std::vector<std::size_t> taps(spec.spatial_rank, spec.kernel_size);
    for (std::size_t width : spec.widths) {
        block.layers.emplace_back(init_conv(width, in, taps, splitmix64(state)));
        block.layers.emplace_back(ReluLayer{});
        in = width;
    }
    return block;
}

namespace {

constexpr char kWeightsMagic[4] = {'A', 'P', 'S', 'W'};
constexpr std::uint32_t kWeightsVersion = 1;

void write_u32(std::ostream& os, std::uint32_t v) {
    char buf[4];
    for (int i = 0; i < 4; ++i) {
        buf[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
    }
    os.write(buf, 4);
}

void write_f64(std::ostream& os, double v) {
    auto bits = std::bit_cast<std::uint64_t>(v);
    char buf[8];
    for (int i = 0; i < 8; ++i) {
        buf[i] = static_cast<char>((bits >> (8 * i)) & 0xFF);
    }
    os.write(buf, 8);
}

std::uint32_t read_u32(std::istream& is) {
    unsigned char buf[4];
    if (!is.read(reinterpret_cast<char*>(buf), 4)) {
        throw std::runtime_error("weight container truncated");
    }
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) {
        v = (v << 8) | buf[i];
    }
    return v;
}

double read_f64(std::istream& is) {
    unsigned char buf[8];
    if (!is.read(reinterpret_cast<char*>(buf), 8)) {
        throw std::runtime_error("weight container truncated");
    }
    std::uint64_t bits = 0;
    for (int i = 7; i >= 0; --i) {
        bits = (bits << 8) | buf[i];
    }
    return std::bit_cast<double>(bits);
}

} // namespace

void save_weights(std::ostream& os, const std::vector<ConvKernel>& kernels) {
    os.write(kWeightsMagic, 4);
    write_u32(os, kWeightsVersion);
    write_u32(os, static_cast<std::uint32_t>(kernels.size()));
    for (const ConvKernel& k : kernels) {
        k.validate();
        write_u32(os, static_cast<std::uint32_t>(k.out_channels));
        write_u32(os, static_cast<std::uint32_t>(k.in_channels));
        write_u32(os, static_cast<std::uint32_t>(k.taps.size()));
        for (std::size_t t : k.taps) {
            write_u32(os, static_cast<std::uint32_t>(t));
        }
        for (double w : k.weights) {
            write_f64(os, w);
        }
        for (double b : k.bias) {
            write_f64(os, b);
        }
    }
    if (!os) {
        throw std::runtime_error("failed to write weight container");
    }
}

std::vector<ConvKernel> load_weights(std::istream& is) {
    char magic[4];
    if (!is.read(magic, 4) || std::memcmp(magic, kWeightsMagic, 4) != 0) {
        throw std::runtime_error("not an APSW weight container");
    }
    const std::uint32_t version = read_u32(is);
    if (version != kWeightsVersion) {
        throw std::runtime_error("unsupported weight container version " + std::to_string(version));
    }
    const std::uint32_t count = read_u32(is);
    std::vector<ConvKernel> kernels;
    kernels.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        ConvKernel k;
        k.out_channels = read_u32(is);
        k.in_channels = read_u32(is);
        const std::uint32_t rank = read_u32(is);
        if (rank == 0 || rank > 2) {
            throw std::runtime_error("weight container kernel rank out of range");
        }
        k.taps.resize(rank);
        for (std::uint32_t a = 0; a < rank; ++a) {
            k.taps[a] = read_u32(is);
        }
        k.weights.resize(k.weight_count());
        for (double& w : k.weights) {
            w = read_f64(is);
        }
        k.bias.resize(k.out_channels);
        for (double& b : k.bias) {
            b = read_f64(is);
        }
        k.validate();
        kernels.push_back(std::move(k));
    }
    return kernels;
}

} // namespace polyeq
