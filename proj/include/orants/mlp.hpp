#pragma once

// Plain dense MLP in doubles: rectifier hidden layers, identity output,
// hand-rolled forward/backward so gradients can be checked against finite
// differences.

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "orants/error.hpp"
#include "orants/rng.hpp"

namespace orants {

struct QNetwork {
    std::vector<int> sizes;                   // [input, hidden..., output]
    std::vector<std::vector<double>> weights; // weights[l] is sizes[l+1] x sizes[l], row-major
    std::vector<std::vector<double>> biases;  // biases[l] has sizes[l+1] entries

    int input_dim() const { return sizes.front(); }
    int output_dim() const { return sizes.back(); }
    int n_layers() const { return static_cast<int>(sizes.size()) - 1; }

    std::size_t parameter_count() const {
        std::size_t p = 0;
        for (int l = 0; l < n_layers(); ++l) p += weights[static_cast<std::size_t>(l)].size() + biases[static_cast<std::size_t>(l)].size();
        return p;
    }

    /// Uniform fan-in scaled init, deterministic in the seed.
    static QNetwork init(int input, int output, std::span<const int> hidden, std::uint64_t seed) {
        QNetwork net;
        net.sizes.push_back(input);
        for (int h : hidden) net.sizes.push_back(h);
        net.sizes.push_back(output);
        Rng rng(mix_seed(seed, 0x6d6c70ull));
        for (int l = 0; l < net.n_layers(); ++l) {
            int in = net.sizes[static_cast<std::size_t>(l)];
            int out = net.sizes[static_cast<std::size_t>(l) + 1];
            double scale = 1.0 / std::sqrt(static_cast<double>(in));
            std::vector<double> w(static_cast<std::size_t>(in) * out);
            for (double& x : w) x = rng.uniform(-scale, scale);
            net.weights.push_back(std::move(w));
            // Small positive bias keeps rectifier units initially live.
            bool last = l == static_cast<int>(net.sizes.size()) - 2;
            net.biases.emplace_back(static_cast<std::size_t>(out), last ? 0.0 : 0.01);
        }
        return net;
    }
};

struct ForwardCache {
    // activations[0] is the input; activations[l+1] the post-activation of
    // layer l (identity on the last layer).
    std::vector<std::vector<double>> activations;
};

inline std::vector<double> forward_cached(const QNetwork& net, std::span<const double> x,
                                          ForwardCache* cache) {
    if (static_cast<int>(x.size()) != net.input_dim())
        throw Error(ErrorCategory::Internal,
                    "feature length " + std::to_string(x.size()) + " != input dim " +
                        std::to_string(net.input_dim()));
    std::vector<double> a(x.begin(), x.end());
    if (cache) {
        cache->activations.clear();
        cache->activations.push_back(a);
    }
    for (int l = 0; l < net.n_layers(); ++l) {
        const int in = net.sizes[static_cast<std::size_t>(l)];
        const int out = net.sizes[static_cast<std::size_t>(l) + 1];
        const auto& w = net.weights[static_cast<std::size_t>(l)];
        const auto& b = net.biases[static_cast<std::size_t>(l)];
        std::vector<double> z(static_cast<std::size_t>(out));
        for (int o = 0; o < out; ++o) {
            double acc = b[static_cast<std::size_t>(o)];
            const double* row = w.data() + static_cast<std::size_t>(o) * in;
            for (int i = 0; i < in; ++i) acc += row[i] * a[static_cast<std::size_t>(i)];
            z[static_cast<std::size_t>(o)] = acc;
        }
        const bool last = l == net.n_layers() - 1;
        if (!last)
            for (double& v : z)
                if (v < 0.0) v = 0.0;
        a = std::move(z);
        if (cache) cache->activations.push_back(a);
    }
    return a;
}

inline std::vector<double> forward(const QNetwork& net, std::span<const double> x) {
    return forward_cached(net, x, nullptr);
}

struct Gradients {
    std::vector<std::vector<double>> weights;
    std::vector<std::vector<double>> biases;

    static Gradients zeros_like(const QNetwork& net) {
        Gradients g;
        for (int l = 0; l < net.n_layers(); ++l) {
            g.weights.emplace_back(net.weights[static_cast<std::size_t>(l)].size(), 0.0);
            g.biases.emplace_back(net.biases[static_cast<std::size_t>(l)].size(), 0.0);
        }
        return g;
    }
};

/// Accumulate parameter gradients for one sample given dL/d(output).
inline void backward_accumulate(const QNetwork& net, const ForwardCache& cache,
                                std::span<const double> dloss_dout, Gradients& grads) {
    std::vector<double> delta(dloss_dout.begin(), dloss_dout.end());
    for (int l = net.n_layers() - 1; l >= 0; --l) {
        const int in = net.sizes[static_cast<std::size_t>(l)];
        const int out = net.sizes[static_cast<std::size_t>(l) + 1];
        const auto& a_in = cache.activations[static_cast<std::size_t>(l)];
        const auto& a_out = cache.activations[static_cast<std::size_t>(l) + 1];
        const bool last = l == net.n_layers() - 1;
        if (!last)
            for (int o = 0; o < out; ++o)
                if (a_out[static_cast<std::size_t>(o)] <= 0.0) delta[static_cast<std::size_t>(o)] = 0.0;

        auto& gw = grads.weights[static_cast<std::size_t>(l)];
        auto& gb = grads.biases[static_cast<std::size_t>(l)];
        for (int o = 0; o < out; ++o) {
            const double d = delta[static_cast<std::size_t>(o)];
            if (d == 0.0) continue;
            gb[static_cast<std::size_t>(o)] += d;
            double* grow = gw.data() + static_cast<std::size_t>(o) * in;
            for (int i = 0; i < in; ++i) grow[i] += d * a_in[static_cast<std::size_t>(i)];
        }

        if (l > 0) {
            const auto& w = net.weights[static_cast<std::size_t>(l)];
            std::vector<double> prev(static_cast<std::size_t>(in), 0.0);
            for (int o = 0; o < out; ++o) {
                const double d = delta[static_cast<std::size_t>(o)];
                if (d == 0.0) continue;
                const double* row = w.data() + static_cast<std::size_t>(o) * in;
                for (int i = 0; i < in; ++i) prev[static_cast<std::size_t>(i)] += d * row[i];
            }
            delta = std::move(prev);
        }
    }
}

inline void apply_sgd(QNetwork& net, const Gradients& grads, double lr) {
    if (!(lr > 0.0)) throw Error(ErrorCategory::Config, "learning rate must be positive");
    for (int l = 0; l < net.n_layers(); ++l) {
        auto& w = net.weights[static_cast<std::size_t>(l)];
        auto& b = net.biases[static_cast<std::size_t>(l)];
        const auto& gw = grads.weights[static_cast<std::size_t>(l)];
        const auto& gb = grads.biases[static_cast<std::size_t>(l)];
        for (std::size_t i = 0; i < w.size(); ++i) w[i] -= lr * gw[i];
        for (std::size_t i = 0; i < b.size(); ++i) b[i] -= lr * gb[i];
    }
}

} // namespace orants
