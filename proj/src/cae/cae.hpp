#pragma once

#include <filesystem>
#include <span>

#include "core/adam.hpp"
#include "core/graph.hpp"
#include "data/corpus.hpp"

namespace xmodal {

// Channel-separated convolutional autoencoder: one independent instance per
// RGB channel. Encoder: three stride-2 3x3 convs and a linear bottleneck of
// width d_c; decoder mirrors it with transposed convs and a sigmoid output.
struct CaeConfig {
    int frame_h = kDefaultFrameH;
    int frame_w = kDefaultFrameW;
    int bottleneck = 8;  // d_c; composite feature F = 3 * d_c
    int c1 = 8, c2 = 16, c3 = 32;
    double lr = 1e-4;
    int epochs = 200;
    int batch = 32;
    int train_frames = 512;    // frames subsampled from the training split
    int holdout_frames = 128;  // frames subsampled from the test split
    uint64_t seed = 1;

    int grid_h() const { return frame_h / 8; }
    int grid_w() const { return frame_w / 8; }
    int flat() const { return grid_h() * grid_w() * c3; }
};

template <typename T>
struct CaeModelT {
    CaeConfig cfg;
    ParamT<T> e1w, e1b, e2w, e2b, e3w, e3b, fcw, fcb;
    ParamT<T> dfw, dfb, d3w, d3b, d2w, d2b, d1w, d1b;

    static CaeModelT init(const CaeConfig& cfg, Rng rng, const std::string& prefix) {
        if (cfg.frame_h % 8 != 0 || cfg.frame_w % 8 != 0)
            throw ConfigError("frame size must be divisible by 8 for the conv stack");
        CaeModelT m;
        m.cfg = cfg;
        auto W = [&](const std::string& n, int r, int c) {
            return ParamT<T>(prefix + n, TensorT<T>::glorot(r, c, rng));
        };
        auto B = [&](const std::string& n, int len) {
            return ParamT<T>(prefix + n, TensorT<T>::zeros({len}));
        };
        m.e1w = W("enc1.w", 9 * 1, cfg.c1);
        m.e1b = B("enc1.b", cfg.c1);
        m.e2w = W("enc2.w", 9 * cfg.c1, cfg.c2);
        m.e2b = B("enc2.b", cfg.c2);
        m.e3w = W("enc3.w", 9 * cfg.c2, cfg.c3);
        m.e3b = B("enc3.b", cfg.c3);
        m.fcw = W("fc.w", cfg.flat(), cfg.bottleneck);
        m.fcb = B("fc.b", cfg.bottleneck);
        m.dfw = W("dfc.w", cfg.bottleneck, cfg.flat());
        m.dfb = B("dfc.b", cfg.flat());
        m.d3w = W("dec3.w", cfg.c3, 9 * cfg.c2);
        m.d3b = B("dec3.b", cfg.c2);
        m.d2w = W("dec2.w", cfg.c2, 9 * cfg.c1);
        m.d2b = B("dec2.b", cfg.c1);
        m.d1w = W("dec1.w", cfg.c1, 9 * 1);
        m.d1b = B("dec1.b", 1);
        return m;
    }

    std::vector<ParamT<T>*> params() {
        return {&e1w, &e1b, &e2w, &e2b, &e3w, &e3b, &fcw, &fcb,
                &dfw, &dfb, &d3w, &d3b, &d2w, &d2b, &d1w, &d1b};
    }

    // x: [B, H, W, 1] -> bottleneck [B, d_c]
    typename GraphT<T>::Id encode(GraphT<T>& g, typename GraphT<T>::Id x) {
        auto h1 = g.relu(g.conv2d(x, g.param(e1w), g.param(e1b), 3, 2, 1));
        auto h2 = g.relu(g.conv2d(h1, g.param(e2w), g.param(e2b), 3, 2, 1));
        auto h3 = g.relu(g.conv2d(h2, g.param(e3w), g.param(e3b), 3, 2, 1));
        const int bsz = g.val(x).shape[0];
        auto flat = g.reshape(h3, {bsz, cfg.flat()});
        return g.add_bias(g.matmul(flat, g.param(fcw)), g.param(fcb));
    }

    // z: [B, d_c] -> reconstruction [B, H, W, 1] in (0, 1)
    typename GraphT<T>::Id decode(GraphT<T>& g, typename GraphT<T>::Id z) {
        const int bsz = g.val(z).shape[0];
        auto f = g.relu(g.add_bias(g.matmul(z, g.param(dfw)), g.param(dfb)));
        auto cube = g.reshape(f, {bsz, cfg.grid_h(), cfg.grid_w(), cfg.c3});
        auto u3 = g.relu(g.conv2d_transpose(cube, g.param(d3w), g.param(d3b), 3, 2, 1, 1));
        auto u2 = g.relu(g.conv2d_transpose(u3, g.param(d2w), g.param(d2b), 3, 2, 1, 1));
        return g.sigmoid(g.conv2d_transpose(u2, g.param(d1w), g.param(d1b), 3, 2, 1, 1));
    }

    template <typename U>
    CaeModelT<U> cast() const {
        CaeModelT<U> out;
        out.cfg = cfg;
        auto src = const_cast<CaeModelT*>(this)->params();
        auto dst = out.params();
        for (size_t i = 0; i < src.size(); ++i) {
            dst[i]->name = src[i]->name;
            dst[i]->value = src[i]->value.template cast<U>();
            dst[i]->grad = TensorT<U>::zeros(dst[i]->value.shape);
        }
        return out;
    }
};

using CaeModel = CaeModelT<double>;

struct CaeTrainResult {
    double final_loss = 0.0;    // training reconstruction MSE, last epoch mean
    double holdout_mse = 0.0;   // per pixel-channel MSE on held-out frames
    std::vector<double> loss_history;
};

// frames: n stacked single-channel images, n * H * W floats in [0,1].
template <typename T>
TensorT<T> frames_to_batch(std::span<const float> frames, std::span<const int> which, int h,
                           int w) {
    TensorT<T> x(Shape{static_cast<int>(which.size()), h, w, 1});
    const size_t px = static_cast<size_t>(h) * w;
    for (size_t i = 0; i < which.size(); ++i) {
        const float* src = frames.data() + static_cast<size_t>(which[i]) * px;
        for (size_t k = 0; k < px; ++k) x.data[i * px + k] = static_cast<T>(src[k]);
    }
    return x;
}

// Trains one channel instance. Deterministic in (model init, rng).
template <typename T>
CaeTrainResult train_cae_channel(CaeModelT<T>& model, std::span<const float> train_frames,
                                 int n_train, std::span<const float> holdout_frames,
                                 int n_holdout, Rng rng) {
    const CaeConfig& cfg = model.cfg;
    if (n_train <= 0) throw UsageError("train_cae_channel: empty frame set");
    AdamT<T> opt(model.params(), static_cast<T>(cfg.lr));
    GraphT<T> g;
    CaeTrainResult res;
    std::vector<int> order(static_cast<size_t>(n_train));
    for (int i = 0; i < n_train; ++i) order[static_cast<size_t>(i)] = i;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        // Fisher-Yates on the seeded stream
        for (int i = n_train - 1; i > 0; --i)
            std::swap(order[static_cast<size_t>(i)],
                      order[static_cast<size_t>(rng.uniform_int(i + 1))]);
        double epoch_loss = 0.0;
        int batches = 0;
        for (int start = 0; start + cfg.batch <= n_train; start += cfg.batch) {
            g.reset();
            auto x = g.leaf(frames_to_batch<T>(
                train_frames, std::span<const int>(order).subspan(start, cfg.batch), cfg.frame_h,
                cfg.frame_w));
            auto z = model.encode(g, x);
            auto recon = model.decode(g, z);
            auto loss = g.mse_mean(recon, x);
            const double lv = static_cast<double>(g.val(loss).item());
            if (!std::isfinite(lv))
                throw NumericFault("autoencoder training diverged (non-finite loss)");
            g.backward(loss);
            opt.step();
            epoch_loss += lv;
            ++batches;
        }
        res.loss_history.push_back(epoch_loss / batches);
    }
    res.final_loss = res.loss_history.back();

    if (n_holdout > 0) {
        g.reset();
        std::vector<int> all(static_cast<size_t>(n_holdout));
        for (int i = 0; i < n_holdout; ++i) all[static_cast<size_t>(i)] = i;
        auto x = g.leaf(frames_to_batch<T>(holdout_frames, all, cfg.frame_h, cfg.frame_w));
        auto recon = model.decode(g, model.encode(g, x));
        res.holdout_mse = static_cast<double>(g.val(g.mse_mean(recon, x)).item());
    }
    return res;
}

// Three trained channel instances plus their shared config.
struct CaeBundle {
    CaeConfig cfg;
    CaeModel red, green, blue;
    std::array<double, 3> holdout_mse{};

    int feature_dim() const { return 3 * cfg.bottleneck; }
    CaeModel& channel(int c) { return c == 0 ? red : (c == 1 ? green : blue); }
    const CaeModel& channel(int c) const { return c == 0 ? red : (c == 1 ? green : blue); }
};

// Per-frame composite feature: concatenated per-channel bottlenecks (1 x F).
Tensor extract_feature(const CaeBundle& bundle, std::span<const float> frame_rgb);

// All frames of a sample at once -> m x F rows (f32 for the cache).
std::vector<float> extract_sample_features(const CaeBundle& bundle,
                                           std::span<const float> frames_rgb, int m);

// Reconstruction of a single channel frame plus its MSE (diagnostic).
std::pair<std::vector<float>, double> reconstruct(const CaeModel& model,
                                                  std::span<const float> frame_channel);

void save_cae(const CaeBundle& bundle, const std::filesystem::path& file,
              const std::string& corpus_checksum);
CaeBundle load_cae(const std::filesystem::path& file, std::string* corpus_checksum = nullptr);

// Full pipeline: subsample frames from the corpus, train the three channel
// instances (f32 numerics for speed, f64 storage), report holdout MSE.
CaeBundle train_cae(const std::filesystem::path& corpus_dir, const Corpus& corpus,
                    const CaeConfig& cfg);

}  // namespace xmodal
