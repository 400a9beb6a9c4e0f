#include "cae/cae.hpp"

#include <thread>

#include "util/serial.hpp"

namespace xmodal {

namespace {

constexpr std::string_view kCaeMagic = "XMCAE001";

// (sample, frame) picks drawn without replacement from a split.
struct FramePick {
    int sample;
    int t;
};

std::vector<FramePick> pick_frames(const Corpus& corpus, const std::vector<int>& split, int count,
                                   Rng& rng) {
    std::vector<FramePick> all;
    for (int s : split) {
        const int m = corpus.sample(s).frame_count();
        for (int t = 0; t < m; ++t) all.push_back({s, t});
    }
    if (count > static_cast<int>(all.size()))
        throw UsageError("requested more frames than the split contains");
    // partial Fisher-Yates: the first `count` entries form the pick
    for (int i = 0; i < count; ++i) {
        const int j = i + rng.uniform_int(static_cast<int>(all.size()) - i);
        std::swap(all[static_cast<size_t>(i)], all[static_cast<size_t>(j)]);
    }
    all.resize(static_cast<size_t>(count));
    return all;
}

// Loads the picked frames and splits one color channel out.
std::vector<float> gather_channel(const std::filesystem::path& corpus_dir, const Corpus& corpus,
                                  const std::vector<FramePick>& picks, int channel) {
    const int h = corpus.config.frame_h, w = corpus.config.frame_w;
    const size_t px = static_cast<size_t>(h) * w;
    std::vector<float> out(picks.size() * px);

    // group picks by sample so each blob is read once
    std::vector<size_t> order(picks.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        return picks[a].sample < picks[b].sample;
    });
    int loaded_sample = -1;
    std::vector<float> frames;
    for (size_t oi : order) {
        const FramePick& p = picks[oi];
        if (p.sample != loaded_sample) {
            frames = load_sample_frames(corpus_dir, corpus, p.sample);
            loaded_sample = p.sample;
        }
        const float* src = frames.data() + static_cast<size_t>(p.t) * px * 3;
        float* dst = out.data() + oi * px;
        for (size_t k = 0; k < px; ++k) dst[k] = src[k * 3 + static_cast<size_t>(channel)];
    }
    return out;
}

std::vector<std::pair<std::string, const Tensor*>> named(const CaeModel& m) {
    std::vector<std::pair<std::string, const Tensor*>> out;
    for (auto* p : const_cast<CaeModel&>(m).params()) out.push_back({p->name, &p->value});
    return out;
}

}  // namespace

Tensor extract_feature(const CaeBundle& bundle, std::span<const float> frame_rgb) {
    const int h = bundle.cfg.frame_h, w = bundle.cfg.frame_w;
    const size_t px = static_cast<size_t>(h) * w;
    if (frame_rgb.size() != px * 3)
        throw UsageError("frame size does not match the trained resolution");
    Tensor feature(Shape{1, bundle.feature_dim()});
    std::vector<float> channel(px);
    for (int c = 0; c < 3; ++c) {
        for (size_t k = 0; k < px; ++k) channel[k] = frame_rgb[k * 3 + static_cast<size_t>(c)];
        Graph g;
        Tensor x(Shape{1, h, w, 1});
        for (size_t k = 0; k < px; ++k) x.data[k] = channel[k];
        auto z = const_cast<CaeModel&>(bundle.channel(c)).encode(g, g.leaf(std::move(x)));
        const auto& zv = g.val(z);
        for (int j = 0; j < bundle.cfg.bottleneck; ++j)
            feature[c * bundle.cfg.bottleneck + j] = zv[j];
    }
    return feature;
}

std::vector<float> extract_sample_features(const CaeBundle& bundle,
                                           std::span<const float> frames_rgb, int m) {
    const int h = bundle.cfg.frame_h, w = bundle.cfg.frame_w;
    const size_t px = static_cast<size_t>(h) * w;
    if (frames_rgb.size() != px * 3 * static_cast<size_t>(m))
        throw UsageError("frame block size does not match the trained resolution");
    const int dc = bundle.cfg.bottleneck;
    std::vector<float> rows(static_cast<size_t>(m) * bundle.feature_dim());
    for (int c = 0; c < 3; ++c) {
        Graph g;
        Tensor x(Shape{m, h, w, 1});
        for (int t = 0; t < m; ++t) {
            const float* src = frames_rgb.data() + static_cast<size_t>(t) * px * 3;
            for (size_t k = 0; k < px; ++k)
                x.data[static_cast<size_t>(t) * px + k] = src[k * 3 + static_cast<size_t>(c)];
        }
        auto z = const_cast<CaeModel&>(bundle.channel(c)).encode(g, g.leaf(std::move(x)));
        const auto& zv = g.val(z);
        for (int t = 0; t < m; ++t)
            for (int j = 0; j < dc; ++j)
                rows[static_cast<size_t>(t) * bundle.feature_dim() + c * dc + j] =
                    static_cast<float>(zv(t, j));
    }
    return rows;
}

std::pair<std::vector<float>, double> reconstruct(const CaeModel& model,
                                                  std::span<const float> frame_channel) {
    const int h = model.cfg.frame_h, w = model.cfg.frame_w;
    const size_t px = static_cast<size_t>(h) * w;
    if (frame_channel.size() != px)
        throw UsageError("frame size does not match the trained resolution");
    Graph g;
    Tensor x(Shape{1, h, w, 1});
    for (size_t k = 0; k < px; ++k) x.data[k] = frame_channel[k];
    auto xid = g.leaf(x);
    auto& m = const_cast<CaeModel&>(model);
    auto recon = m.decode(g, m.encode(g, xid));
    const double mse = g.val(g.mse_mean(recon, xid)).item();
    std::vector<float> out(px);
    for (size_t k = 0; k < px; ++k) out[k] = static_cast<float>(g.val(recon)[k]);
    return {std::move(out), mse};
}

void save_cae(const CaeBundle& bundle, const std::filesystem::path& file,
              const std::string& corpus_checksum) {
    MemWriter w;
    w.write_bytes(kCaeMagic.data(), kCaeMagic.size());
    w.write_string(corpus_checksum);
    w.write_u32(static_cast<uint32_t>(bundle.cfg.frame_h));
    w.write_u32(static_cast<uint32_t>(bundle.cfg.frame_w));
    w.write_u32(static_cast<uint32_t>(bundle.cfg.bottleneck));
    w.write_u32(static_cast<uint32_t>(bundle.cfg.c1));
    w.write_u32(static_cast<uint32_t>(bundle.cfg.c2));
    w.write_u32(static_cast<uint32_t>(bundle.cfg.c3));
    w.write_u64(bundle.cfg.seed);
    for (double m : bundle.holdout_mse) w.write_f64(m);
    for (int c = 0; c < 3; ++c) write_tensor_table(w, named(bundle.channel(c)));
    write_checksummed_file(file, w.str());
}

CaeBundle load_cae(const std::filesystem::path& file, std::string* corpus_checksum) {
    if (!std::filesystem::exists(file))
        throw DependencyError("no trained autoencoder at " + file.string() +
                              " (produce one with train-cae)");
    const std::string payload = read_checksummed_file(file);
    MemReader r(payload);
    char magic[8];
    r.read_bytes(magic, 8);
    if (std::string_view(magic, 8) != kCaeMagic)
        throw IoError("not an autoencoder file: " + file.string());
    const std::string checksum = r.read_string();
    if (corpus_checksum) *corpus_checksum = checksum;
    CaeConfig cfg;
    cfg.frame_h = static_cast<int>(r.read_u32());
    cfg.frame_w = static_cast<int>(r.read_u32());
    cfg.bottleneck = static_cast<int>(r.read_u32());
    cfg.c1 = static_cast<int>(r.read_u32());
    cfg.c2 = static_cast<int>(r.read_u32());
    cfg.c3 = static_cast<int>(r.read_u32());
    cfg.seed = r.read_u64();
    CaeBundle bundle;
    bundle.cfg = cfg;
    for (double& m : bundle.holdout_mse) m = r.read_f64();
    Rng rng(cfg.seed);
    for (int c = 0; c < 3; ++c) {
        auto& model = bundle.channel(c);
        model = CaeModel::init(cfg, rng.split("cae", static_cast<uint64_t>(c)),
                               "cae" + std::to_string(c) + ".");
        auto table = read_tensor_table(r);
        for (auto* p : model.params()) {
            auto it = table.find(p->name);
            if (it == table.end()) throw IoError("missing tensor '" + p->name + "' in " + file.string());
            if (it->second.shape != p->value.shape)
                throw IoError("shape mismatch for tensor '" + p->name + "' in " + file.string());
            p->value = it->second;
        }
    }
    return bundle;
}

CaeBundle train_cae(const std::filesystem::path& corpus_dir, const Corpus& corpus,
                    const CaeConfig& cfg) {
    Rng rng(cfg.seed);
    Rng pick_rng = rng.split("cae-frames");
    const auto train_picks = pick_frames(corpus, corpus.train_indices, cfg.train_frames, pick_rng);
    const auto hold_picks = pick_frames(corpus, corpus.test_indices, cfg.holdout_frames, pick_rng);

    CaeBundle bundle;
    bundle.cfg = cfg;
    std::array<std::vector<float>, 3> train_ch, hold_ch;
    for (int c = 0; c < 3; ++c) {
        train_ch[static_cast<size_t>(c)] = gather_channel(corpus_dir, corpus, train_picks, c);
        hold_ch[static_cast<size_t>(c)] = gather_channel(corpus_dir, corpus, hold_picks, c);
    }

    // the three channel trainings are independent; run them concurrently
    std::array<CaeModelT<float>, 3> models;
    std::array<std::exception_ptr, 3> errors{};
    auto run_channel = [&](int c) {
        try {
            models[static_cast<size_t>(c)] = CaeModelT<float>::init(
                cfg, rng.split("cae", static_cast<uint64_t>(c)), "cae" + std::to_string(c) + ".");
            const auto res = train_cae_channel<float>(
                models[static_cast<size_t>(c)], train_ch[static_cast<size_t>(c)],
                cfg.train_frames, hold_ch[static_cast<size_t>(c)], cfg.holdout_frames,
                rng.split("cae-train", static_cast<uint64_t>(c)));
            bundle.holdout_mse[static_cast<size_t>(c)] = res.holdout_mse;
        } catch (...) {
            errors[static_cast<size_t>(c)] = std::current_exception();
        }
    };
    {
        std::vector<std::thread> workers;
        for (int c = 0; c < 3; ++c) workers.emplace_back(run_channel, c);
        for (auto& t : workers) t.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    bundle.red = models[0].cast<double>();
    bundle.green = models[1].cast<double>();
    bundle.blue = models[2].cast<double>();
    return bundle;
}

}  // namespace xmodal
