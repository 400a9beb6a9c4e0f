#include "data/corpus.hpp"

#include <algorithm>
#include <nlohmann/json.hpp>

#include "util/fsio.hpp"

namespace xmodal {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr uint32_t kCorpusVersion = 1;

Sample make_sample(const GenConfig& cfg, int pattern_index, int variation) {
    static const auto patterns = enumerate_patterns();
    Sample s;
    s.pattern_index = pattern_index;
    s.variation = variation;
    s.index = pattern_index * kVariationsPerPattern + variation;
    const Pattern& p = patterns[static_cast<size_t>(pattern_index)];
    s.label = p.label;
    s.scene = p.scene;
    s.meaning = DescriptionMeaning{s.label.type, s.scene.color_at(s.label.position),
                                   s.label.speed};
    Rng episode = Rng(cfg.seed).split("episode", static_cast<uint64_t>(s.index));
    s.trajectory = synthesize_trajectory(s.label, s.scene, episode);
    return s;
}

// Test split: for each of the 36 description meanings, 6 of its 24 episodes,
// cycling through the meaning's 4 patterns so both cube positions appear.
std::vector<int> select_test_indices(const std::vector<Sample>& samples) {
    std::vector<std::vector<int>> class_patterns(kNumMeanings);
    for (int p = 0; p < kNumPatterns; ++p) {
        const Sample& probe = samples[static_cast<size_t>(p * kVariationsPerPattern)];
        class_patterns[static_cast<size_t>(probe.meaning.class_index())].push_back(p);
    }
    std::vector<int> test;
    test.reserve(kTestSamples);
    for (int c = 0; c < kNumMeanings; ++c) {
        const auto& pats = class_patterns[static_cast<size_t>(c)];
        for (int v = 0; v < kVariationsPerPattern; ++v) {
            const int pattern = pats[static_cast<size_t>((v + c) % pats.size())];
            test.push_back(pattern * kVariationsPerPattern + v);
        }
    }
    std::sort(test.begin(), test.end());
    return test;
}

void hash_sample(Hasher& h, const GenConfig& cfg, const Sample& s, const Vocabulary& vocab) {
    std::vector<float> joints32(s.trajectory.joints.begin(), s.trajectory.joints.end());
    h.update_span<float>(joints32);
    const auto frames = render_sample_frames(cfg, s);
    h.update_span<float>(frames);
    for (const auto& d : s.descriptions(vocab)) {
        h.update(vocab.sentence(d));
        h.update("\n");
    }
}

std::string sample_stem(int index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "sample_%03d", index);
    return buf;
}

}  // namespace

Corpus generate_corpus(const GenConfig& cfg) {
    Corpus corpus;
    corpus.config = cfg;
    corpus.samples.reserve(kNumSamples);
    for (int p = 0; p < kNumPatterns; ++p)
        for (int v = 0; v < kVariationsPerPattern; ++v)
            corpus.samples.push_back(make_sample(cfg, p, v));

    corpus.test_indices = select_test_indices(corpus.samples);
    std::vector<char> in_test(kNumSamples, 0);
    for (int i : corpus.test_indices) in_test[static_cast<size_t>(i)] = 1;
    corpus.train_indices.reserve(kTrainSamples);
    for (int i = 0; i < kNumSamples; ++i)
        if (!in_test[static_cast<size_t>(i)]) corpus.train_indices.push_back(i);

    // checksum is filled by write_corpus (or corpus_content_hash), which are
    // the points where every frame gets rendered anyway
    return corpus;
}

std::vector<float> render_sample_frames(const GenConfig& cfg, const Sample& s) {
    std::vector<float> frames;
    frames.reserve(static_cast<size_t>(s.frame_count()) * cfg.frame_h * cfg.frame_w * 3);
    for (int t = 0; t < s.frame_count(); ++t) {
        const auto px = render_frame(s.scene, s.trajectory.posture(t), cfg.frame_h, cfg.frame_w);
        frames.insert(frames.end(), px.begin(), px.end());
    }
    return frames;
}

uint64_t corpus_content_hash(const GenConfig& cfg) {
    const Vocabulary vocab;
    Hasher h;
    h.update_pod(cfg.seed);
    h.update_pod(cfg.frame_h);
    h.update_pod(cfg.frame_w);
    for (int p = 0; p < kNumPatterns; ++p)
        for (int v = 0; v < kVariationsPerPattern; ++v)
            hash_sample(h, cfg, make_sample(cfg, p, v), vocab);
    return h.digest();
}

void write_corpus(Corpus& corpus, const fs::path& dir) {
    const Vocabulary vocab;
    fs::create_directories(dir / "samples");
    Hasher h;
    h.update_pod(corpus.config.seed);
    h.update_pod(corpus.config.frame_h);
    h.update_pod(corpus.config.frame_w);
    json sample_meta = json::array();
    for (const Sample& s : corpus.samples) {
        sample_meta.push_back({{"pattern", s.pattern_index},
                               {"variation", s.variation},
                               {"label", s.label.index()},
                               {"arrangement", s.scene.arrangement_id},
                               {"frames", s.frame_count()}});
        const std::string stem = sample_stem(s.index);
        BinWriter bw(dir / "samples" / (stem + ".bin"));
        std::vector<float> joints32(s.trajectory.joints.begin(), s.trajectory.joints.end());
        h.update_span<float>(joints32);
        bw.write_f32s(joints32);
        const auto frames = render_sample_frames(corpus.config, s);
        h.update_span<float>(frames);
        bw.write_f32s(frames);
        bw.close();
        std::string text;
        for (const auto& d : s.descriptions(vocab)) {
            h.update(vocab.sentence(d));
            h.update("\n");
            text += vocab.sentence(d) + "\n";
        }
        write_text_file(dir / "samples" / (stem + ".txt"), text);
    }
    corpus.checksum = h.hex();

    json meta;
    meta["version"] = kCorpusVersion;
    meta["seed"] = corpus.config.seed;
    meta["frame_h"] = corpus.config.frame_h;
    meta["frame_w"] = corpus.config.frame_w;
    meta["sample_count"] = corpus.samples.size();
    meta["checksum"] = corpus.checksum;
    meta["train_indices"] = corpus.train_indices;
    meta["test_indices"] = corpus.test_indices;
    meta["samples"] = std::move(sample_meta);
    write_text_file(dir / "manifest.json", meta.dump(2) + "\n");
    write_text_file(dir / "checksum", corpus.checksum + "\n");
}

Corpus load_corpus(const fs::path& dir) {
    const fs::path manifest = dir / "manifest.json";
    if (!fs::exists(manifest))
        throw DependencyError("no corpus manifest at " + manifest.string() +
                              " (produce one with gen-data)");
    json meta = json::parse(read_text_file(manifest));
    if (meta.at("version").get<uint32_t>() != kCorpusVersion)
        throw IoError("unsupported corpus version in " + manifest.string());

    Corpus corpus;
    corpus.config.seed = meta.at("seed").get<uint64_t>();
    corpus.config.frame_h = meta.at("frame_h").get<int>();
    corpus.config.frame_w = meta.at("frame_w").get<int>();
    corpus.checksum = meta.at("checksum").get<std::string>();
    corpus.train_indices = meta.at("train_indices").get<std::vector<int>>();
    corpus.test_indices = meta.at("test_indices").get<std::vector<int>>();

    const std::string stored = read_text_file(dir / "checksum");
    if (stored.substr(0, corpus.checksum.size()) != corpus.checksum)
        throw IoError("checksum file disagrees with manifest in " + dir.string());

    const auto& sm = meta.at("samples");
    const size_t count = meta.at("sample_count").get<size_t>();
    if (sm.size() != count) throw IoError("sample count mismatch in " + manifest.string());
    corpus.samples.resize(count);
    const auto patterns = enumerate_patterns();
    for (size_t i = 0; i < count; ++i) {
        Sample& s = corpus.samples[i];
        s.index = static_cast<int>(i);
        s.pattern_index = sm[i].at("pattern").get<int>();
        s.variation = sm[i].at("variation").get<int>();
        const Pattern& p = patterns[static_cast<size_t>(s.pattern_index)];
        s.label = p.label;
        s.scene = p.scene;
        s.meaning =
            DescriptionMeaning{s.label.type, s.scene.color_at(s.label.position), s.label.speed};
        const int m = sm[i].at("frames").get<int>();
        s.trajectory.steps = m;
        s.trajectory.joints.resize(static_cast<size_t>(m) * kNumJoints);
        BinReader br(dir / "samples" / (sample_stem(s.index) + ".bin"));
        std::vector<float> joints32(static_cast<size_t>(m) * kNumJoints);
        br.read_f32s(joints32);
        std::copy(joints32.begin(), joints32.end(), s.trajectory.joints.begin());
    }
    return corpus;
}

std::vector<float> load_sample_frames(const fs::path& dir, const Corpus& corpus,
                                      int sample_index) {
    const Sample& s = corpus.sample(sample_index);
    const size_t joints_bytes = static_cast<size_t>(s.frame_count()) * kNumJoints * 4;
    const size_t frame_floats = static_cast<size_t>(s.frame_count()) * corpus.config.frame_h *
                                corpus.config.frame_w * 3;
    BinReader br(dir / "samples" / (sample_stem(sample_index) + ".bin"));
    br.skip(joints_bytes);
    std::vector<float> frames(frame_floats);
    br.read_f32s(frames);
    return frames;
}

}  // namespace xmodal
