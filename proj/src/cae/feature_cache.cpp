#include "cae/feature_cache.hpp"

#include "util/serial.hpp"

namespace xmodal {

namespace {
constexpr std::string_view kFeatMagic = "XMFEAT01";
constexpr uint32_t kLayoutVersion = 1;
}  // namespace

FeatureCache extract_features(const std::filesystem::path& corpus_dir, const Corpus& corpus,
                              const CaeBundle& bundle) {
    FeatureCache cache;
    cache.feature_dim = bundle.feature_dim();
    cache.corpus_checksum = corpus.checksum;
    uint64_t row = 0;
    for (const Sample& s : corpus.samples) {
        cache.sample_offsets.push_back(row);
        cache.sample_rows.push_back(static_cast<uint32_t>(s.frame_count()));
        const auto frames = load_sample_frames(corpus_dir, corpus, s.index);
        const auto feat = extract_sample_features(bundle, frames, s.frame_count());
        cache.rows.insert(cache.rows.end(), feat.begin(), feat.end());
        row += static_cast<uint64_t>(s.frame_count());
    }
    return cache;
}

void save_feature_cache(const FeatureCache& cache, const std::filesystem::path& file) {
    MemWriter w;
    w.write_bytes(kFeatMagic.data(), kFeatMagic.size());
    w.write_u32(kLayoutVersion);
    w.write_u32(static_cast<uint32_t>(cache.feature_dim));
    w.write_string(cache.corpus_checksum);
    w.write_u64(cache.sample_offsets.size());
    for (size_t i = 0; i < cache.sample_offsets.size(); ++i) {
        w.write_u64(cache.sample_offsets[i]);
        w.write_u32(cache.sample_rows[i]);
    }
    w.write_u64(cache.rows.size());
    w.write_f32s(cache.rows);
    write_checksummed_file(file, w.str());
}

FeatureCache load_feature_cache(const std::filesystem::path& file,
                                const std::string& expect_checksum) {
    if (!std::filesystem::exists(file))
        throw DependencyError("no feature cache at " + file.string() +
                              " (produce one with extract-features)");
    const std::string payload = read_checksummed_file(file);
    MemReader r(payload);
    char magic[8];
    r.read_bytes(magic, 8);
    if (std::string_view(magic, 8) != kFeatMagic)
        throw IoError("not a feature cache: " + file.string());
    if (r.read_u32() != kLayoutVersion)
        throw IoError("unsupported feature cache layout in " + file.string());
    FeatureCache cache;
    cache.feature_dim = static_cast<int>(r.read_u32());
    cache.corpus_checksum = r.read_string();
    if (!expect_checksum.empty() && cache.corpus_checksum != expect_checksum)
        throw DependencyError("feature cache was built from corpus " + cache.corpus_checksum +
                              " but the current corpus is " + expect_checksum +
                              " (rerun extract-features)");
    const uint64_t count = r.read_u64();
    cache.sample_offsets.resize(count);
    cache.sample_rows.resize(count);
    for (uint64_t i = 0; i < count; ++i) {
        cache.sample_offsets[i] = r.read_u64();
        cache.sample_rows[i] = r.read_u32();
    }
    cache.rows.resize(r.read_u64());
    r.read_f32s(cache.rows);
    return cache;
}

}  // namespace xmodal
