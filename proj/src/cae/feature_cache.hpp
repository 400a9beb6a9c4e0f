#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "cae/cae.hpp"
#include "data/corpus.hpp"

namespace xmodal {

// Precomputed per-frame visual features for a whole corpus, keyed by the
// corpus checksum so a stale cache cannot be paired with regenerated data.
struct FeatureCache {
    int feature_dim = 0;
    std::string corpus_checksum;
    std::vector<uint64_t> sample_offsets;  // first row index per sample
    std::vector<uint32_t> sample_rows;     // row count per sample (== frames)
    std::vector<float> rows;               // total_rows x feature_dim

    std::span<const float> row(int sample, int t) const {
        const size_t r = sample_offsets[static_cast<size_t>(sample)] + static_cast<size_t>(t);
        return {rows.data() + r * static_cast<size_t>(feature_dim),
                static_cast<size_t>(feature_dim)};
    }
    int frames_of(int sample) const {
        return static_cast<int>(sample_rows[static_cast<size_t>(sample)]);
    }
};

// Runs the trained bundle over every frame of every sample.
FeatureCache extract_features(const std::filesystem::path& corpus_dir, const Corpus& corpus,
                              const CaeBundle& bundle);

void save_feature_cache(const FeatureCache& cache, const std::filesystem::path& file);

// Throws DependencyError when missing, IoError on corruption or when the
// cache was built from a different corpus than `expect_checksum`.
FeatureCache load_feature_cache(const std::filesystem::path& file,
                                const std::string& expect_checksum);

}  // namespace xmodal
