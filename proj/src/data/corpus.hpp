#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "data/render.hpp"
#include "data/scene.hpp"
#include "data/trajectory.hpp"
#include "data/vocab.hpp"

namespace xmodal {

struct GenConfig {
    uint64_t seed = 7;
    int frame_h = kDefaultFrameH;
    int frame_w = kDefaultFrameW;
};

constexpr int kVariationsPerPattern = 6;
constexpr int kNumPatterns = 144;
constexpr int kNumSamples = 864;
constexpr int kTrainSamples = 648;
constexpr int kTestSamples = 216;

// One episode. Frames are not held in memory; they are rendered on demand
// during generation and streamed from disk afterwards.
struct Sample {
    int index = 0;
    int pattern_index = 0;
    int variation = 0;
    ActionLabel label;
    Scene scene;
    DescriptionMeaning meaning;
    JointTrajectory trajectory;

    int frame_count() const { return trajectory.steps; }
    std::vector<SurfaceDescription> descriptions(const Vocabulary& v) const {
        std::vector<SurfaceDescription> out;
        out.reserve(Vocabulary::kVariantsPerMeaning);
        for (int k = 0; k < Vocabulary::kVariantsPerMeaning; ++k)
            out.push_back(v.realize(meaning, k));
        return out;
    }
};

struct Corpus {
    GenConfig config;
    std::string checksum;  // hex content hash
    std::vector<Sample> samples;
    std::vector<int> train_indices;
    std::vector<int> test_indices;

    const Sample& sample(int i) const { return samples[static_cast<size_t>(i)]; }
};

// Deterministic regeneration of the full corpus: 144 patterns x 6 variation
// seeds, split into 648 train / 216 test so that the test set covers all 288
// descriptions and all 12 distinct actions.
Corpus generate_corpus(const GenConfig& cfg);

// Frames of one sample (M x H x W x 3, values in [0,1]).
std::vector<float> render_sample_frames(const GenConfig& cfg, const Sample& s);

// Content hash over joints, frames, and description records of every sample.
// Streaming; does not keep more than one sample's frames alive.
uint64_t corpus_content_hash(const GenConfig& cfg);

// On-disk layout: manifest.json, checksum, samples/sample_NNN.bin (joints
// then frames, little-endian f32), samples/sample_NNN.txt (the 8 sentences).
// Fills corpus.checksum while streaming the frames out.
void write_corpus(Corpus& corpus, const std::filesystem::path& dir);

Corpus load_corpus(const std::filesystem::path& dir);

std::vector<float> load_sample_frames(const std::filesystem::path& dir, const Corpus& corpus,
                                      int sample_index);

}  // namespace xmodal
