#include <doctest.h>

#include <filesystem>
#include <set>

#include "data/corpus.hpp"
#include "data/encoding.hpp"
#include "util/fsio.hpp"

using namespace xmodal;
namespace fs = std::filesystem;

TEST_CASE("vocabulary has 28 tokens in the declared order") {
    Vocabulary v;
    CHECK(v.size() == 28);
    CHECK(v.index("<bos>") == 26);
    CHECK(v.index("<eos>") == 27);
    CHECK(v.bos_index() == 26);
    CHECK(v.token(0) == "push");
    CHECK(v.index("describe") == 22);
    CHECK(v.category(v.index("quickly")) == WordCategory::kSpeed);
}

TEST_CASE("synonym map is an involution within categories") {
    Vocabulary v;
    CHECK(v.synonym("scarlet") == "red");
    CHECK(v.synonym("red") == "scarlet");
    CHECK(v.synonym("move-up") == "push");
    for (int i = 0; i < 22; ++i) {
        CHECK(v.synonym(v.synonym(i)) == i);
        CHECK(v.category(v.synonym(i)) == v.category(i));
        CHECK(v.canonical(i) % 2 == 0);
    }
    CHECK_THROWS_AS(v.synonym(v.index("describe")), UsageError);
    CHECK_THROWS_AS(v.index("banana"), UsageError);
}

TEST_CASE("patterns: 144 unique label/arrangement pairs, each label 12 times") {
    const auto pats = enumerate_patterns();
    CHECK(pats.size() == 144);
    std::set<std::pair<int, int>> seen;
    std::array<int, kNumActionLabels> label_count{};
    for (const auto& p : pats) {
        seen.insert({p.label.index(), p.scene.arrangement_id});
        label_count[static_cast<size_t>(p.label.index())]++;
        CHECK(p.scene.left_color != p.scene.right_color);
    }
    CHECK(seen.size() == 144);
    for (int c : label_count) CHECK(c == 12);
}

TEST_CASE("trajectories are deterministic, bounded, and speed-dependent") {
    const Scene sc = arrangements()[0];
    ActionLabel slow{ActionType::kPush, CubePosition::kLeft, Speed::kSlow};
    ActionLabel fast{ActionType::kPush, CubePosition::kLeft, Speed::kFast};

    auto t1 = synthesize_trajectory(slow, sc, Rng(5));
    auto t2 = synthesize_trajectory(slow, sc, Rng(5));
    CHECK(t1.joints == t2.joints);

    CHECK(t1.steps == 100);
    CHECK(synthesize_trajectory(fast, sc, Rng(5)).steps == 50);

    for (double x : t1.joints) {
        CHECK(x >= -1.0);
        CHECK(x <= 1.0);
    }
    // first frame is the rest posture
    const auto rest = rest_posture();
    for (int j = 0; j < kNumJoints; ++j) CHECK(t1.at(0, j) == doctest::Approx(rest[j]));
}

TEST_CASE("push-left and push-right separate by more than 0.1 at mid-action") {
    const Scene sc = arrangements()[0];
    ActionLabel left{ActionType::kPush, CubePosition::kLeft, Speed::kSlow};
    ActionLabel right{ActionType::kPush, CubePosition::kRight, Speed::kSlow};
    auto tl = synthesize_trajectory(left, sc, Rng(9));
    auto tr = synthesize_trajectory(right, sc, Rng(9));
    const int mid = tl.steps / 2;
    double max_gap = 0.0;
    for (int j = 0; j < kNumJoints; ++j)
        max_gap = std::max(max_gap, std::abs(tl.at(mid, j) - tr.at(mid, j)));
    CHECK(max_gap > 0.1);
}

TEST_CASE("rendering is deterministic and cube colors land in the image") {
    Scene sc{CubeColor::kRed, CubeColor::kGreen, 0};
    const auto rest = rest_posture();
    auto f1 = render_frame(sc, rest, 48, 64);
    auto f2 = render_frame(sc, rest, 48, 64);
    CHECK(f1 == f2);

    // left cube region: red channel dominates green
    bool found_red = false;
    for (int y = 0; y < 48; ++y)
        for (int x = 0; x < 20; ++x) {
            const float* p = f1.data() + (static_cast<size_t>(y) * 64 + x) * 3;
            if (p[0] > 0.7f && p[0] > p[1] + 0.3f) found_red = true;
        }
    CHECK(found_red);
    for (float v : f1) {
        CHECK(v >= 0.0f);
        CHECK(v <= 1.0f);
    }
}

TEST_CASE("rest and end-of-push frames differ in more than 1 percent of pixels") {
    Scene sc{CubeColor::kBlue, CubeColor::kYellow, 4};
    ActionLabel push{ActionType::kPush, CubePosition::kLeft, Speed::kSlow};
    auto traj = synthesize_trajectory(push, sc, Rng(3));
    auto f_rest = render_frame(sc, traj.posture(0), 48, 64);
    auto f_mid = render_frame(sc, traj.posture(62), 48, 64);
    int diff = 0;
    for (size_t i = 0; i < f_rest.size(); i += 3)
        if (f_rest[i] != f_mid[i] || f_rest[i + 1] != f_mid[i + 1] ||
            f_rest[i + 2] != f_mid[i + 2])
            ++diff;
    CHECK(diff > 48 * 64 / 100);
}

TEST_CASE("corpus counts and split match the dataset contract") {
    const auto corpus = generate_corpus(GenConfig{12345, 24, 32});
    CHECK(corpus.samples.size() == 864);
    CHECK(corpus.train_indices.size() == 648);
    CHECK(corpus.test_indices.size() == 216);

    std::set<int> train(corpus.train_indices.begin(), corpus.train_indices.end());
    for (int i : corpus.test_indices) CHECK(train.count(i) == 0);

    // every distinct action and every meaning (hence all 288 descriptions) in test
    std::set<int> labels, meanings;
    for (int i : corpus.test_indices) {
        labels.insert(corpus.sample(i).label.index());
        meanings.insert(corpus.sample(i).meaning.class_index());
    }
    CHECK(labels.size() == kNumActionLabels);
    CHECK(meanings.size() == kNumMeanings);

    // all 288 surface descriptions appear corpus-wide; every test meaning is
    // also covered by some training sample (unimodal availability)
    Vocabulary v;
    std::set<std::string> surface;
    std::set<int> train_meanings;
    for (int i : corpus.train_indices)
        train_meanings.insert(corpus.sample(i).meaning.class_index());
    for (const auto& s : corpus.samples)
        for (const auto& d : s.descriptions(v)) surface.insert(v.sentence(d));
    CHECK(surface.size() == 288);
    CHECK(train_meanings.size() == kNumMeanings);

    // M follows the speed everywhere; color word matches the manipulated cube
    for (const auto& s : corpus.samples) {
        CHECK(s.frame_count() == (s.label.speed == Speed::kFast ? 50 : 100));
        CHECK(s.meaning.color == s.scene.color_at(s.label.position));
    }
}

TEST_CASE("corpus regeneration with the same master seed is bit-identical") {
    GenConfig cfg{777, 24, 32};
    CHECK(corpus_content_hash(cfg) == corpus_content_hash(cfg));
    GenConfig other{778, 24, 32};
    CHECK(corpus_content_hash(cfg) != corpus_content_hash(other));
}

TEST_CASE("corpus round-trips through the on-disk format") {
    const fs::path dir = fs::temp_directory_path() / "xmodal_corpus_rt";
    fs::remove_all(dir);
    GenConfig cfg{42, 24, 32};
    auto corpus = generate_corpus(cfg);
    write_corpus(corpus, dir);
    CHECK(corpus.checksum == to_hex(corpus_content_hash(cfg)));

    const auto loaded = load_corpus(dir);
    CHECK(loaded.checksum == corpus.checksum);
    CHECK(loaded.samples.size() == corpus.samples.size());
    CHECK(loaded.train_indices == corpus.train_indices);
    CHECK(loaded.test_indices == corpus.test_indices);
    for (size_t i = 0; i < corpus.samples.size(); i += 97) {
        const auto& a = corpus.samples[i];
        const auto& b = loaded.samples[i];
        CHECK(a.label.index() == b.label.index());
        CHECK(a.trajectory.steps == b.trajectory.steps);
        // joints pass through f32 storage
        for (size_t k = 0; k < a.trajectory.joints.size(); k += 33)
            CHECK(b.trajectory.joints[k] ==
                  doctest::Approx(a.trajectory.joints[k]).epsilon(1e-6));
    }
    const auto frames = load_sample_frames(dir, loaded, 3);
    const auto expect = render_sample_frames(cfg, corpus.samples[3]);
    CHECK(frames == expect);
    fs::remove_all(dir);
}

TEST_CASE("language encoding follows the [signal words eos] layout") {
    Vocabulary v;
    auto rows = encode_language(v, TaskSignal::kDescribe, std::nullopt);
    CHECK(rows.shape == Shape{5, 28});
    CHECK(rows(0, v.signal_index(TaskSignal::kDescribe)) == 1.0);
    for (int r = 1; r <= 3; ++r)
        for (int c = 0; c < 28; ++c) CHECK(rows(r, c) == 0.0);
    CHECK(rows(4, v.eos_index()) == 1.0);

    auto d = v.parse_description("push red slowly");
    auto rows2 = encode_language(v, TaskSignal::kExecute, d);
    CHECK(rows2(1, v.index("push")) == 1.0);
    CHECK(rows2(2, v.index("red")) == 1.0);
    CHECK(rows2(3, v.index("slowly")) == 1.0);

    CHECK_THROWS_AS(encode_language(v, TaskSignal::kExecute, std::nullopt), UsageError);
    CHECK_THROWS_AS(encode_language(v, TaskSignal::kDescribe, d), UsageError);
    CHECK_THROWS_AS(v.parse_description("push banana slowly"), UsageError);
}

TEST_CASE("encode/decode round-trips all 288 descriptions") {
    Vocabulary v;
    int count = 0;
    for (int c = 0; c < kNumMeanings; ++c) {
        for (int variant = 0; variant < Vocabulary::kVariantsPerMeaning; ++variant) {
            const DescriptionMeaning m{static_cast<ActionType>(c / (kNumColors * kNumSpeeds)),
                                       static_cast<CubeColor>((c / kNumSpeeds) % kNumColors),
                                       static_cast<Speed>(c % kNumSpeeds)};
            const auto d = v.realize(m, variant);
            const auto rows = encode_language(v, TaskSignal::kRepeatLanguage, d);
            CHECK(description_from_rows(v, rows) == d);
            CHECK(v.meaning_of(d) == m);
            ++count;
        }
    }
    CHECK(count == 288);
}
