#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "core/error.hpp"

namespace xmodal {

enum class ActionType : uint8_t { kPush = 0, kPull = 1, kSlide = 2 };
enum class CubeColor : uint8_t { kRed = 0, kGreen, kBlue, kYellow, kCyan, kViolet };
enum class Speed : uint8_t { kSlow = 0, kFast = 1 };
enum class CubePosition : uint8_t { kLeft = 0, kRight = 1 };

enum class TaskSignal : uint8_t { kDescribe = 0, kExecute, kRepeatAction, kRepeatLanguage };

enum class WordCategory : uint8_t { kAction = 0, kColor, kSpeed, kSignal, kMarker };

constexpr int kNumActionTypes = 3;
constexpr int kNumColors = 6;
constexpr int kNumSpeeds = 2;
constexpr int kNumSignals = 4;

const char* to_string(ActionType a);
const char* to_string(CubeColor c);
const char* to_string(Speed s);
const char* to_string(CubePosition p);
const char* to_string(TaskSignal s);

// Semantic content of a 3-word sentence: what is done, to which color, how fast.
struct DescriptionMeaning {
    ActionType action;
    CubeColor color;
    Speed speed;

    bool operator==(const DescriptionMeaning&) const = default;
    int class_index() const {
        return (static_cast<int>(action) * kNumColors + static_cast<int>(color)) * kNumSpeeds +
               static_cast<int>(speed);
    }
};
constexpr int kNumMeanings = kNumActionTypes * kNumColors * kNumSpeeds;  // 36

// A concrete surface form: one token per slot, original or alternative word.
struct SurfaceDescription {
    int action_word = -1;
    int color_word = -1;
    int speed_word = -1;

    std::array<int, 3> tokens() const { return {action_word, color_word, speed_word}; }
    bool operator==(const SurfaceDescription&) const = default;
};

// The 28-token language space: 22 description words in original/alternative
// pairs, 4 task signals, BOS and EOS. Token order is fixed: action words,
// color words, speed words, signals, BOS, EOS.
class Vocabulary {
public:
    Vocabulary();

    static constexpr int kSize = 28;
    static constexpr int kVariantsPerMeaning = 8;  // 2^3 word-form choices

    int size() const { return kSize; }
    const std::string& token(int index) const;
    int index(const std::string& word) const;  // throws UsageError for unknown words
    WordCategory category(int index) const;

    int bos_index() const { return 26; }
    int eos_index() const { return 27; }
    int signal_index(TaskSignal s) const { return 22 + static_cast<int>(s); }

    int action_word(ActionType a, bool alternative) const {
        return static_cast<int>(a) * 2 + (alternative ? 1 : 0);
    }
    int color_word(CubeColor c, bool alternative) const {
        return 6 + static_cast<int>(c) * 2 + (alternative ? 1 : 0);
    }
    int speed_word(Speed s, bool alternative) const {
        return 18 + static_cast<int>(s) * 2 + (alternative ? 1 : 0);
    }

    // The paired word within the same category (involution: red <-> scarlet).
    int synonym(int index) const;
    const std::string& synonym(const std::string& word) const;
    // Original form of the pair (canonical("scarlet") == index of "red").
    int canonical(int index) const;

    ActionType action_of(int index) const;
    CubeColor color_of(int index) const;
    Speed speed_of(int index) const;

    // variant in [0,8): bit 0 = action word alternative, bit 1 = color, bit 2 = speed.
    SurfaceDescription realize(const DescriptionMeaning& m, int variant) const;
    DescriptionMeaning meaning_of(const SurfaceDescription& d) const;

    SurfaceDescription parse_description(const std::string& sentence) const;
    std::string sentence(const SurfaceDescription& d) const;

private:
    std::vector<std::string> tokens_;
};

}  // namespace xmodal
