#include "data/vocab.hpp"

#include <sstream>

namespace xmodal {

const char* to_string(ActionType a) {
    switch (a) {
        case ActionType::kPush: return "push";
        case ActionType::kPull: return "pull";
        case ActionType::kSlide: return "slide";
    }
    return "?";
}

const char* to_string(CubeColor c) {
    switch (c) {
        case CubeColor::kRed: return "red";
        case CubeColor::kGreen: return "green";
        case CubeColor::kBlue: return "blue";
        case CubeColor::kYellow: return "yellow";
        case CubeColor::kCyan: return "cyan";
        case CubeColor::kViolet: return "violet";
    }
    return "?";
}

const char* to_string(Speed s) { return s == Speed::kSlow ? "slow" : "fast"; }

const char* to_string(CubePosition p) { return p == CubePosition::kLeft ? "left" : "right"; }

const char* to_string(TaskSignal s) {
    switch (s) {
        case TaskSignal::kDescribe: return "describe";
        case TaskSignal::kExecute: return "execute";
        case TaskSignal::kRepeatAction: return "repeat-action";
        case TaskSignal::kRepeatLanguage: return "repeat-language";
    }
    return "?";
}

Vocabulary::Vocabulary() {
    tokens_ = {
        // action words, original/alternative pairs
        "push", "move-up", "pull", "move-down", "slide", "move-sideways",
        // color words
        "red", "scarlet", "green", "harlequin", "blue", "azure",
        "yellow", "blonde", "cyan", "greenish-blue", "violet", "purple",
        // speed words
        "slowly", "unhurriedly", "fast", "quickly",
        // task signals
        "describe", "execute", "repeat-action", "repeat-language",
        // markers
        "<bos>", "<eos>",
    };
}

const std::string& Vocabulary::token(int index) const {
    if (index < 0 || index >= kSize) throw UsageError("token index out of range");
    return tokens_[static_cast<size_t>(index)];
}

int Vocabulary::index(const std::string& word) const {
    for (int i = 0; i < kSize; ++i)
        if (tokens_[static_cast<size_t>(i)] == word) return i;
    throw UsageError("word not in vocabulary: '" + word + "'");
}

WordCategory Vocabulary::category(int index) const {
    if (index < 0 || index >= kSize) throw UsageError("token index out of range");
    if (index < 6) return WordCategory::kAction;
    if (index < 18) return WordCategory::kColor;
    if (index < 22) return WordCategory::kSpeed;
    if (index < 26) return WordCategory::kSignal;
    return WordCategory::kMarker;
}

int Vocabulary::synonym(int index) const {
    const WordCategory c = category(index);
    if (c != WordCategory::kAction && c != WordCategory::kColor && c != WordCategory::kSpeed)
        throw UsageError("synonym defined only for description words");
    return index ^ 1;  // pairs are adjacent: original at even, alternative at odd
}

const std::string& Vocabulary::synonym(const std::string& word) const {
    return token(synonym(index(word)));
}

int Vocabulary::canonical(int index) const {
    const WordCategory c = category(index);
    if (c != WordCategory::kAction && c != WordCategory::kColor && c != WordCategory::kSpeed)
        throw UsageError("canonical defined only for description words");
    return index & ~1;
}

ActionType Vocabulary::action_of(int index) const {
    if (category(index) != WordCategory::kAction) throw UsageError("not an action word");
    return static_cast<ActionType>(index / 2);
}

CubeColor Vocabulary::color_of(int index) const {
    if (category(index) != WordCategory::kColor) throw UsageError("not a color word");
    return static_cast<CubeColor>((index - 6) / 2);
}

Speed Vocabulary::speed_of(int index) const {
    if (category(index) != WordCategory::kSpeed) throw UsageError("not a speed word");
    return static_cast<Speed>((index - 18) / 2);
}

SurfaceDescription Vocabulary::realize(const DescriptionMeaning& m, int variant) const {
    if (variant < 0 || variant >= kVariantsPerMeaning)
        throw UsageError("description variant out of range");
    SurfaceDescription d;
    d.action_word = action_word(m.action, variant & 1);
    d.color_word = color_word(m.color, variant & 2);
    d.speed_word = speed_word(m.speed, variant & 4);
    return d;
}

DescriptionMeaning Vocabulary::meaning_of(const SurfaceDescription& d) const {
    return DescriptionMeaning{action_of(d.action_word), color_of(d.color_word),
                              speed_of(d.speed_word)};
}

SurfaceDescription Vocabulary::parse_description(const std::string& sentence) const {
    std::istringstream is(sentence);
    std::string w1, w2, w3, extra;
    if (!(is >> w1 >> w2 >> w3) || (is >> extra))
        throw UsageError("descriptions are 3-word sentences, got: '" + sentence + "'");
    SurfaceDescription d{index(w1), index(w2), index(w3)};
    if (category(d.action_word) != WordCategory::kAction ||
        category(d.color_word) != WordCategory::kColor ||
        category(d.speed_word) != WordCategory::kSpeed)
        throw UsageError("description word order must be action color speed: '" + sentence + "'");
    return d;
}

std::string Vocabulary::sentence(const SurfaceDescription& d) const {
    return token(d.action_word) + " " + token(d.color_word) + " " + token(d.speed_word);
}

}  // namespace xmodal
