#pragma once

#include <array>
#include <vector>

#include "data/vocab.hpp"

namespace xmodal {

// One of the 12 distinct actions: type x position x speed.
struct ActionLabel {
    ActionType type = ActionType::kPush;
    CubePosition position = CubePosition::kLeft;
    Speed speed = Speed::kSlow;

    bool operator==(const ActionLabel&) const = default;
    int index() const {
        return (static_cast<int>(type) * 2 + static_cast<int>(position)) * 2 +
               static_cast<int>(speed);
    }
    static ActionLabel from_index(int i);
};
constexpr int kNumActionLabels = 12;

// Two differently colored cubes on the table. The arrangement list is the
// fixed cyclic set: pairs (c_i, c_{i+1 mod 6}) in both orders, 12 in total.
struct Scene {
    CubeColor left_color = CubeColor::kRed;
    CubeColor right_color = CubeColor::kGreen;
    int arrangement_id = 0;

    bool operator==(const Scene&) const = default;
    CubeColor color_at(CubePosition p) const {
        return p == CubePosition::kLeft ? left_color : right_color;
    }
};

const std::array<Scene, 12>& arrangements();

struct Pattern {
    ActionLabel label;
    Scene scene;
};

// All 144 (action, arrangement) combinations in deterministic order.
std::vector<Pattern> enumerate_patterns();

}  // namespace xmodal
