#include "data/scene.hpp"

namespace xmodal {

ActionLabel ActionLabel::from_index(int i) {
    if (i < 0 || i >= kNumActionLabels) throw UsageError("action label index out of range");
    ActionLabel l;
    l.type = static_cast<ActionType>(i / 4);
    l.position = static_cast<CubePosition>((i / 2) % 2);
    l.speed = static_cast<Speed>(i % 2);
    return l;
}

const std::array<Scene, 12>& arrangements() {
    static const std::array<Scene, 12> table = [] {
        std::array<Scene, 12> a{};
        for (int i = 0; i < 6; ++i) {
            const auto c1 = static_cast<CubeColor>(i);
            const auto c2 = static_cast<CubeColor>((i + 1) % 6);
            a[static_cast<size_t>(2 * i)] = Scene{c1, c2, 2 * i};
            a[static_cast<size_t>(2 * i + 1)] = Scene{c2, c1, 2 * i + 1};
        }
        return a;
    }();
    return table;
}

std::vector<Pattern> enumerate_patterns() {
    std::vector<Pattern> out;
    out.reserve(kNumActionLabels * 12);
    for (int l = 0; l < kNumActionLabels; ++l)
        for (const Scene& s : arrangements()) out.push_back({ActionLabel::from_index(l), s});
    return out;
}

}  // namespace xmodal
