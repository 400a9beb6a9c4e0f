#include "data/render.hpp"

#include <algorithm>
#include <cmath>

namespace xmodal {

namespace {

constexpr double kSlotY = 0.60;
constexpr double kSlotLeftX = 0.30;
constexpr double kSlotRightX = 0.70;
constexpr double kCubeHalf = 0.085;
constexpr double kContactRadius = 0.20;

struct Canvas {
    int h, w;
    std::vector<float>* px;

    void fill_rect(double x0, double y0, double x1, double y1, std::array<float, 3> c) {
        const int ix0 = std::max(0, static_cast<int>(std::floor(x0 * w)));
        const int ix1 = std::min(w, static_cast<int>(std::ceil(x1 * w)));
        const int iy0 = std::max(0, static_cast<int>(std::floor(y0 * h)));
        const int iy1 = std::min(h, static_cast<int>(std::ceil(y1 * h)));
        for (int y = iy0; y < iy1; ++y)
            for (int x = ix0; x < ix1; ++x) {
                float* p = px->data() + (static_cast<size_t>(y) * w + x) * 3;
                p[0] = c[0];
                p[1] = c[1];
                p[2] = c[2];
            }
    }

    void stroke(double x0, double y0, double x1, double y1, double thick,
                std::array<float, 3> c) {
        const double len = std::hypot((x1 - x0) * w, (y1 - y0) * h);
        const int n = std::max(2, static_cast<int>(len * 2.0));
        for (int i = 0; i <= n; ++i) {
            const double t = static_cast<double>(i) / n;
            const double cx = x0 + (x1 - x0) * t;
            const double cy = y0 + (y1 - y0) * t;
            fill_rect(cx - thick, cy - thick, cx + thick, cy + thick, c);
        }
    }
};

}  // namespace

std::array<float, 3> color_rgb(CubeColor c) {
    switch (c) {
        case CubeColor::kRed: return {0.85f, 0.10f, 0.10f};
        case CubeColor::kGreen: return {0.10f, 0.70f, 0.15f};
        case CubeColor::kBlue: return {0.12f, 0.15f, 0.85f};
        case CubeColor::kYellow: return {0.90f, 0.85f, 0.10f};
        case CubeColor::kCyan: return {0.10f, 0.80f, 0.80f};
        case CubeColor::kViolet: return {0.60f, 0.15f, 0.80f};
    }
    return {0, 0, 0};
}

std::array<double, 2> hand_position(const Posture& j) {
    const double hx = 0.50 - 0.33 * j[1] - 0.08 * j[3];
    const double hy = 0.58 - 0.24 * j[0] - 0.16 * j[2];
    return {std::clamp(hx, 0.0, 1.0), std::clamp(hy, 0.0, 1.0)};
}

std::vector<float> render_frame(const Scene& scene, const Posture& joints, int h, int w) {
    if (h <= 0 || w <= 0 || h > kMaxFrameH || w > kMaxFrameW)
        throw UsageError("frame size out of supported range");
    std::vector<float> px(static_cast<size_t>(h) * w * 3);
    Canvas cv{h, w, &px};

    cv.fill_rect(0, 0, 1, 1, {0.82f, 0.85f, 0.88f});            // backdrop
    cv.fill_rect(0, 0.42, 1, 1, {0.55f, 0.45f, 0.35f});         // table
    cv.fill_rect(0, 0.42, 1, 0.45, {0.45f, 0.36f, 0.28f});      // table edge

    const auto hand = hand_position(joints);
    const double slots[2] = {kSlotLeftX, kSlotRightX};
    for (int s = 0; s < 2; ++s) {
        const double dx = hand[0] - slots[s];
        const double dy = hand[1] - kSlotY;
        const double d = std::hypot(dx, dy);
        // cubes yield away from the hand while it sweeps through the slot
        const double push = 2.0 * std::max(0.0, 1.0 - d / kContactRadius);
        const double cx = slots[s] - dx * push;
        const double cy = kSlotY - dy * push;
        const CubeColor col =
            s == 0 ? scene.color_at(CubePosition::kLeft) : scene.color_at(CubePosition::kRight);
        cv.fill_rect(cx - kCubeHalf, cy - kCubeHalf, cx + kCubeHalf, cy + kCubeHalf,
                     color_rgb(col));
    }

    // arm proxy: shoulder anchor -> elbow -> hand, elbow bowed by the elbow joint
    const std::array<float, 3> arm = {0.16f, 0.16f, 0.20f};
    const double ax = 0.54, ay = 1.02;
    const double ex = 0.5 * (ax + hand[0]) + 0.10 * joints[2];
    const double ey = 0.5 * (ay + hand[1]) + 0.06 * joints[4];
    cv.stroke(ax, ay, ex, ey, 0.022, arm);
    cv.stroke(ex, ey, hand[0], hand[1], 0.018, arm);
    cv.fill_rect(hand[0] - 0.03, hand[1] - 0.03, hand[0] + 0.03, hand[1] + 0.03,
                 {0.10f, 0.10f, 0.12f});
    return px;
}

}  // namespace xmodal
