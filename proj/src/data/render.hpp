#pragma once

#include <vector>

#include "data/scene.hpp"
#include "data/trajectory.hpp"

namespace xmodal {

constexpr int kDefaultFrameH = 48;
constexpr int kDefaultFrameW = 64;
constexpr int kMaxFrameH = 120;
constexpr int kMaxFrameW = 160;

// Flat-shaded first-person view: table, two colored cubes at the left/right
// slots, and an arm proxy polyline driven by the joint values. Pure function
// of (scene, joints); pixel values in [0, 1], layout H x W x 3 row-major.
std::vector<float> render_frame(const Scene& scene, const Posture& joints, int h, int w);

// Image-plane hand position implied by a posture, normalized [0,1]^2.
// Shared with the renderer so cube displacement follows the arm.
std::array<double, 2> hand_position(const Posture& joints);

std::array<float, 3> color_rgb(CubeColor c);

}  // namespace xmodal
