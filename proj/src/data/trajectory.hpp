#pragma once

#include <vector>

#include "core/rng.hpp"
#include "data/scene.hpp"

namespace xmodal {

constexpr int kNumJoints = 5;

inline int frames_for(Speed s) { return s == Speed::kFast ? 50 : 100; }

using Posture = std::array<double, kNumJoints>;

// Normalized joint-angle sequence, M x 5 row-major, all values in [-1, 1].
struct JointTrajectory {
    int steps = 0;
    std::vector<double> joints;

    double at(int t, int j) const { return joints[static_cast<size_t>(t) * kNumJoints + j]; }
    Posture posture(int t) const {
        Posture p;
        for (int j = 0; j < kNumJoints; ++j) p[static_cast<size_t>(j)] = at(t, j);
        return p;
    }
};

Posture rest_posture();

// Minimum-jerk interpolation through action-specific keyframe postures.
// The first frame is exactly the rest posture; later keyframes carry
// per-seed jitter (std 0.02) standing in for execution variability.
// Fast actions overshoot the stroke and dwell near its end, so the two
// speeds differ in content as well as in length (M = 50 fast, 100 slow).
JointTrajectory synthesize_trajectory(const ActionLabel& label, const Scene& scene, Rng rng);

}  // namespace xmodal
