#include "data/trajectory.hpp"

#include <algorithm>
#include <cmath>

namespace xmodal {

namespace {

struct Keyframe {
    double time;  // normalized [0, 1]
    Posture pose;
};

Posture clamp_pose(Posture p) {
    for (auto& v : p) v = std::clamp(v, -1.0, 1.0);
    return p;
}

Posture add(const Posture& a, const Posture& b, double scale = 1.0) {
    Posture r;
    for (int j = 0; j < kNumJoints; ++j)
        r[static_cast<size_t>(j)] = a[static_cast<size_t>(j)] + scale * b[static_cast<size_t>(j)];
    return r;
}

Posture mix(const Posture& a, const Posture& b, double w) {
    Posture r;
    for (int j = 0; j < kNumJoints; ++j)
        r[static_cast<size_t>(j)] =
            (1.0 - w) * a[static_cast<size_t>(j)] + w * b[static_cast<size_t>(j)];
    return r;
}

// Joint order: shoulder pitch, shoulder roll, elbow, wrist, grip.
Posture reach_posture(CubePosition pos) {
    const double side = pos == CubePosition::kLeft ? 1.0 : -1.0;
    return {0.05, 0.55 * side, -0.05, -0.25 * side, -0.10};
}

Posture stroke_delta(ActionType type, CubePosition pos) {
    const double side = pos == CubePosition::kLeft ? 1.0 : -1.0;
    switch (type) {
        case ActionType::kPush: return {0.42, 0.10 * side, 0.36, 0.05, 0.15};
        case ActionType::kPull: return {-0.46, -0.06 * side, -0.40, 0.10, 0.15};
        case ActionType::kSlide: return {0.06, -0.50 * side, 0.06, -0.35 * side, 0.05};
    }
    return {};
}

double min_jerk(double tau) {
    const double t3 = tau * tau * tau;
    return t3 * (10.0 + tau * (-15.0 + 6.0 * tau));
}

}  // namespace

Posture rest_posture() { return {-0.55, 0.10, -0.45, 0.05, 0.30}; }

JointTrajectory synthesize_trajectory(const ActionLabel& label, const Scene& scene, Rng rng) {
    (void)scene;  // trajectories depend on the action, not the cube colors
    const Posture rest = rest_posture();
    const Posture reach = reach_posture(label.position);
    const Posture delta = stroke_delta(label.type, label.position);
    const Posture stroke = clamp_pose(add(reach, delta));
    const Posture retract = mix(reach, rest, 0.5);

    std::vector<Keyframe> keys;
    if (label.speed == Speed::kSlow) {
        keys = {{0.00, rest},    {0.30, reach}, {0.62, stroke},
                {0.82, retract}, {1.00, rest}};
    } else {
        // fast execution overshoots the stroke, settles, and dwells longer
        const Posture overshoot = clamp_pose(add(reach, delta, 1.35));
        keys = {{0.00, rest},   {0.22, reach},   {0.44, overshoot},
                {0.56, stroke}, {0.80, retract}, {1.00, rest}};
    }

    // jitter every keyframe except the initial rest posture
    for (size_t k = 1; k < keys.size(); ++k) {
        for (auto& v : keys[k].pose) v = std::clamp(v + rng.normal() * 0.02, -1.0, 1.0);
    }

    const int steps = frames_for(label.speed);
    JointTrajectory traj;
    traj.steps = steps;
    traj.joints.resize(static_cast<size_t>(steps) * kNumJoints);
    for (int t = 0; t < steps; ++t) {
        const double time = static_cast<double>(t) / static_cast<double>(steps - 1);
        size_t seg = 0;
        while (seg + 2 < keys.size() && time > keys[seg + 1].time) ++seg;
        const auto& a = keys[seg];
        const auto& b = keys[seg + 1];
        const double tau = std::clamp((time - a.time) / (b.time - a.time), 0.0, 1.0);
        const double s = min_jerk(tau);
        for (int j = 0; j < kNumJoints; ++j)
            traj.joints[static_cast<size_t>(t) * kNumJoints + j] =
                (1.0 - s) * a.pose[static_cast<size_t>(j)] + s * b.pose[static_cast<size_t>(j)];
    }
    return traj;
}

}  // namespace xmodal
