#pragma once

#include "moco/kspace.hpp"

namespace moco {

// Golden-angle increment, 180 * (sqrt(5) - 1) / 2 degrees (~111.246) in
// radians. Its complement 180 - 111.246 generates the same spoke lines.
inline double golden_angle() { return M_PI * (std::sqrt(5.0) - 1.0) / 2.0; }

// Variable-density, temporally complementary ky-t pattern. Each frame keeps
// round(H/af) lines including the DC line (ky = H/2); lines are drawn from a
// Gaussian density centered on DC (sigma = H/6) and avoid the previous
// frame's lines where possible. Deterministic for a fixed seed.
CartesianMask make_vista_mask(int h, int t, double af, uint64_t seed);

// Golden-angle radial trajectory: global spoke s gets angle
// base_angle + s * golden_angle(), spokes assigned to frames in acquisition
// order, R samples spanning the k-space diameter. Density compensation is a
// ramp |k| floored at the innermost nonzero sample radius, scaled by the
// polar area element pi / (spokes * R).
RadialTrajectory make_golden_angle_traj(int spokes_per_frame, int readout, int t,
                                        double base_angle = 0.0);

// Fully sampled radial reference: ceil(pi/2 * n) spokes covering one frame.
RadialTrajectory make_full_radial_traj(int h, int w);

// Conventional radial acceleration estimate (pi/2 * H) / spokes.
inline double radial_nominal_af(int h, int spokes_per_frame) {
  return (M_PI / 2.0) * h / spokes_per_frame;
}

}  // namespace moco
