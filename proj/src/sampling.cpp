#include "moco/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace moco {

CartesianMask make_vista_mask(int h, int t, double af, uint64_t seed) {
  require(h >= 4, "vista: H must be at least 4");
  require(t >= 1, "vista: T must be at least 1");
  require(af >= 1.0 && af <= double(h), "vista: acceleration factor out of [1, H]");
  const int dc = h / 2;
  const int per_frame = std::max(1, int(std::lround(double(h) / af)));

  Rng rng(derive_seed(seed, 0x7157a));
  std::vector<double> density(h);
  const double sigma = double(h) / 6.0;
  for (int ky = 0; ky < h; ky++) {
    double d = (ky - dc) / sigma;
    density[ky] = std::exp(-0.5 * d * d);
  }

  CartesianMask mask(h, t);
  std::set<int> prev;
  for (int ti = 0; ti < t; ti++) {
    std::set<int> lines = {dc};
    // first pass avoids the previous frame's lines, second pass allows them
    for (int pass = 0; pass < 2 && int(lines.size()) < per_frame; pass++) {
      std::vector<double> w(h, 0.0);
      bool any = false;
      for (int ky = 0; ky < h; ky++) {
        if (lines.count(ky)) continue;
        if (pass == 0 && prev.count(ky)) continue;
        w[ky] = density[ky];
        any = true;
      }
      while (any && int(lines.size()) < per_frame) {
        std::discrete_distribution<int> dist(w.begin(), w.end());
        int ky = dist(rng.engine());
        lines.insert(ky);
        w[ky] = 0.0;
        any = std::any_of(w.begin(), w.end(), [](double v) { return v > 0.0; });
      }
    }
    for (int ky : lines) mask.set(ti, ky, true);
    prev = std::move(lines);
  }
  return mask;
}

RadialTrajectory make_golden_angle_traj(int spokes_per_frame, int readout, int t,
                                        double base_angle) {
  require(spokes_per_frame >= 1, "radial: need at least one spoke per frame");
  require(readout >= 2 && readout % 2 == 0, "radial: readout length must be even");
  require(t >= 1, "radial: T must be at least 1");

  RadialTrajectory traj;
  traj.readout = readout;
  traj.spokes_per_frame = spokes_per_frame;
  traj.base_angle = base_angle;
  traj.frames.resize(t);

  const double ga = golden_angle();
  const double floor_r = 1.0 / readout;
  const double dcf_scale = M_PI / (double(spokes_per_frame) * readout);
  for (int ti = 0; ti < t; ti++) {
    RadialFrame& f = traj.frames[ti];
    f.readout = readout;
    for (int sp = 0; sp < spokes_per_frame; sp++) {
      const long global = long(ti) * spokes_per_frame + sp;
      const double ang = base_angle + double(global) * ga;
      f.angles.push_back(ang);
      const double cx = std::cos(ang), cy = std::sin(ang);
      for (int r = 0; r < readout; r++) {
        const double rad = (double(r) - readout / 2) / readout;  // [-0.5, 0.5)
        f.k.push_back({rad * cx, rad * cy});
        // every spoke crosses k=0, so the floored DC weight is shared
        double w = std::max(std::abs(rad), floor_r) * dcf_scale;
        if (rad == 0.0) w /= spokes_per_frame;
        f.dcf.push_back(w);
      }
    }
  }
  return traj;
}

RadialTrajectory make_full_radial_traj(int h, int w) {
  const int n = std::max(h, w);
  const int spokes = int(std::ceil(M_PI / 2.0 * n));
  RadialTrajectory traj;
  traj.readout = 2 * n;
  traj.spokes_per_frame = spokes;
  traj.frames.resize(1);
  RadialFrame& f = traj.frames[0];
  f.readout = traj.readout;
  const double floor_r = 1.0 / traj.readout;
  const double dcf_scale = M_PI / (double(spokes) * traj.readout);
  for (int sp = 0; sp < spokes; sp++) {
    const double ang = M_PI * sp / spokes;
    f.angles.push_back(ang);
    const double cx = std::cos(ang), cy = std::sin(ang);
    for (int r = 0; r < traj.readout; r++) {
      const double rad = (double(r) - traj.readout / 2) / traj.readout;
      f.k.push_back({rad * cx, rad * cy});
      double w = std::max(std::abs(rad), floor_r) * dcf_scale;
      if (rad == 0.0) w /= spokes;
      f.dcf.push_back(w);
    }
  }
  return traj;
}

}  // namespace moco
