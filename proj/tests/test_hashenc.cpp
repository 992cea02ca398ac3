#include <cmath>
#include <random>

#include "doctest.h"
#include "moco/hashgrid.hpp"

using namespace moco;

namespace {

HashGridConfig small2d() {
  HashGridConfig c;
  c.dims = 2;
  c.n_min = 2;
  c.growth = 2.0;
  c.levels = 3;
  c.feats = 2;
  c.table_size = 1u << 8;
  return c;
}

HashGridConfig small3d() {
  HashGridConfig c = small2d();
  c.dims = 3;
  c.table_size = 1u << 6;  // forces hashing at the top level (5^3 > 64)
  return c;
}

template <typename S>
std::vector<S> encode_points(const HashGrid<S>& g, const std::vector<S>& coords,
                             LevelWindow win) {
  const int p = int(coords.size()) / g.cfg.dims;
  std::vector<S> out(size_t(p) * g.feature_dim());
  hash_encode(g, coords.data(), p, win, out.data(), g.feature_dim(), 1);
  return out;
}

}  // namespace

TEST_CASE("level resolution follows n_min * growth^(l-1)") {
  HashGridConfig c;
  c.n_min = 2;
  c.growth = 2.0;
  c.levels = 12;
  CHECK(level_resolution(c, 1) == 2);
  CHECK(level_resolution(c, 10) == 1024);
  CHECK(level_resolution(c, 12) == 4096);
  CHECK_THROWS_AS(level_resolution(c, 0), ValidationError);
}

TEST_CASE("per-level storage is the addressable lattice or the hash table") {
  HashGrid<double> g;
  g.init(small3d(), 1, "g");
  CHECK(g.levels[0].direct);        // 3^3 = 27 <= 64
  CHECK(g.levels[0].entries == 27);
  CHECK(!g.levels[2].direct);       // 9^3 = 729 > 64
  CHECK(g.levels[2].entries == 64);
}

TEST_CASE("tables initialize inside (-1e-4, 1e-4) and deterministically") {
  HashGrid<double> a, b;
  a.init(small2d(), 7, "g");
  b.init(small2d(), 7, "g");
  for (size_t l = 0; l < a.tables.size(); l++) {
    CHECK(a.tables[l].value == b.tables[l].value);
    for (double v : a.tables[l].value) CHECK(std::abs(v) < 1e-4);
  }
}

TEST_CASE("a point on a grid vertex reads that vertex's entry exactly") {
  HashGrid<double> g;
  g.init(small2d(), 3, "g");
  // vertex (1, 2) of level 2 (res 4, verts 5): coord (0.25, 0.5)
  std::vector<double> coords = {0.25, 0.5};
  auto feats = encode_points(g, coords, {1, 3});
  const uint32_t slot = 1 + 2 * 5;
  for (int f = 0; f < 2; f++)
    CHECK(feats[2 * 2 + f] == g.tables[1].value[size_t(slot) * 2 + f]);
}

TEST_CASE("a cell-center point averages the corner entries") {
  HashGrid<double> g;
  g.init(small2d(), 5, "g");
  // center of cell (0,0) at level 1 (res 2): coord (0.25, 0.25)
  std::vector<double> coords = {0.25, 0.25};
  auto feats = encode_points(g, coords, {1, 3});
  for (int f = 0; f < 2; f++) {
    double mean = 0;
    for (int cy = 0; cy < 2; cy++)
      for (int cx = 0; cx < 2; cx++) mean += g.tables[0].value[size_t(cx + cy * 3) * 2 + f];
    mean /= 4.0;
    CHECK(feats[f] == doctest::Approx(mean).epsilon(1e-12));
  }
}

TEST_CASE("levels above the window output exactly zero") {
  HashGrid<double> g;
  g.init(small2d(), 9, "g");
  std::vector<double> coords = {0.37, 0.81};
  auto feats = encode_points(g, coords, {1, 1});
  for (int f = 2; f < 6; f++) CHECK(feats[f] == 0.0);
  for (int f = 0; f < 2; f++) CHECK(feats[f] != 0.0);
}

TEST_CASE("encode is multilinear within a cell") {
  HashGrid<double> g;
  g.init(small2d(), 13, "g");
  // axis-aligned segment inside cell (1,1) of every level up to res 8
  std::vector<double> a = {0.876, 0.877};
  std::vector<double> b = {0.879, 0.877};
  std::vector<double> mid = {(a[0] + b[0]) / 2, 0.877};
  auto fa = encode_points(g, a, {1, 3});
  auto fb = encode_points(g, b, {1, 3});
  auto fm = encode_points(g, mid, {1, 3});
  for (size_t f = 0; f < fa.size(); f++)
    CHECK(fm[f] == doctest::Approx((fa[f] + fb[f]) / 2).epsilon(1e-10));
}

TEST_CASE("encode is continuous across cell boundaries") {
  HashGrid<double> g;
  g.init(small2d(), 17, "g");
  std::vector<double> lo = {0.5 - 1e-10, 0.3};
  std::vector<double> hi = {0.5 + 1e-10, 0.3};
  auto flo = encode_points(g, lo, {1, 3});
  auto fhi = encode_points(g, hi, {1, 3});
  for (size_t f = 0; f < flo.size(); f++) CHECK(std::abs(flo[f] - fhi[f]) < 1e-7);
}

TEST_CASE("encode rejects out-of-domain coordinates") {
  HashGrid<double> g;
  g.init(small2d(), 1, "g");
  std::vector<double> bad = {1.01, 0.5};
  std::vector<double> out(6);
  CHECK_THROWS_AS(hash_encode(g, bad.data(), 1, {1, 3}, out.data(), 6, 1), ValidationError);
}

TEST_CASE("backward on a vertex point routes the upstream gradient to one entry") {
  HashGrid<double> g;
  g.init(small2d(), 23, "g");
  std::vector<double> coords = {0.5, 0.5};  // vertex (1,1) at level 1
  std::vector<double> up(g.feature_dim(), 0.0);
  up[0] = 1.7;  // level 1, feature 0
  hash_encode_backward(g, coords.data(), 1, {1, 1}, up.data(), g.feature_dim(), 1, nullptr);
  const uint32_t slot = 1 + 1 * 3;
  for (uint32_t e = 0; e < g.levels[0].entries; e++)
    for (int f = 0; f < 2; f++) {
      double want = (e == slot && f == 0) ? 1.7 : 0.0;
      CHECK(g.tables[0].grad[size_t(e) * 2 + f] == want);
    }
}

TEST_CASE("table gradients match central finite differences") {
  for (int dims = 2; dims <= 3; dims++) {
    HashGrid<double> g;
    g.init(dims == 2 ? small2d() : small3d(), 31, "g");
    std::mt19937_64 eng(5);
    std::uniform_real_distribution<double> u(0.02, 0.98);
    const int np = 7;
    std::vector<double> coords(size_t(np) * dims);
    for (auto& c : coords) c = u(eng);
    std::vector<double> up(size_t(np) * g.feature_dim());
    for (auto& v : up) v = u(eng) - 0.5;
    const LevelWindow win{1, 3};

    auto loss = [&]() {
      std::vector<double> out(size_t(np) * g.feature_dim());
      hash_encode(g, coords.data(), np, win, out.data(), g.feature_dim(), 1);
      double s = 0;
      for (size_t i = 0; i < out.size(); i++) s += out[i] * up[i];
      return s;
    };
    hash_encode_backward(g, coords.data(), np, win, up.data(), g.feature_dim(), 1, nullptr);

    const double eps = 1e-6;
    for (auto& blk : g.tables)
      for (uint32_t e : blk.active_entries)
        for (int f = 0; f < blk.entry_floats; f++) {
          size_t i = size_t(e) * blk.entry_floats + f;
          double keep = blk.value[i];
          blk.value[i] = keep + eps;
          double fp = loss();
          blk.value[i] = keep - eps;
          double fm = loss();
          blk.value[i] = keep;
          double fd = (fp - fm) / (2 * eps);
          double ad = blk.grad[i];
          CHECK(std::abs(fd - ad) / std::max({std::abs(fd), std::abs(ad), 1e-6}) < 1e-4);
        }
  }
}

TEST_CASE("coordinate gradients match central finite differences") {
  HashGrid<double> g;
  g.init(small2d(), 37, "g");
  std::mt19937_64 eng(8);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  std::vector<double> coords = {u(eng), u(eng), u(eng), u(eng)};
  std::vector<double> up(2 * g.feature_dim());
  for (auto& v : up) v = u(eng) - 0.5;
  // freeze level 1: coordinate gradients must still include it
  const LevelWindow win{2, 3};

  auto loss = [&]() {
    std::vector<double> out(2 * g.feature_dim());
    hash_encode(g, coords.data(), 2, win, out.data(), g.feature_dim(), 1);
    double s = 0;
    for (size_t i = 0; i < out.size(); i++) s += out[i] * up[i];
    return s;
  };
  std::vector<double> cg(coords.size(), 0.0);
  hash_encode_backward(g, coords.data(), 2, win, up.data(), g.feature_dim(), 1, cg.data());

  const double eps = 1e-7;
  for (size_t i = 0; i < coords.size(); i++) {
    double keep = coords[i];
    coords[i] = keep + eps;
    double fp = loss();
    coords[i] = keep - eps;
    double fm = loss();
    coords[i] = keep;
    double fd = (fp - fm) / (2 * eps);
    CHECK(std::abs(fd - cg[i]) / std::max({std::abs(fd), std::abs(cg[i]), 1e-6}) < 1e-4);
  }
}

TEST_CASE("frozen levels receive exactly zero table gradient") {
  HashGrid<double> g;
  g.init(small2d(), 41, "g");
  std::vector<double> coords = {0.3, 0.7};
  std::vector<double> up(g.feature_dim(), 1.0);
  hash_encode_backward(g, coords.data(), 1, {2, 3}, up.data(), g.feature_dim(), 1, nullptr);
  for (double v : g.tables[0].grad) CHECK(v == 0.0);
  CHECK(g.tables[0].active_entries.empty());
  bool any = false;
  for (double v : g.tables[1].grad) any |= v != 0.0;
  CHECK(any);
}

TEST_CASE("schedule windows follow the three-stage plan") {
  CHECK(schedule_window(ScheduleNet::Dvf, 1, 1200, 10).lo == 1);
  CHECK(schedule_window(ScheduleNet::Dvf, 1, 1200, 10).hi == 6);
  CHECK(schedule_window(ScheduleNet::Canonical, 900, 1200, 12).lo == 8);
  CHECK(schedule_window(ScheduleNet::Canonical, 900, 1200, 12).hi == 12);
  // boundary iteration belongs to the earlier stage
  CHECK(schedule_window(ScheduleNet::Dvf, 400, 1200, 10).lo == 1);
  CHECK(schedule_window(ScheduleNet::Dvf, 400, 1200, 10).hi == 6);
  CHECK(schedule_window(ScheduleNet::Dvf, 401, 1200, 10).lo == 4);
  // proportional scaling of the stage boundaries
  CHECK(schedule_window(ScheduleNet::Dvf, 100, 300, 10).hi == 6);
  CHECK(schedule_window(ScheduleNet::Dvf, 101, 300, 10).hi == 8);
  CHECK(schedule_window(ScheduleNet::Canonical, 201, 300, 12).lo == 8);
  // clamped for small toy grids
  CHECK(schedule_window(ScheduleNet::Canonical, 1, 1200, 4).hi == 4);
}

TEST_CASE("identical corner coordinates always resolve to the same slot") {
  HashGrid<double> g;
  g.init(small3d(), 43, "g");
  std::vector<double> coords = {0.312, 0.77, 0.05};
  auto a = encode_points(g, coords, {1, 3});
  auto b = encode_points(g, coords, {1, 3});
  CHECK(a == b);
}
