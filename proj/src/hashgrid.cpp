#include "moco/hashgrid.hpp"

#include <omp.h>

#include <cmath>

namespace moco {

namespace {
constexpr uint32_t kPrimes[3] = {1u, 2654435761u, 805459861u};
}

void HashGridConfig::validate() const {
  require(dims == 2 || dims == 3, "hashgrid: dims must be 2 or 3");
  require(n_min >= 1, "hashgrid: n_min must be >= 1");
  require(growth > 1.0, "hashgrid: growth must exceed 1");
  require(levels >= 1, "hashgrid: need at least one level");
  require(feats >= 1 && feats <= 16, "hashgrid: feats must be in [1, 16]");
  require(table_size > 0 && (table_size & (table_size - 1)) == 0,
          "hashgrid: table_size must be a power of two");
}

int level_resolution(const HashGridConfig& cfg, int level) {
  require(level >= 1 && level <= cfg.levels, "hashgrid: level out of range");
  return int(std::floor(cfg.n_min * std::pow(cfg.growth, level - 1)));
}

template <typename S>
void HashGrid<S>::init(const HashGridConfig& config, uint64_t seed, const std::string& name) {
  config.validate();
  cfg = config;
  levels.assign(cfg.levels, {});
  tables.assign(cfg.levels, {});
  for (int l = 1; l <= cfg.levels; l++) {
    LevelInfo& info = levels[l - 1];
    info.res = level_resolution(cfg, l);
    info.verts = info.res + 1;
    double lattice = std::pow(double(info.verts), cfg.dims);
    info.direct = lattice <= double(cfg.table_size);
    info.entries = info.direct ? uint32_t(lattice) : cfg.table_size;

    ParamBlock<S>& t = tables[l - 1];
    t.name = name + ".level" + std::to_string(l);
    t.is_table = true;
    t.resize(size_t(info.entries) * cfg.feats, cfg.feats, /*dense=*/false);
    Rng rng(derive_seed(seed, 0x9a50 + l));
    for (S& v : t.value) v = S(rng.uniform(-1e-4, 1e-4));
  }
}

template <typename S>
size_t HashGrid<S>::param_count() const {
  size_t n = 0;
  for (const auto& t : tables) n += t.value.size();
  return n;
}

namespace {

// Corner slot for integer lattice coordinates.
inline uint32_t corner_slot(const int* c, int dims, int verts, bool direct, uint32_t entries) {
  if (direct) {
    uint32_t idx = uint32_t(c[0]);
    uint32_t mul = uint32_t(verts);
    for (int d = 1; d < dims; d++) {
      idx += uint32_t(c[d]) * mul;
      mul *= uint32_t(verts);
    }
    return idx;
  }
  uint32_t h = 0;
  for (int d = 0; d < dims; d++) h ^= uint32_t(c[d]) * kPrimes[d];
  return h & (entries - 1);
}

template <typename S>
void locate(const S* coord, int dims, int res, int* base, double* frac) {
  for (int d = 0; d < dims; d++) {
    double x = double(coord[d]);
    require(x >= -1e-6 && x <= 1.0 + 1e-6, "hash_encode: coordinate outside [0,1]");
    x = std::min(std::max(x, 0.0), 1.0);
    double pos = x * res;
    int i0 = int(std::floor(pos));
    if (i0 > res - 1) i0 = res - 1;
    base[d] = i0;
    frac[d] = pos - i0;
  }
}

}  // namespace

template <typename S>
void hash_encode(const HashGrid<S>& grid, const S* coords, int npoints, LevelWindow window,
                 S* out, size_t stride_point, size_t stride_feat) {
  const int dims = grid.cfg.dims, nf = grid.cfg.feats, nl = grid.cfg.levels;
  require(window.lo >= 1 && window.lo <= window.hi && window.hi <= nl,
          "hash_encode: invalid level window");
  const int corners = 1 << dims;

#pragma omp parallel for schedule(static)
  for (int p = 0; p < npoints; p++) {
    const S* c = coords + size_t(p) * dims;
    S* op = out + size_t(p) * stride_point;
    for (int l = 1; l <= nl; l++) {
      S* of = op + size_t(l - 1) * nf * stride_feat;
      if (l > window.hi) {
        for (int f = 0; f < nf; f++) of[size_t(f) * stride_feat] = S(0);
        continue;
      }
      const auto& info = grid.levels[l - 1];
      const S* table = grid.tables[l - 1].value.data();
      int base[3];
      double frac[3];
      locate(c, dims, info.res, base, frac);
      double acc[16] = {0};
      for (int m = 0; m < corners; m++) {
        int cc[3];
        double w = 1.0;
        for (int d = 0; d < dims; d++) {
          const int bit = (m >> d) & 1;
          cc[d] = base[d] + bit;
          w *= bit ? frac[d] : 1.0 - frac[d];
        }
        const uint32_t slot = corner_slot(cc, dims, info.verts, info.direct, info.entries);
        const S* entry = table + size_t(slot) * nf;
        for (int f = 0; f < nf; f++) acc[f] += w * double(entry[f]);
      }
      for (int f = 0; f < nf; f++) of[size_t(f) * stride_feat] = S(acc[f]);
    }
  }
}

template <typename S>
void hash_encode_backward(HashGrid<S>& grid, const S* coords, int npoints, LevelWindow window,
                          const S* upstream, size_t stride_point, size_t stride_feat,
                          std::type_identity_t<S>* coord_grad) {
  const int dims = grid.cfg.dims, nf = grid.cfg.feats, nl = grid.cfg.levels;
  require(window.lo >= 1 && window.lo <= window.hi && window.hi <= nl,
          "hash_encode_backward: invalid level window");
  const int corners = 1 << dims;

  // serial scatter keeps gradient accumulation deterministic
  for (int p = 0; p < npoints; p++) {
    const S* c = coords + size_t(p) * dims;
    const S* up = upstream + size_t(p) * stride_point;
    for (int l = 1; l <= nl; l++) {
      if (l > window.hi) continue;
      const bool frozen = l < window.lo;
      if (frozen && !coord_grad) continue;
      const auto& info = grid.levels[l - 1];
      ParamBlock<S>& blk = grid.tables[l - 1];
      const S* uf = up + size_t(l - 1) * nf * stride_feat;
      int base[3];
      double frac[3];
      locate(c, dims, info.res, base, frac);
      double cg[3] = {0, 0, 0};
      for (int m = 0; m < corners; m++) {
        int cc[3];
        double w = 1.0;
        for (int d = 0; d < dims; d++) {
          const int bit = (m >> d) & 1;
          cc[d] = base[d] + bit;
          w *= bit ? frac[d] : 1.0 - frac[d];
        }
        const uint32_t slot = corner_slot(cc, dims, info.verts, info.direct, info.entries);
        if (!frozen) {
          blk.touch(slot);
          S* ge = blk.grad.data() + size_t(slot) * nf;
          for (int f = 0; f < nf; f++) ge[f] += S(w * double(uf[size_t(f) * stride_feat]));
        }
        if (coord_grad) {
          const S* entry = blk.value.data() + size_t(slot) * nf;
          double dot = 0.0;
          for (int f = 0; f < nf; f++)
            dot += double(entry[f]) * double(uf[size_t(f) * stride_feat]);
          for (int d = 0; d < dims; d++) {
            // d(weight)/d(coord_d) = res * (+-1) * product of the other factors
            double dw = double(info.res);
            for (int e = 0; e < dims; e++) {
              if (e == d) {
                dw *= ((m >> e) & 1) ? 1.0 : -1.0;
              } else {
                dw *= ((m >> e) & 1) ? frac[e] : 1.0 - frac[e];
              }
            }
            cg[d] += dw * dot;
          }
        }
      }
      if (coord_grad)
        for (int d = 0; d < dims; d++) coord_grad[size_t(p) * dims + d] += S(cg[d]);
    }
  }
}

LevelWindow schedule_window(ScheduleNet net, int iteration, int total_iters, int levels) {
  require(iteration >= 1, "schedule_window: iteration must be >= 1");
  require(total_iters >= 3, "schedule_window: need at least one iteration per stage");
  const int b1 = total_iters / 3, b2 = 2 * total_iters / 3;
  const int stage = iteration <= b1 ? 0 : (iteration <= b2 ? 1 : 2);
  static constexpr int kDvf[3][2] = {{1, 6}, {4, 8}, {6, 10}};
  static constexpr int kCanonical[3][2] = {{1, 8}, {6, 10}, {8, 12}};
  const int(*tab)[2] = net == ScheduleNet::Dvf ? kDvf : kCanonical;
  LevelWindow w{tab[stage][0], tab[stage][1]};
  w.hi = std::min(w.hi, levels);
  w.lo = std::min(w.lo, w.hi);
  return w;
}

template struct HashGrid<float>;
template struct HashGrid<double>;
template void hash_encode<float>(const HashGrid<float>&, const float*, int, LevelWindow, float*,
                                 size_t, size_t);
template void hash_encode<double>(const HashGrid<double>&, const double*, int, LevelWindow,
                                  double*, size_t, size_t);
template void hash_encode_backward<float>(HashGrid<float>&, const float*, int, LevelWindow,
                                          const float*, size_t, size_t, float*);
template void hash_encode_backward<double>(HashGrid<double>&, const double*, int, LevelWindow,
                                           const double*, size_t, size_t, double*);

}  // namespace moco
