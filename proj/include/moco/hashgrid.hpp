#pragma once

#include <type_traits>

#include "moco/param.hpp"
#include "moco/util.hpp"

namespace moco {

// 1-based inclusive range of hash levels that are optimized. Levels below lo
// keep their forward contribution but receive no gradient (frozen); levels
// above hi output zero features and receive no gradient.
struct LevelWindow {
  int lo = 1, hi = 1;
};

struct HashGridConfig {
  int dims = 2;
  int n_min = 2;
  double growth = 2.0;
  int levels = 12;
  int feats = 8;
  uint32_t table_size = 1u << 21;  // power of two

  void validate() const;
};

// Cells per axis at 1-based level l: floor(n_min * growth^(l-1)).
int level_resolution(const HashGridConfig& cfg, int level);

// Multiresolution feature table. Each level stores one ParamBlock holding
// min(table_size, (N_l+1)^dims) entries of `feats` floats: a level whose full
// vertex lattice fits in the table is indexed directly, larger levels hash.
template <typename S>
struct HashGrid {
  HashGridConfig cfg;

  struct LevelInfo {
    int res = 0;       // cells per axis
    int verts = 0;     // res + 1
    bool direct = true;
    uint32_t entries = 0;
  };
  std::vector<LevelInfo> levels;
  std::vector<ParamBlock<S>> tables;  // one block per level

  int feature_dim() const { return cfg.levels * cfg.feats; }
  // Allocates tables and fills them from uniform(-1e-4, 1e-4).
  void init(const HashGridConfig& config, uint64_t seed, const std::string& name);
  size_t param_count() const;
};

// Interpolated features for `npoints` coords in [0,1]^dims (row-major,
// coords[p*dims + d]). Output is written level-major: feature (l, f) of point
// p goes to out[p*stride_point + ((l-1)*F + f)*stride_feat].
template <typename S>
void hash_encode(const HashGrid<S>& grid, const S* coords, int npoints, LevelWindow window,
                 S* out, size_t stride_point, size_t stride_feat);

// Reverse pass. Scatter-adds upstream * weight into the touched table grads
// (active levels only; frozen levels keep zero gradient). When coord_grad is
// non-null, d(output)/d(coords) is accumulated into it for every level that
// contributed to the forward output, including frozen ones.
template <typename S>
void hash_encode_backward(HashGrid<S>& grid, const S* coords, int npoints, LevelWindow window,
                          const S* upstream, size_t stride_point, size_t stride_feat,
                          std::type_identity_t<S>* coord_grad);

enum class ScheduleNet { Dvf, Canonical };

// Coarse-to-fine stage windows. The three stages cover thirds of the
// iteration budget, boundaries belonging to the earlier stage; windows are
// clamped to [1, levels] for non-default grid sizes.
LevelWindow schedule_window(ScheduleNet net, int iteration, int total_iters, int levels);

}  // namespace moco
