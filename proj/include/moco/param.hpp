#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace moco {

// One learnable parameter group (a hash-table level or a decoder layer)
// together with its gradient and Adam state. Hash tables track which entries
// have ever received a gradient: entries that were never touched provably
// have zero Adam updates (m = v = g = 0), so the optimizer only visits the
// active list. Dense blocks update everything each step.
template <typename S>
struct ParamBlock {
  std::string name;
  bool is_table = false;  // selects the table learning rate
  bool dense = true;
  int entry_floats = 1;
  int64_t adam_steps = 0;

  std::vector<S> value, grad, m, v;
  std::vector<uint8_t> entry_active;
  std::vector<uint32_t> active_entries;

  void resize(size_t n_floats, int entry_floats_, bool dense_) {
    entry_floats = entry_floats_;
    dense = dense_;
    value.assign(n_floats, S(0));
    grad.assign(n_floats, S(0));
    m.assign(n_floats, S(0));
    v.assign(n_floats, S(0));
    if (!dense) entry_active.assign(n_floats / entry_floats, 0);
  }

  size_t entries() const { return value.size() / size_t(entry_floats); }

  void touch(uint32_t entry) {
    if (!dense && !entry_active[entry]) {
      entry_active[entry] = 1;
      active_entries.push_back(entry);
    }
  }

  bool grads_finite() const {
    if (dense) {
      for (S g : grad)
        if (!std::isfinite(double(g))) return false;
      return true;
    }
    for (uint32_t e : active_entries)
      for (int f = 0; f < entry_floats; f++)
        if (!std::isfinite(double(grad[size_t(e) * entry_floats + f]))) return false;
    return true;
  }

  void zero_grad() {
    if (dense) {
      std::fill(grad.begin(), grad.end(), S(0));
    } else {
      for (uint32_t e : active_entries)
        for (int f = 0; f < entry_floats; f++) grad[size_t(e) * entry_floats + f] = S(0);
    }
  }
};

}  // namespace moco
