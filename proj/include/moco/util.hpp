#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace moco {

// Data/shape validation failures (maps to CLI exit code 2 for config fields).
struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// File format / checksum / version problems.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised by the trainer's divergence guard (CLI exit code 3).
struct DivergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw ValidationError(msg);
}

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Derives independent named substreams from one seed so that adding a new
// consumer does not shift the draws of existing ones.
inline uint64_t derive_seed(uint64_t seed, uint64_t stream) {
  return splitmix64(seed ^ splitmix64(stream + 0x51ed2701ULL));
}

class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(seed) {}

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(eng_);
  }
  double normal(double mean = 0.0, double stddev = 1.0) {
    return std::normal_distribution<double>(mean, stddev)(eng_);
  }
  // Uniform integer in [0, n).
  uint64_t index(uint64_t n) {
    return std::uniform_int_distribution<uint64_t>(0, n - 1)(eng_);
  }
  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
};

inline bool finite(double v) { return std::isfinite(v); }

// Nearest-rank percentile, q in [0,100]. Sorts a copy.
inline double percentile(std::vector<double> vals, double q) {
  if (vals.empty()) return 0.0;
  std::sort(vals.begin(), vals.end());
  size_t rank = size_t(std::ceil(q / 100.0 * vals.size()));
  if (rank == 0) rank = 1;
  if (rank > vals.size()) rank = vals.size();
  return vals[rank - 1];
}

}  // namespace moco
