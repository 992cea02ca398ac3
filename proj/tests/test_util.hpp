#pragma once

#include <complex>
#include <random>
#include <vector>

#include "moco/kspace.hpp"

namespace moco::testing {

inline ComplexImage<double> random_image(int h, int w, uint64_t seed) {
  std::mt19937_64 eng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ComplexImage<double> img(h, w);
  for (auto& z : img.data) z = {u(eng), u(eng)};
  return img;
}

inline std::vector<std::complex<double>> random_samples(size_t n, uint64_t seed) {
  std::mt19937_64 eng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<std::complex<double>> out(n);
  for (auto& z : out) z = {u(eng), u(eng)};
  return out;
}

template <typename C>
double rel_err(const C& got, const C& want) {
  double num = 0, den = 0;
  for (size_t i = 0; i < got.size(); i++) {
    num += std::norm(got[i] - want[i]);
    den += std::norm(want[i]);
  }
  return den > 0 ? std::sqrt(num / den) : std::sqrt(num);
}

template <typename C>
std::complex<double> cdot(const C& a, const C& b) {
  std::complex<double> acc(0, 0);
  for (size_t i = 0; i < a.size(); i++)
    acc += std::conj(std::complex<double>(a[i])) * std::complex<double>(b[i]);
  return acc;
}

template <typename C>
double l2(const C& a) {
  return std::sqrt(std::abs(cdot(a, a)));
}

}  // namespace moco::testing
