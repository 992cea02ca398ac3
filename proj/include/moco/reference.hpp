#pragma once

#include "moco/kspace.hpp"

namespace moco::ref {

// Serial brute-force implementations used as independent oracles by the test
// suites, cmd_verify, and the benchmark target. Kept deliberately naive.

// O(N^2) centered orthonormal DFT.
template <typename S>
ComplexImage<S> dft2c_direct(const ComplexImage<S>& img, bool inverse);

// Direct non-uniform DFT: Y(k) = sum_n x(n) exp(-2*pi*i k.n).
template <typename S>
std::vector<std::complex<S>> ndft_direct(const ComplexImage<S>& x, const RadialFrame& traj);

// Exact adjoint of ndft_direct (conjugate-transpose sum).
template <typename S>
ComplexImage<S> ndft_adjoint_direct(const std::vector<std::complex<S>>& samples,
                                    const RadialFrame& traj, int h, int w);

// Naive nested-loop convolution, stride 1, zero padding, odd kernel size.
// x: [Cin, H, W], w: [Cout, Cin, k, k], b: [Cout], y: [Cout, H, W].
template <typename S>
void conv2d_naive(const S* x, const S* w, const S* b, S* y,
                  int cin, int cout, int h, int wid, int k);

}  // namespace moco::ref
