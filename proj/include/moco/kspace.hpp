#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <vector>

#include "moco/util.hpp"

namespace moco {

// Complex image on a regular H x W grid. Row-major, pixel (i, j) = data[i*w + j].
template <typename S>
struct ComplexImage {
  int h = 0, w = 0;
  std::vector<std::complex<S>> data;

  ComplexImage() = default;
  ComplexImage(int h_, int w_) : h(h_), w(w_), data(size_t(h_) * w_) {}

  std::complex<S>& at(int i, int j) { return data[size_t(i) * w + j]; }
  const std::complex<S>& at(int i, int j) const { return data[size_t(i) * w + j]; }
  size_t size() const { return data.size(); }
};

// Frame sequence stored contiguously, frame-major.
template <typename S>
struct DynamicImage {
  int t = 0, h = 0, w = 0;
  std::vector<std::complex<S>> data;

  DynamicImage() = default;
  DynamicImage(int t_, int h_, int w_) : t(t_), h(h_), w(w_), data(size_t(t_) * h_ * w_) {}

  std::complex<S>* frame(int ti) { return data.data() + size_t(ti) * h * w; }
  const std::complex<S>* frame(int ti) const { return data.data() + size_t(ti) * h * w; }
  ComplexImage<S> frame_image(int ti) const {
    ComplexImage<S> img(h, w);
    std::copy(frame(ti), frame(ti) + size_t(h) * w, img.data.begin());
    return img;
  }
};

// Normalized coil sensitivities: sum_c |S_c(p)|^2 = 1 at every pixel.
template <typename S>
struct CoilSet {
  int count = 0, h = 0, w = 0;
  std::vector<std::complex<S>> maps;  // [C][H][W]

  CoilSet() = default;
  CoilSet(int c, int h_, int w_) : count(c), h(h_), w(w_), maps(size_t(c) * h_ * w_) {}
  std::complex<S>* coil(int c) { return maps.data() + size_t(c) * h * w; }
  const std::complex<S>* coil(int c) const { return maps.data() + size_t(c) * h * w; }
};

// ky-t undersampling pattern; kept[t*lines + ky] != 0 means line acquired.
struct CartesianMask {
  int lines = 0, frames = 0;
  std::vector<uint8_t> kept;

  CartesianMask() = default;
  CartesianMask(int h, int t) : lines(h), frames(t), kept(size_t(h) * t, 0) {}
  bool is_kept(int t, int ky) const { return kept[size_t(t) * lines + ky] != 0; }
  void set(int t, int ky, bool v) { kept[size_t(t) * lines + ky] = v ? 1 : 0; }
  std::vector<int> kept_lines(int t) const;
  // Kept flags for one frame, indexable by ky.
  std::vector<uint8_t> column(int t) const;
};

// One frame of a radial acquisition. Sample j of spoke s lives at
// k[s*readout + j], coordinates in cycles/FOV within [-0.5, 0.5).
struct RadialFrame {
  int readout = 0;
  std::vector<double> angles;             // radians, one per spoke
  std::vector<std::array<double, 2>> k;   // (kx, ky) per sample
  std::vector<double> dcf;                // density compensation per sample
  int spokes() const { return int(angles.size()); }
  int samples() const { return int(k.size()); }
};

struct RadialTrajectory {
  int readout = 0;
  int spokes_per_frame = 0;
  double base_angle = 0.0;
  std::vector<RadialFrame> frames;
};

// ---- Fourier operators ------------------------------------------------

// Centered orthonormal 2D DFT (DC at H/2, W/2); ifft2c is its exact inverse.
template <typename S>
ComplexImage<S> fft2c(const ComplexImage<S>& img);
template <typename S>
ComplexImage<S> ifft2c(const ComplexImage<S>& img);

// M . F . S_c for one frame. Output ordering: coil-major, kept ky ascending,
// kx ascending. mask_col is the kept flag per ky line.
template <typename S>
std::vector<std::complex<S>> apply_forward_cartesian(const ComplexImage<S>& x,
                                                     const CoilSet<S>& coils,
                                                     const std::vector<uint8_t>& mask_col);

// Exact adjoint: sum_c conj(S_c) . ifft2c(M^T y).
template <typename S>
ComplexImage<S> apply_adjoint_cartesian(const std::vector<std::complex<S>>& y,
                                        const CoilSet<S>& coils,
                                        const std::vector<uint8_t>& mask_col);

// Non-uniform DFT  Y(k) = sum_n x(n) exp(-2*pi*i k.n)  (n = centered integer
// pixel index), approximated by Kaiser-Bessel gridding with oversampling 2.0
// and kernel width 4.
template <typename S>
std::vector<std::complex<S>> nufft_forward(const ComplexImage<S>& x, const RadialFrame& traj);

// Exact transpose of nufft_forward. When use_dcf is set, samples are
// pre-weighted by traj.dcf (gridding reconstruction).
template <typename S>
ComplexImage<S> nufft_adjoint(const std::vector<std::complex<S>>& samples,
                              const RadialFrame& traj, bool use_dcf, int h, int w);

// ---- Multi-frame acquisition ------------------------------------------

enum class SamplingKind { Cartesian, Radial };

struct Sampling {
  SamplingKind kind = SamplingKind::Cartesian;
  CartesianMask mask;
  RadialTrajectory traj;
  int frames() const {
    return kind == SamplingKind::Cartesian ? mask.frames : int(traj.frames.size());
  }
  // Acquired samples per frame per coil.
  int samples_per_frame(int t) const;
};

// Measurements for the full sequence, frame-major then coil-major. Complex
// Gaussian noise with std sigma (E|n|^2 = sigma^2) is added per sample.
template <typename S>
std::vector<std::complex<S>> apply_forward_multi(const DynamicImage<S>& x,
                                                 const CoilSet<S>& coils,
                                                 const Sampling& sampling,
                                                 double noise_sigma, Rng& rng);

template <typename S>
void check_finite_image(const ComplexImage<S>& img, const char* what);

}  // namespace moco
