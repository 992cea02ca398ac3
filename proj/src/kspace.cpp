#include "moco/kspace.hpp"

#include <fftw3.h>
#include <omp.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>

namespace moco {

std::vector<int> CartesianMask::kept_lines(int t) const {
  std::vector<int> out;
  for (int ky = 0; ky < lines; ky++)
    if (is_kept(t, ky)) out.push_back(ky);
  return out;
}

std::vector<uint8_t> CartesianMask::column(int t) const {
  return std::vector<uint8_t>(kept.begin() + size_t(t) * lines,
                              kept.begin() + size_t(t + 1) * lines);
}

int Sampling::samples_per_frame(int t) const {
  if (kind == SamplingKind::Cartesian) return int(mask.kept_lines(t).size());
  return traj.frames[t].samples();
}

template <typename S>
void check_finite_image(const ComplexImage<S>& img, const char* what) {
  for (const auto& z : img.data)
    if (!std::isfinite(double(z.real())) || !std::isfinite(double(z.imag())))
      throw ValidationError(std::string(what) + ": non-finite value");
}
template void check_finite_image<float>(const ComplexImage<float>&, const char*);
template void check_finite_image<double>(const ComplexImage<double>&, const char*);

// ---- centered FFT ------------------------------------------------------

namespace {

// One cached FFTW plan pair per (h, w). Plans are created against a
// per-thread buffer; execution on the owning thread only.
struct FftPlan {
  fftw_plan fwd = nullptr, bwd = nullptr;
  fftw_complex* buf = nullptr;
  int h = 0, w = 0;
  ~FftPlan() {
    if (fwd) fftw_destroy_plan(fwd);
    if (bwd) fftw_destroy_plan(bwd);
    if (buf) fftw_free(buf);
  }
};

std::mutex plan_mutex;  // fftw plan creation is not thread-safe

FftPlan& plan_for(int h, int w) {
  thread_local std::map<std::pair<int, int>, std::unique_ptr<FftPlan>> cache;
  auto& slot = cache[{h, w}];
  if (!slot) {
    auto p = std::make_unique<FftPlan>();
    p->h = h;
    p->w = w;
    p->buf = fftw_alloc_complex(size_t(h) * w);
    std::lock_guard<std::mutex> lock(plan_mutex);
    p->fwd = fftw_plan_dft_2d(h, w, p->buf, p->buf, FFTW_FORWARD, FFTW_ESTIMATE);
    p->bwd = fftw_plan_dft_2d(h, w, p->buf, p->buf, FFTW_BACKWARD, FFTW_ESTIMATE);
    slot = std::move(p);
  }
  return *slot;
}

// fft2c = fftshift . FFT . ifftshift, scaled by 1/sqrt(HW). The shifts are
// folded into the copy in/out of the fftw buffer.
template <typename S>
ComplexImage<S> fft2c_impl(const ComplexImage<S>& img, bool inverse) {
  require(img.h >= 4 && img.w >= 4, "fft2c: image must be at least 4x4");
  check_finite_image(img, "fft2c input");
  const int h = img.h, w = img.w;
  FftPlan& p = plan_for(h, w);
  const int sh = h / 2, sw = w / 2;             // ifftshift offset
  const int uh = h - sh, uw = w - sw;           // fftshift offset
  for (int i = 0; i < h; i++) {
    int si = (i + sh) % h;
    for (int j = 0; j < w; j++) {
      int sj = (j + sw) % w;
      const auto& z = img.at(si, sj);
      p.buf[size_t(i) * w + j][0] = double(z.real());
      p.buf[size_t(i) * w + j][1] = double(z.imag());
    }
  }
  fftw_execute(inverse ? p.bwd : p.fwd);
  ComplexImage<S> out(h, w);
  const double scale = 1.0 / std::sqrt(double(h) * double(w));
  for (int i = 0; i < h; i++) {
    int ui = (i + uh) % h;
    for (int j = 0; j < w; j++) {
      int uj = (j + uw) % w;
      out.at(ui, uj) = std::complex<S>(S(p.buf[size_t(i) * w + j][0] * scale),
                                       S(p.buf[size_t(i) * w + j][1] * scale));
    }
  }
  return out;
}

}  // namespace

template <typename S>
ComplexImage<S> fft2c(const ComplexImage<S>& img) {
  return fft2c_impl(img, false);
}
template <typename S>
ComplexImage<S> ifft2c(const ComplexImage<S>& img) {
  return fft2c_impl(img, true);
}

// ---- Cartesian forward / adjoint ---------------------------------------

template <typename S>
std::vector<std::complex<S>> apply_forward_cartesian(const ComplexImage<S>& x,
                                                     const CoilSet<S>& coils,
                                                     const std::vector<uint8_t>& mask_col) {
  require(coils.h == x.h && coils.w == x.w, "forward: coil/image shape mismatch");
  require(int(mask_col.size()) == x.h, "forward: mask length != H");
  int kept = 0;
  for (auto m : mask_col) kept += m ? 1 : 0;
  require(kept >= 1, "forward: mask keeps no lines");

  std::vector<std::complex<S>> out(size_t(coils.count) * kept * x.w);
  for (int c = 0; c < coils.count; c++) {
    ComplexImage<S> sx(x.h, x.w);
    const std::complex<S>* sc = coils.coil(c);
    for (size_t i = 0; i < sx.size(); i++) sx.data[i] = sc[i] * x.data[i];
    ComplexImage<S> k = fft2c(sx);
    int row = 0;
    for (int ky = 0; ky < x.h; ky++) {
      if (!mask_col[ky]) continue;
      std::copy(k.data.begin() + size_t(ky) * x.w, k.data.begin() + size_t(ky + 1) * x.w,
                out.begin() + (size_t(c) * kept + row) * x.w);
      row++;
    }
  }
  return out;
}

template <typename S>
ComplexImage<S> apply_adjoint_cartesian(const std::vector<std::complex<S>>& y,
                                        const CoilSet<S>& coils,
                                        const std::vector<uint8_t>& mask_col) {
  const int h = coils.h, w = coils.w;
  require(int(mask_col.size()) == h, "adjoint: mask length != H");
  int kept = 0;
  for (auto m : mask_col) kept += m ? 1 : 0;
  require(kept >= 1, "adjoint: mask keeps no lines");
  require(y.size() == size_t(coils.count) * kept * w, "adjoint: sample count mismatch");

  ComplexImage<S> out(h, w);
  for (int c = 0; c < coils.count; c++) {
    ComplexImage<S> k(h, w);
    int row = 0;
    for (int ky = 0; ky < h; ky++) {
      if (!mask_col[ky]) continue;
      std::copy(y.begin() + (size_t(c) * kept + row) * w,
                y.begin() + (size_t(c) * kept + row + 1) * w, k.data.begin() + size_t(ky) * w);
      row++;
    }
    ComplexImage<S> img = ifft2c(k);
    const std::complex<S>* sc = coils.coil(c);
    for (size_t i = 0; i < out.size(); i++) out.data[i] += std::conj(sc[i]) * img.data[i];
  }
  return out;
}

// ---- Kaiser-Bessel gridding NUFFT ---------------------------------------

namespace {

constexpr double kOversample = 2.0;
constexpr int kKernelWidth = 4;

double kb_beta() {
  // Beatty et al. choice for width W and oversampling sigma.
  const double wk = kKernelWidth, sig = kOversample;
  double t = (wk / sig) * (sig - 0.5);
  return M_PI * std::sqrt(t * t - 0.8);
}

double bessel_i0(double x) {
  // Series is fine for the argument range of the kernel (|x| <= beta ~ 9).
  double sum = 1.0, term = 1.0;
  for (int k = 1; k < 64; k++) {
    term *= (x * x) / (4.0 * k * k);
    sum += term;
    if (term < 1e-18 * sum) break;
  }
  return sum;
}

// Kernel in oversampled-grid units, support |u| <= W/2.
double kb_kernel(double u, double beta) {
  double t = 2.0 * u / kKernelWidth;
  double s = 1.0 - t * t;
  if (s <= 0.0) return 0.0;
  return bessel_i0(beta * std::sqrt(s)) / bessel_i0(beta);
}

// Continuous Fourier transform of the kernel at frequency nu (cycles per
// oversampled-grid sample); used for deapodization.
double kb_kernel_ft(double nu, double beta) {
  const double wk = kKernelWidth;
  double a = M_PI * wk * nu;
  double d = beta * beta - a * a;
  double num;
  if (d > 0) {
    double r = std::sqrt(d);
    num = std::sinh(r) / r;
  } else if (d < 0) {
    double r = std::sqrt(-d);
    num = std::sin(r) / r;
  } else {
    num = 1.0;
  }
  return wk * num / bessel_i0(beta);
}

// Response of the integer-sampled truncated kernel at frequency n/G.
double kb_response_ongrid(int n, int grid, double beta) {
  double acc = 0.0;
  for (int u = -kKernelWidth / 2; u <= kKernelWidth / 2; u++)
    acc += kb_kernel(double(u), beta) * std::cos(2.0 * M_PI * u * n / double(grid));
  return acc;
}

struct Deapod {
  int h, w;
  std::vector<double> row, col;  // separable 1/c(n) factors
};

const Deapod& deapod_for(int h, int w) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::unique_ptr<Deapod>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{h, w}];
  if (!slot) {
    auto d = std::make_unique<Deapod>();
    d->h = h;
    d->w = w;
    const double beta = kb_beta();
    const int gh = int(kOversample * h), gw = int(kOversample * w);
    d->row.resize(h);
    d->col.resize(w);
    // Average of the on-grid discrete response and the continuous kernel FT
    // (the mean response over fractional offsets); splits the ripple error
    // between grid-aligned and generic sample positions.
    auto c = [&](int n, int grid) {
      return 0.5 * kb_response_ongrid(n, grid, beta) +
             0.5 * kb_kernel_ft(double(n) / grid, beta);
    };
    for (int i = 0; i < h; i++) d->row[i] = 1.0 / c(i - h / 2, gh);
    for (int j = 0; j < w; j++) d->col[j] = 1.0 / c(j - w / 2, gw);
    slot = std::move(d);
  }
  return *slot;
}

void validate_traj(const RadialFrame& traj) {
  for (const auto& k : traj.k)
    require(k[0] >= -0.5 && k[0] < 0.5 && k[1] >= -0.5 && k[1] < 0.5,
            "nufft: trajectory coordinate outside [-0.5, 0.5)");
}

// Unnormalized centered DFT of the deapodized, zero-padded image. Grid is
// gh x gw with DC at (gh/2, gw/2).
template <typename S>
std::vector<std::complex<double>> oversampled_spectrum(const ComplexImage<S>& x) {
  const int h = x.h, w = x.w;
  const int gh = int(kOversample * h), gw = int(kOversample * w);
  const Deapod& d = deapod_for(h, w);
  ComplexImage<double> pad(gh, gw);
  for (int i = 0; i < h; i++)
    for (int j = 0; j < w; j++) {
      std::complex<double> v(double(x.at(i, j).real()), double(x.at(i, j).imag()));
      pad.at(i + (gh - h) / 2, j + (gw - w) / 2) = v * (d.row[i] * d.col[j]);
    }
  ComplexImage<double> spec = fft2c(pad);
  // undo the orthonormal scaling: gridding works with the plain DFT
  const double s = std::sqrt(double(gh) * double(gw));
  std::vector<std::complex<double>> out(spec.data.size());
  for (size_t i = 0; i < out.size(); i++) out[i] = spec.data[i] * s;
  return out;
}

}  // namespace

template <typename S>
std::vector<std::complex<S>> nufft_forward(const ComplexImage<S>& x, const RadialFrame& traj) {
  require(x.h >= 4 && x.w >= 4, "nufft: image must be at least 4x4");
  validate_traj(traj);
  const int h = x.h, w = x.w;
  const int gh = int(kOversample * h), gw = int(kOversample * w);
  const double beta = kb_beta();
  std::vector<std::complex<double>> spec = oversampled_spectrum(x);

  const int ns = traj.samples();
  std::vector<std::complex<S>> out(ns);
#pragma omp parallel for schedule(static)
  for (int s = 0; s < ns; s++) {
    // sample position on the oversampled grid, DC at (gh/2, gw/2)
    const double gy = traj.k[s][1] * gh + gh / 2;
    const double gx = traj.k[s][0] * gw + gw / 2;
    const int iy0 = int(std::ceil(gy - kKernelWidth / 2.0));
    const int ix0 = int(std::ceil(gx - kKernelWidth / 2.0));
    std::complex<double> acc(0, 0);
    for (int iy = iy0; iy < iy0 + kKernelWidth; iy++) {
      const double wy = kb_kernel(iy - gy, beta);
      const int yy = ((iy % gh) + gh) % gh;  // periodic wrap
      for (int ix = ix0; ix < ix0 + kKernelWidth; ix++) {
        const double wx = kb_kernel(ix - gx, beta);
        const int xx = ((ix % gw) + gw) % gw;
        acc += (wy * wx) * spec[size_t(yy) * gw + xx];
      }
    }
    out[s] = std::complex<S>(S(acc.real()), S(acc.imag()));
  }
  return out;
}

template <typename S>
ComplexImage<S> nufft_adjoint(const std::vector<std::complex<S>>& samples,
                              const RadialFrame& traj, bool use_dcf, int h, int w) {
  require(int(samples.size()) == traj.samples(), "nufft_adjoint: sample count mismatch");
  validate_traj(traj);
  if (use_dcf)
    require(traj.dcf.size() == traj.k.size(), "nufft_adjoint: missing density weights");
  const int gh = int(kOversample * h), gw = int(kOversample * w);
  const double beta = kb_beta();

  // spread (transpose of the gather above); serial keeps it deterministic
  ComplexImage<double> spec(gh, gw);
  for (int s = 0; s < traj.samples(); s++) {
    std::complex<double> v(double(samples[s].real()), double(samples[s].imag()));
    if (use_dcf) v *= traj.dcf[s];
    const double gy = traj.k[s][1] * gh + gh / 2;
    const double gx = traj.k[s][0] * gw + gw / 2;
    const int iy0 = int(std::ceil(gy - kKernelWidth / 2.0));
    const int ix0 = int(std::ceil(gx - kKernelWidth / 2.0));
    for (int iy = iy0; iy < iy0 + kKernelWidth; iy++) {
      const double wy = kb_kernel(iy - gy, beta);
      const int yy = ((iy % gh) + gh) % gh;
      for (int ix = ix0; ix < ix0 + kKernelWidth; ix++) {
        const double wx = kb_kernel(ix - gx, beta);
        const int xx = ((ix % gw) + gw) % gw;
        spec.at(yy, xx) += (wy * wx) * v;
      }
    }
  }
  // transpose of (unnormalized centered DFT) = sqrt(G) * ifft2c
  ComplexImage<double> img = ifft2c(spec);
  const double s = std::sqrt(double(gh) * double(gw));
  const Deapod& d = deapod_for(h, w);
  ComplexImage<S> out(h, w);
  for (int i = 0; i < h; i++)
    for (int j = 0; j < w; j++) {
      std::complex<double> v = img.at(i + (gh - h) / 2, j + (gw - w) / 2) * s;
      v *= d.row[i] * d.col[j];
      out.at(i, j) = std::complex<S>(S(v.real()), S(v.imag()));
    }
  return out;
}

// ---- multi-frame forward -------------------------------------------------

template <typename S>
std::vector<std::complex<S>> apply_forward_multi(const DynamicImage<S>& x,
                                                 const CoilSet<S>& coils,
                                                 const Sampling& sampling,
                                                 double noise_sigma, Rng& rng) {
  require(sampling.frames() == x.t, "apply_forward_multi: frame count mismatch");
  require(noise_sigma >= 0.0, "apply_forward_multi: negative noise sigma");
  std::vector<std::complex<S>> out;
  for (int t = 0; t < x.t; t++) {
    ComplexImage<S> xi = x.frame_image(t);
    std::vector<std::complex<S>> yt;
    if (sampling.kind == SamplingKind::Cartesian) {
      yt = apply_forward_cartesian(xi, coils, sampling.mask.column(t));
    } else {
      yt.reserve(size_t(coils.count) * sampling.traj.frames[t].samples());
      for (int c = 0; c < coils.count; c++) {
        ComplexImage<S> sx(xi.h, xi.w);
        const std::complex<S>* sc = coils.coil(c);
        for (size_t i = 0; i < sx.size(); i++) sx.data[i] = sc[i] * xi.data[i];
        auto ys = nufft_forward(sx, sampling.traj.frames[t]);
        yt.insert(yt.end(), ys.begin(), ys.end());
      }
    }
    out.insert(out.end(), yt.begin(), yt.end());
  }
  if (noise_sigma > 0.0) {
    const double s = noise_sigma / std::sqrt(2.0);
    for (auto& z : out)
      z += std::complex<S>(S(rng.normal(0.0, s)), S(rng.normal(0.0, s)));
  }
  return out;
}

#define MOCO_INSTANTIATE(S)                                                                       \
  template ComplexImage<S> fft2c<S>(const ComplexImage<S>&);                                      \
  template ComplexImage<S> ifft2c<S>(const ComplexImage<S>&);                                     \
  template std::vector<std::complex<S>> apply_forward_cartesian<S>(                               \
      const ComplexImage<S>&, const CoilSet<S>&, const std::vector<uint8_t>&);                    \
  template ComplexImage<S> apply_adjoint_cartesian<S>(const std::vector<std::complex<S>>&,        \
                                                      const CoilSet<S>&,                          \
                                                      const std::vector<uint8_t>&);               \
  template std::vector<std::complex<S>> nufft_forward<S>(const ComplexImage<S>&,                  \
                                                         const RadialFrame&);                     \
  template ComplexImage<S> nufft_adjoint<S>(const std::vector<std::complex<S>>&,                  \
                                            const RadialFrame&, bool, int, int);                  \
  template std::vector<std::complex<S>> apply_forward_multi<S>(                                   \
      const DynamicImage<S>&, const CoilSet<S>&, const Sampling&, double, Rng&);

MOCO_INSTANTIATE(float)
MOCO_INSTANTIATE(double)
#undef MOCO_INSTANTIATE

}  // namespace moco
