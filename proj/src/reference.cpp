#include "moco/reference.hpp"

#include <cmath>

namespace moco::ref {

template <typename S>
ComplexImage<S> dft2c_direct(const ComplexImage<S>& img, bool inverse) {
  const int h = img.h, w = img.w;
  const double sign = inverse ? 1.0 : -1.0;
  const double scale = 1.0 / std::sqrt(double(h) * double(w));
  ComplexImage<S> out(h, w);
  for (int mi = 0; mi < h; mi++) {
    for (int mj = 0; mj < w; mj++) {
      const double fy = double(mi - h / 2) / h;
      const double fx = double(mj - w / 2) / w;
      std::complex<double> acc(0, 0);
      for (int i = 0; i < h; i++) {
        for (int j = 0; j < w; j++) {
          const double phase = sign * 2.0 * M_PI * (fy * (i - h / 2) + fx * (j - w / 2));
          std::complex<double> z(double(img.at(i, j).real()), double(img.at(i, j).imag()));
          acc += z * std::complex<double>(std::cos(phase), std::sin(phase));
        }
      }
      out.at(mi, mj) = std::complex<S>(S(acc.real() * scale), S(acc.imag() * scale));
    }
  }
  return out;
}

template <typename S>
std::vector<std::complex<S>> ndft_direct(const ComplexImage<S>& x, const RadialFrame& traj) {
  const int h = x.h, w = x.w;
  std::vector<std::complex<S>> out(traj.samples());
  for (int s = 0; s < traj.samples(); s++) {
    const double kx = traj.k[s][0], ky = traj.k[s][1];
    std::complex<double> acc(0, 0);
    for (int i = 0; i < h; i++) {
      for (int j = 0; j < w; j++) {
        const double phase = -2.0 * M_PI * (ky * (i - h / 2) + kx * (j - w / 2));
        std::complex<double> z(double(x.at(i, j).real()), double(x.at(i, j).imag()));
        acc += z * std::complex<double>(std::cos(phase), std::sin(phase));
      }
    }
    out[s] = std::complex<S>(S(acc.real()), S(acc.imag()));
  }
  return out;
}

template <typename S>
ComplexImage<S> ndft_adjoint_direct(const std::vector<std::complex<S>>& samples,
                                    const RadialFrame& traj, int h, int w) {
  ComplexImage<S> out(h, w);
  for (int i = 0; i < h; i++) {
    for (int j = 0; j < w; j++) {
      std::complex<double> acc(0, 0);
      for (int s = 0; s < traj.samples(); s++) {
        const double kx = traj.k[s][0], ky = traj.k[s][1];
        const double phase = 2.0 * M_PI * (ky * (i - h / 2) + kx * (j - w / 2));
        std::complex<double> z(double(samples[s].real()), double(samples[s].imag()));
        acc += z * std::complex<double>(std::cos(phase), std::sin(phase));
      }
      out.at(i, j) = std::complex<S>(S(acc.real()), S(acc.imag()));
    }
  }
  return out;
}

template <typename S>
void conv2d_naive(const S* x, const S* w, const S* b, S* y,
                  int cin, int cout, int h, int wid, int k) {
  const int r = k / 2;
  for (int o = 0; o < cout; o++) {
    for (int i = 0; i < h; i++) {
      for (int j = 0; j < wid; j++) {
        double acc = b ? double(b[o]) : 0.0;
        for (int c = 0; c < cin; c++) {
          for (int dy = -r; dy <= r; dy++) {
            for (int dx = -r; dx <= r; dx++) {
              const int ii = i + dy, jj = j + dx;
              if (ii < 0 || ii >= h || jj < 0 || jj >= wid) continue;
              acc += double(x[(size_t(c) * h + ii) * wid + jj]) *
                     double(w[((size_t(o) * cin + c) * k + (dy + r)) * k + (dx + r)]);
            }
          }
        }
        y[(size_t(o) * h + i) * wid + j] = S(acc);
      }
    }
  }
}

#define MOCO_INSTANTIATE(S)                                                                  \
  template ComplexImage<S> dft2c_direct<S>(const ComplexImage<S>&, bool);                    \
  template std::vector<std::complex<S>> ndft_direct<S>(const ComplexImage<S>&,               \
                                                       const RadialFrame&);                  \
  template ComplexImage<S> ndft_adjoint_direct<S>(const std::vector<std::complex<S>>&,       \
                                                  const RadialFrame&, int, int);             \
  template void conv2d_naive<S>(const S*, const S*, const S*, S*, int, int, int, int, int);

MOCO_INSTANTIATE(float)
MOCO_INSTANTIATE(double)
#undef MOCO_INSTANTIATE

}  // namespace moco::ref
