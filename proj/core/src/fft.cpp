#include "sdaqt/fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <map>
#include <mutex>

namespace sdaqt::fft {
namespace {

std::mutex g_mutex;

struct RealPlans {
  std::size_t n = 0;
  double* real = nullptr;
  fftw_complex* spec = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;

  explicit RealPlans(std::size_t size) : n(size) {
    real = fftw_alloc_real(n);
    spec = fftw_alloc_complex(n / 2 + 1);
    fwd = fftw_plan_dft_r2c_1d(static_cast<int>(n), real, spec, FFTW_ESTIMATE);
    bwd = fftw_plan_dft_c2r_1d(static_cast<int>(n), spec, real, FFTW_ESTIMATE);
  }
  RealPlans(const RealPlans&) = delete;
  ~RealPlans() {
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
    fftw_free(real);
    fftw_free(spec);
  }
};

struct ComplexPlans {
  std::size_t n = 0;
  fftw_complex* buf = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;

  explicit ComplexPlans(std::size_t size) : n(size) {
    buf = fftw_alloc_complex(n);
    fwd = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, FFTW_FORWARD,
                           FFTW_ESTIMATE);
    bwd = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, FFTW_BACKWARD,
                           FFTW_ESTIMATE);
  }
  ComplexPlans(const ComplexPlans&) = delete;
  ~ComplexPlans() {
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
    fftw_free(buf);
  }
};

RealPlans& real_plans(std::size_t n) {
  static std::map<std::size_t, RealPlans*> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, new RealPlans(n)).first;
  return *it->second;
}

ComplexPlans& complex_plans(std::size_t n) {
  static std::map<std::size_t, ComplexPlans*> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, new ComplexPlans(n)).first;
  return *it->second;
}

std::vector<double> convolve_direct(const std::vector<double>& a,
                                    const std::vector<double>& b) {
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double ai = a[i];
    if (ai == 0.0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += ai * b[j];
  }
  return out;
}

}  // namespace

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

std::vector<double> convolve(const std::vector<double>& a,
                             const std::vector<double>& b) {
  if (a.empty() || b.empty()) return {};
  const std::size_t out_len = a.size() + b.size() - 1;
  if (a.size() * b.size() <= 4096) return convolve_direct(a, b);

  const std::size_t n = next_pow2(out_len);
  std::lock_guard<std::mutex> lock(g_mutex);
  RealPlans& p = real_plans(n);

  std::memset(p.real, 0, n * sizeof(double));
  std::memcpy(p.real, a.data(), a.size() * sizeof(double));
  fftw_execute(p.fwd);
  std::vector<std::complex<double>> sa(n / 2 + 1);
  std::memcpy(sa.data(), p.spec, (n / 2 + 1) * sizeof(fftw_complex));

  std::memset(p.real, 0, n * sizeof(double));
  std::memcpy(p.real, b.data(), b.size() * sizeof(double));
  fftw_execute(p.fwd);

  auto* spec = reinterpret_cast<std::complex<double>*>(p.spec);
  for (std::size_t k = 0; k < n / 2 + 1; ++k) spec[k] *= sa[k];
  fftw_execute(p.bwd);

  std::vector<double> out(out_len);
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < out_len; ++i) out[i] = p.real[i] * scale;
  return out;
}

std::vector<std::complex<double>> real_spectrum(const std::vector<double>& a,
                                                std::size_t n) {
  std::lock_guard<std::mutex> lock(g_mutex);
  RealPlans& p = real_plans(n);
  std::memset(p.real, 0, n * sizeof(double));
  std::memcpy(p.real, a.data(), a.size() * sizeof(double));
  fftw_execute(p.fwd);
  std::vector<std::complex<double>> out(n / 2 + 1);
  std::memcpy(out.data(), p.spec, (n / 2 + 1) * sizeof(fftw_complex));
  return out;
}

std::vector<double> convolve_spectrum(
    const std::vector<std::complex<double>>& ahat, const std::vector<double>& b,
    std::size_t out_len) {
  const std::size_t n = 2 * (ahat.size() - 1);
  std::lock_guard<std::mutex> lock(g_mutex);
  RealPlans& p = real_plans(n);
  std::memset(p.real, 0, n * sizeof(double));
  std::memcpy(p.real, b.data(), b.size() * sizeof(double));
  fftw_execute(p.fwd);
  auto* spec = reinterpret_cast<std::complex<double>*>(p.spec);
  for (std::size_t k = 0; k < n / 2 + 1; ++k) spec[k] *= ahat[k];
  fftw_execute(p.bwd);
  std::vector<double> out(out_len);
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < out_len; ++i) out[i] = p.real[i] * scale;
  return out;
}

std::vector<std::complex<double>> dft_backward(
    std::vector<std::complex<double>> in) {
  const std::size_t n = in.size();
  std::lock_guard<std::mutex> lock(g_mutex);
  ComplexPlans& p = complex_plans(n);
  std::memcpy(p.buf, in.data(), n * sizeof(fftw_complex));
  fftw_execute(p.bwd);
  std::memcpy(in.data(), p.buf, n * sizeof(fftw_complex));
  return in;
}

std::vector<std::complex<double>> dft_forward(
    std::vector<std::complex<double>> in) {
  const std::size_t n = in.size();
  std::lock_guard<std::mutex> lock(g_mutex);
  ComplexPlans& p = complex_plans(n);
  std::memcpy(p.buf, in.data(), n * sizeof(fftw_complex));
  fftw_execute(p.fwd);
  std::memcpy(in.data(), p.buf, n * sizeof(fftw_complex));
  return in;
}

}  // namespace sdaqt::fft
