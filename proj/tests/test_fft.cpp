#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "sdaqt/fft.hpp"

namespace {

std::vector<double> direct_convolve(const std::vector<double>& a,
                                    const std::vector<double>& b) {
  if (a.empty() || b.empty()) return {};
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

}  // namespace

TEST_SUITE("fft") {
  TEST_CASE("convolve matches the direct algorithm at transform sizes") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    // lengths straddle the internal direct/transform crossover
    for (size_t la : {1u, 3u, 30u, 257u, 1024u}) {
      for (size_t lb : {1u, 5u, 64u, 511u}) {
        std::vector<double> a(la), b(lb);
        for (auto& x : a) x = dist(rng);
        for (auto& x : b) x = dist(rng);
        auto got = sdaqt::fft::convolve(a, b);
        auto want = direct_convolve(a, b);
        REQUIRE(got.size() == want.size());
        double scale = 0;
        for (double w : want) scale = std::max(scale, std::abs(w));
        for (size_t i = 0; i < want.size(); ++i)
          CHECK(std::abs(got[i] - want[i]) <= 1e-13 * (1.0 + scale));
      }
    }
  }

  TEST_CASE("convolution of deltas shifts") {
    std::vector<double> a(40, 0.0), b(70, 0.0);
    a[13] = 2.0;
    b[29] = -3.0;
    auto c = sdaqt::fft::convolve(a, b);
    for (size_t i = 0; i < c.size(); ++i)
      CHECK(c[i] == doctest::Approx(i == 42 ? -6.0 : 0.0).epsilon(1e-14));
  }

  TEST_CASE("forward transform undoes backward up to the length factor") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (size_t n : {4u, 16u, 256u}) {
      std::vector<std::complex<double>> in(n);
      for (auto& z : in) z = {dist(rng), dist(rng)};
      auto round = sdaqt::fft::dft_forward(sdaqt::fft::dft_backward(in));
      for (size_t j = 0; j < n; ++j)
        CHECK(std::abs(round[j] / double(n) - in[j]) <= 1e-13);
    }
  }

  TEST_CASE("backward transform evaluates at roots of unity") {
    // coefficients c_k, values sum_k c_k w^{jk}
    std::vector<std::complex<double>> c = {{1, 0}, {2, 0}, {0, 0.5}, {-3, 0}};
    auto v = sdaqt::fft::dft_backward(c);
    const double pi = 3.14159265358979323846;
    for (size_t j = 0; j < c.size(); ++j) {
      std::complex<double> w = std::polar(1.0, 2.0 * pi * double(j) / double(c.size()));
      std::complex<double> want = 0;
      std::complex<double> p = 1;
      for (auto& ck : c) {
        want += ck * p;
        p *= w;
      }
      CHECK(std::abs(v[j] - want) <= 1e-13);
    }
  }

  TEST_CASE("next_pow2") {
    CHECK(sdaqt::fft::next_pow2(1) == 1);
    CHECK(sdaqt::fft::next_pow2(2) == 2);
    CHECK(sdaqt::fft::next_pow2(3) == 4);
    CHECK(sdaqt::fft::next_pow2(1025) == 2048);
  }
}
