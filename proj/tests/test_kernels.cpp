#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "uavswarm/kernels.hpp"
#include "uavswarm/mlp.hpp"

namespace k = uavswarm::kernels;

namespace {

std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

std::vector<k::Isa> simd_isas() {
  std::vector<k::Isa> out;
  for (auto isa : {k::Isa::kAvx2, k::Isa::kNeon}) {
    if (k::isa_available(isa)) out.push_back(isa);
  }
  return out;
}

class RestoreIsa : public ::testing::Test {
 protected:
  void SetUp() override { saved_ = k::active().isa; }
  void TearDown() override { k::force_isa(saved_); }
  k::Isa saved_ = k::Isa::kScalar;
};

}  // namespace

TEST(Kernels, ScalarAlwaysAvailable) {
  EXPECT_TRUE(k::isa_available(k::Isa::kScalar));
  EXPECT_EQ(k::table_for(k::Isa::kScalar).isa, k::Isa::kScalar);
}

TEST(Kernels, ElementwiseKernelsMatchScalarBitwise) {
  std::mt19937_64 rng(11);
  for (auto isa : simd_isas()) {
    const auto& t = k::table_for(isa);
    for (std::size_t n = 0; n < 70; ++n) {
      for (std::size_t offset : {0u, 1u, 3u}) {
        const auto x = random_vector(n + offset, rng);
        const auto y0 = random_vector(n + offset, rng);
        auto ys = y0, yv = y0;
        k::scalar::axpy(0.37, x.data() + offset, ys.data() + offset, n);
        t.axpy(0.37, x.data() + offset, yv.data() + offset, n);
        EXPECT_EQ(ys, yv) << k::isa_name(isa) << " axpy n=" << n;
        ys = y0, yv = y0;
        k::scalar::add(x.data() + offset, ys.data() + offset, n);
        t.add(x.data() + offset, yv.data() + offset, n);
        EXPECT_EQ(ys, yv) << k::isa_name(isa) << " add n=" << n;
        ys = y0, yv = y0;
        k::scalar::scale(-1.25, ys.data() + offset, n);
        t.scale(-1.25, yv.data() + offset, n);
        EXPECT_EQ(ys, yv) << k::isa_name(isa) << " scale n=" << n;
      }
    }
  }
}

TEST(Kernels, DotMatchesScalarToRounding) {
  std::mt19937_64 rng(12);
  for (auto isa : simd_isas()) {
    const auto& t = k::table_for(isa);
    for (std::size_t n = 0; n < 300; n += 7) {
      const auto a = random_vector(n, rng);
      const auto b = random_vector(n, rng);
      double abs_sum = 0.0;
      for (std::size_t i = 0; i < n; ++i) abs_sum += std::fabs(a[i] * b[i]);
      const double s = k::scalar::dot(a.data(), b.data(), n);
      const double v = t.dot(a.data(), b.data(), n);
      EXPECT_LE(std::fabs(s - v), 1e-14 * (abs_sum + 1.0)) << k::isa_name(isa) << " n=" << n;
    }
  }
}

TEST(Kernels, ScalarDotExactOnIntegers) {
  std::vector<double> a{1, 2, 3, 4, 5}, b{5, 4, 3, 2, 1};
  EXPECT_EQ(k::scalar::dot(a.data(), b.data(), a.size()), 35.0);
  EXPECT_EQ(k::scalar::dot(a.data(), b.data(), 0), 0.0);
}

TEST_F(RestoreIsa, MlpForwardAgreesAcrossIsas) {
  std::mt19937_64 rng(5);
  uavswarm::Mlp net({40, 16, 16, 7});
  net.init_random(rng);
  const auto input = random_vector(40, rng);
  k::force_isa(k::Isa::kScalar);
  const auto ref = net.forward(input);
  for (auto isa : simd_isas()) {
    k::force_isa(isa);
    const auto out = net.forward(input);
    ASSERT_EQ(out.size(), ref.size());
    for (std::size_t i = 0; i < out.size(); ++i) EXPECT_NEAR(out[i], ref[i], 1e-12);
  }
}

TEST(Kernels, ForcingUnavailableIsaThrows) {
  for (auto isa : {k::Isa::kAvx2, k::Isa::kNeon}) {
    if (!k::isa_available(isa)) EXPECT_THROW(k::force_isa(isa), std::exception);
  }
}
