#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "lognls/errors.hpp"
#include "lognls/grid.hpp"

using namespace lognls;

namespace {

template <class F>
ComplexField sample(const Grid& g, F f) {
  ComplexField out(g);
  double x[2] = {0, 0};
  for (std::size_t i = 0; i < out.size(); ++i) {
    coordinates_of(g, i, x);
    out[i] = f(x[0], x[1]);
  }
  return out;
}

double max_abs_diff(const ComplexField& a, const ComplexField& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST(Grid, Basics) {
  const auto g = Grid::make(2, 64, 8.0);
  EXPECT_DOUBLE_EQ(g.cell() * g.n, 16.0);
  EXPECT_DOUBLE_EQ(g.kmax(), std::numbers::pi * 64 / 16.0);
  EXPECT_EQ(g.size(), 64u * 64u);
  EXPECT_THROW(Grid::make(3, 64, 1.0), Error);
  EXPECT_THROW(Grid::make(2, 63, 1.0), Error);
  EXPECT_THROW(Grid::make(2, 64, -1.0), Error);
}

TEST(Grid, WavenumbersArePermutationOfSymmetricSet) {
  const auto g = Grid::make(1, 16, 3.0);
  auto k = g.wavenumbers();
  EXPECT_EQ(k[0], 0.0);
  EXPECT_DOUBLE_EQ(k[8], -std::numbers::pi / 3.0 * 8);
  std::sort(k.begin(), k.end());
  for (int m = -8; m < 8; ++m) EXPECT_DOUBLE_EQ(k[m + 8], std::numbers::pi / 3.0 * m);
}

TEST(Transform, ConstantAndSingleMode) {
  const auto g = Grid::make(2, 16, 2.0);
  const auto c = sample(g, [](double, double) { return Complex(2.0, -1.0); });
  const auto spec = transform(c);
  EXPECT_NEAR(std::abs(spec[0] - Complex(2.0, -1.0) * 256.0), 0.0, 1e-12);
  for (std::size_t i = 1; i < spec.size(); ++i) EXPECT_LT(std::abs(spec[i]), 1e-12);

  const auto g1 = Grid::make(1, 32, 4.0);
  const double k1 = std::numbers::pi / 4.0;
  const auto mode = sample(g1, [k1](double x, double) { return std::polar(1.0, k1 * x); });
  const auto s1 = transform(mode);
  for (std::size_t i = 0; i < s1.size(); ++i) {
    if (i == 1) EXPECT_NEAR(std::abs(s1[i]), 32.0, 1e-12);
    else EXPECT_LT(std::abs(s1[i]), 1e-12);
  }
}

TEST(Transform, RandomRoundTrip) {
  std::mt19937_64 rng(12345);
  std::normal_distribution<double> nd;
  for (int dim : {1, 2}) {
    const auto g = Grid::make(dim, 64, 5.0);
    ComplexField f(g);
    for (auto& v : f.values()) v = Complex(nd(rng), nd(rng));
    const auto back = inverse_transform(g, transform(f));
    double num = 0, den = 0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      num += std::norm(back[i] - f[i]);
      den += std::norm(f[i]);
    }
    EXPECT_LT(std::sqrt(num / den), 1e-13);
  }
}

TEST(Transform, SizeMismatch) {
  const auto g = Grid::make(1, 16, 1.0);
  try {
    inverse_transform(g, std::vector<Complex>(8));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SizeMismatch);
  }
  EXPECT_THROW(ComplexField(g, std::vector<Complex>(7)), Error);
}

TEST(Transform, Parseval) {
  const auto g = Grid::make(2, 64, 6.0);
  const auto f = sample(g, [](double x, double y) {
    return Complex(std::exp(-x * x - 0.5 * y * y), x * std::exp(-y * y - x * x));
  });
  const auto spec = transform(f);
  double a = 0, b = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    a += std::norm(f[i]);
    b += std::norm(spec[i]);
  }
  a *= g.cell_volume();
  b *= g.cell_volume() / static_cast<double>(g.size());
  EXPECT_NEAR(a / b, 1.0, 1e-12);
}

TEST(Laplacian, EigenfunctionAndConstant) {
  const auto g = Grid::make(2, 32, 4.0);
  const double k = std::numbers::pi / 4.0;
  const auto mode = sample(g, [k](double x, double) { return std::polar(1.0, k * x); });
  const auto lap = laplacian(mode);
  for (std::size_t i = 0; i < mode.size(); ++i) EXPECT_NEAR(std::abs(lap[i] + k * k * mode[i]), 0.0, 1e-13);
  const auto c = sample(g, [](double, double) { return Complex(3.0, 0.0); });
  const auto lap_c = laplacian(c);
  for (const auto& v : lap_c.values()) EXPECT_LT(std::abs(v), 1e-13);
}

TEST(Laplacian, GaussianClosedForm) {
  const auto g = Grid::make(2, 256, 10.0);
  const auto f = sample(g, [](double x, double y) { return Complex(std::exp(-0.5 * (x * x + y * y)), 0); });
  const auto exact = sample(g, [](double x, double y) {
    const double r2 = x * x + y * y;
    return Complex((r2 - 2.0) * std::exp(-0.5 * r2), 0);
  });
  EXPECT_LT(max_abs_diff(laplacian(f), exact), 1e-10);
}

TEST(Gradient, DivergenceOfGradientIsLaplacian) {
  const auto g = Grid::make(2, 128, 8.0);
  const auto f = sample(g, [](double x, double y) {
    return std::polar(std::exp(-0.6 * x * x - 0.5 * y * y), 0.4 * x - 0.2 * y * y);
  });
  const auto grad = gradient(f);
  const auto dxx = gradient(grad[0])[0];
  const auto dyy = gradient(grad[1])[1];
  const auto lap = laplacian(f);
  double num = 0, den = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    num = std::max(num, std::abs(dxx[i] + dyy[i] - lap[i]));
    den = std::max(den, std::abs(lap[i]));
  }
  EXPECT_LT(num / den, 1e-11);
}

TEST(Gradient, RealEvenFieldGivesRealOddDerivative) {
  const auto g = Grid::make(1, 128, 10.0);
  const auto f = sample(g, [](double x, double) { return Complex(1.0 / std::cosh(x), 0.0); });
  const auto d = gradient(f)[0];
  for (int j = 1; j < g.n; ++j) {
    EXPECT_LT(std::abs(d[j].imag()), 1e-14);
    EXPECT_NEAR(d[j].real(), -d[g.n - j].real(), 1e-13);
  }
}

TEST(Integrate, ConstantsGaussiansOddFunctions) {
  const auto g2 = Grid::make(2, 256, 10.0);
  std::vector<double> ones(g2.size(), 1.0);
  EXPECT_NEAR(integrate(ones, g2), 400.0, 1e-10);
  std::vector<double> gauss(g2.size());
  double x[2];
  for (std::size_t i = 0; i < g2.size(); ++i) {
    coordinates_of(g2, i, x);
    gauss[i] = std::exp(-(x[0] * x[0] + x[1] * x[1]));
  }
  EXPECT_NEAR(integrate(gauss, g2), std::numbers::pi, 1e-12);
  const auto g1 = Grid::make(1, 128, 10.0);
  std::vector<double> odd(g1.size());
  for (int j = 0; j < g1.n; ++j) {
    const double xx = g1.coordinate(j);
    odd[j] = xx * std::exp(-xx * xx);
  }
  EXPECT_NEAR(integrate(odd, g1), 0.0, 1e-15);
}

TEST(Galilean, AtTimeZeroIsCoordinateMultiplication) {
  const auto g = Grid::make(2, 256, 10.0);
  const auto f = sample(g, [](double x, double y) { return Complex(std::exp(-0.5 * (x * x + y * y)), 0); });
  const auto J = galilean_apply(f, 0.0);
  double norm2 = 0.0;
  for (int a = 0; a < 2; ++a)
    for (std::size_t i = 0; i < f.size(); ++i) norm2 += std::norm(J[a][i]);
  EXPECT_NEAR(norm2 * g.cell_volume(), std::numbers::pi, 1e-12);
}

TEST(Galilean, BoostedGaussianShift) {
  // u = e^{ivx}e^{−x²/2}: J(t)u = (x + i t(iv − x))u = ((1 − it)x − tv)u.
  const double L = 10.0 * std::numbers::pi;
  const auto g = Grid::make(1, 512, L);
  const double v = 1.0, t = 0.7;
  const auto f = sample(g, [v](double x, double) { return std::polar(std::exp(-0.5 * x * x), v * x); });
  const auto J = galilean_apply(f, t)[0];
  for (int j = 0; j < g.n; ++j) {
    const double x = g.coordinate(j);
    const Complex expect = (Complex(x, -t * x) - t * v) * f[j];
    EXPECT_LT(std::abs(J[j] - expect), 1e-11);
  }
}
