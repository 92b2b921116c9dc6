#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace lognls {

using Complex = std::complex<double>;

/// Uniform periodic grid on [−L, L)^dim with N points per axis.
struct Grid {
  int dim = 2;
  int n = 256;
  double half_width = 20.0;

  /// Validating constructor: dim ∈ {1,2}, N positive and even, L > 0.
  static Grid make(int dim, int n, double half_width);

  double cell() const noexcept { return 2.0 * half_width / n; }
  double cell_volume() const noexcept { return dim == 1 ? cell() : cell() * cell(); }
  std::size_t size() const noexcept {
    return dim == 1 ? static_cast<std::size_t>(n) : static_cast<std::size_t>(n) * n;
  }
  double coordinate(int j) const noexcept { return -half_width + j * cell(); }
  /// Wavenumbers (π/L)·m in DFT storage order m = 0, …, N/2−1, −N/2, …, −1.
  std::vector<double> wavenumbers() const;
  /// Largest |k| per axis, πN/(2L).
  double kmax() const noexcept;

  bool operator==(const Grid&) const = default;
};

/// Complex samples on a grid, row-major with axis 0 slowest.
class ComplexField {
 public:
  explicit ComplexField(const Grid& grid);
  ComplexField(const Grid& grid, std::vector<Complex> values);

  const Grid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }

  std::span<Complex> values() noexcept { return values_; }
  std::span<const Complex> values() const noexcept { return values_; }
  std::vector<Complex>& storage() noexcept { return values_; }

  Complex& operator[](std::size_t i) noexcept { return values_[i]; }
  const Complex& operator[](std::size_t i) const noexcept { return values_[i]; }

  bool all_finite() const noexcept;

 private:
  Grid grid_;
  std::vector<Complex> values_;
};

/// Throws NonFiniteField if any sample is NaN or infinite.
void require_finite(const ComplexField& field, const char* where);

/// Unnormalized forward DFT over all axes.
std::vector<Complex> transform(const ComplexField& field);
/// Inverse DFT including the 1/N factor per axis.
ComplexField inverse_transform(const Grid& grid, std::vector<Complex> coeffs);

/// In-place transforms on raw storage laid out for `grid`.
void forward_in_place(const Grid& grid, std::span<Complex> data);
void inverse_in_place(const Grid& grid, std::span<Complex> data);
/// Backward transform without the 1/N^dim factor.
void inverse_unscaled_in_place(const Grid& grid, std::span<Complex> data);

/// |k|² in storage order (length grid.size()).
std::vector<double> wavenumber_squared(const Grid& grid);

ComplexField laplacian(const ComplexField& field);
/// Spectral gradient; the Nyquist coefficient is zeroed.
std::vector<ComplexField> gradient(const ComplexField& field);

/// Periodic rectangle rule: Σ f · dx^dim.
double integrate(std::span<const double> samples, const Grid& grid);

/// J(t)u = x·u + i t ∇u, one field per axis.
std::vector<ComplexField> galilean_apply(const ComplexField& field, double t);

/// Coordinates of flat index `idx`; axis 0 first.
void coordinates_of(const Grid& grid, std::size_t idx, double* out);

}  // namespace lognls
