#include "lognls/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <string>
#include <tuple>

#include "lognls/errors.hpp"

namespace lognls {

Grid Grid::make(int dim, int n, double half_width) {
  if (dim != 1 && dim != 2) throw Error(ErrorCode::InvalidArgument, "grid.dim must be 1 or 2");
  if (n <= 0 || n % 2 != 0) throw Error(ErrorCode::InvalidArgument, "grid.n must be positive and even");
  if (!(half_width > 0.0) || !std::isfinite(half_width)) {
    throw Error(ErrorCode::InvalidArgument, "grid.half_width must be positive");
  }
  return Grid{dim, n, half_width};
}

std::vector<double> Grid::wavenumbers() const {
  std::vector<double> k(static_cast<std::size_t>(n));
  const double base = std::numbers::pi / half_width;
  for (int m = 0; m < n; ++m) {
    const int signed_m = m < n / 2 ? m : m - n;
    k[static_cast<std::size_t>(m)] = base * signed_m;
  }
  return k;
}

double Grid::kmax() const noexcept { return std::numbers::pi * n / (2.0 * half_width); }

ComplexField::ComplexField(const Grid& grid) : grid_(grid), values_(grid.size()) {}

ComplexField::ComplexField(const Grid& grid, std::vector<Complex> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw Error(ErrorCode::SizeMismatch, "field has " + std::to_string(values_.size()) +
                                             " samples, grid needs " + std::to_string(grid_.size()));
  }
}

bool ComplexField::all_finite() const noexcept {
  for (const auto& v : values_) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  }
  return true;
}

void require_finite(const ComplexField& field, const char* where) {
  if (!field.all_finite()) {
    throw Error(ErrorCode::NonFiniteField, std::string(where) + ": field has non-finite samples");
  }
}

namespace {

// FFTW's planner is not re-entrant; plans are created once per shape under a
// lock and then executed concurrently through the new-array interface.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(int dim, int n, int sign) {
    std::lock_guard lock(mutex_);
    const auto key = std::make_tuple(dim, n, sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    const std::size_t total = dim == 1 ? n : static_cast<std::size_t>(n) * n;
    fftw_complex* scratch = fftw_alloc_complex(total);
    int dims[2] = {n, n};
    fftw_plan plan = fftw_plan_dft(dim, dims, scratch, scratch, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(scratch);
    plans_.emplace(key, plan);
    return plan;
  }

  PlanCache(const PlanCache&) = delete;
  PlanCache& operator=(const PlanCache&) = delete;

 private:
  PlanCache() = default;
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  std::mutex mutex_;
  std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

void execute(const Grid& grid, std::span<Complex> data, int sign) {
  if (data.size() != grid.size()) throw Error(ErrorCode::SizeMismatch, "transform size mismatch");
  fftw_plan plan = PlanCache::instance().get(grid.dim, grid.n, sign);
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, ptr, ptr);
}

}  // namespace

void forward_in_place(const Grid& grid, std::span<Complex> data) { execute(grid, data, FFTW_FORWARD); }

void inverse_unscaled_in_place(const Grid& grid, std::span<Complex> data) {
  execute(grid, data, FFTW_BACKWARD);
}

void inverse_in_place(const Grid& grid, std::span<Complex> data) {
  execute(grid, data, FFTW_BACKWARD);
  const double scale = 1.0 / static_cast<double>(grid.size());
  for (auto& v : data) v *= scale;
}

std::vector<Complex> transform(const ComplexField& field) {
  std::vector<Complex> out(field.values().begin(), field.values().end());
  forward_in_place(field.grid(), out);
  return out;
}

ComplexField inverse_transform(const Grid& grid, std::vector<Complex> coeffs) {
  if (coeffs.size() != grid.size()) throw Error(ErrorCode::SizeMismatch, "inverse_transform size mismatch");
  inverse_in_place(grid, coeffs);
  return ComplexField(grid, std::move(coeffs));
}

std::vector<double> wavenumber_squared(const Grid& grid) {
  const auto k = grid.wavenumbers();
  std::vector<double> k2(grid.size());
  if (grid.dim == 1) {
    for (int i = 0; i < grid.n; ++i) k2[i] = k[i] * k[i];
  } else {
    for (int i = 0; i < grid.n; ++i) {
      for (int j = 0; j < grid.n; ++j) {
        k2[static_cast<std::size_t>(i) * grid.n + j] = k[i] * k[i] + k[j] * k[j];
      }
    }
  }
  return k2;
}

ComplexField laplacian(const ComplexField& field) {
  auto spec = transform(field);
  const auto k2 = wavenumber_squared(field.grid());
  for (std::size_t i = 0; i < spec.size(); ++i) spec[i] *= -k2[i];
  return inverse_transform(field.grid(), std::move(spec));
}

std::vector<ComplexField> gradient(const ComplexField& field) {
  const Grid& grid = field.grid();
  const auto spec = transform(field);
  auto k = grid.wavenumbers();
  k[static_cast<std::size_t>(grid.n / 2)] = 0.0;  // Nyquist
  const Complex I(0.0, 1.0);

  std::vector<ComplexField> out;
  for (int axis = 0; axis < grid.dim; ++axis) {
    std::vector<Complex> d(spec.size());
    if (grid.dim == 1) {
      for (int i = 0; i < grid.n; ++i) d[i] = I * k[i] * spec[i];
    } else {
      for (int i = 0; i < grid.n; ++i) {
        for (int j = 0; j < grid.n; ++j) {
          const std::size_t idx = static_cast<std::size_t>(i) * grid.n + j;
          d[idx] = I * (axis == 0 ? k[i] : k[j]) * spec[idx];
        }
      }
    }
    out.push_back(inverse_transform(grid, std::move(d)));
  }
  return out;
}

double integrate(std::span<const double> samples, const Grid& grid) {
  double sum = 0.0;
  for (double s : samples) sum += s;
  return sum * grid.cell_volume();
}

void coordinates_of(const Grid& grid, std::size_t idx, double* out) {
  if (grid.dim == 1) {
    out[0] = grid.coordinate(static_cast<int>(idx));
  } else {
    out[0] = grid.coordinate(static_cast<int>(idx / grid.n));
    out[1] = grid.coordinate(static_cast<int>(idx % grid.n));
  }
}

std::vector<ComplexField> galilean_apply(const ComplexField& field, double t) {
  require_finite(field, "galilean_apply");
  const Grid& grid = field.grid();
  auto grad = gradient(field);
  const Complex it(0.0, t);
  double x[2];
  for (int axis = 0; axis < grid.dim; ++axis) {
    auto& out = grad[axis];
    for (std::size_t idx = 0; idx < field.size(); ++idx) {
      coordinates_of(grid, idx, x);
      out[idx] = x[axis] * field[idx] + it * out[idx];
    }
  }
  return grad;
}

}  // namespace lognls
