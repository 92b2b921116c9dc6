#include "lognls/observables.hpp"

#include <cmath>
#include <limits>

#include "lognls/errors.hpp"

namespace lognls {

Observables observables(const ComplexField& field, const ModelParams& model, bool with_sigma_weight) {
  require_finite(field, "observables");
  const Grid& grid = field.grid();
  const double dv = grid.cell_volume();

  Observables obs;
  double mass = 0.0, quartic = 0.0, potential = 0.0, sigma = 0.0;
  double x[2];
  for (std::size_t idx = 0; idx < field.size(); ++idx) {
    const double rho = std::norm(field[idx]);
    mass += rho;
    quartic += rho * rho;
    potential += energy_density(rho, model);
    if (with_sigma_weight) {
      coordinates_of(grid, idx, x);
      double r2 = x[0] * x[0];
      if (grid.dim == 2) r2 += x[1] * x[1];
      sigma += r2 * rho;
    }
  }
  obs.mass = mass * dv;
  obs.quartic = quartic * dv;
  obs.potential = potential * dv;
  if (with_sigma_weight) obs.sigma_weight = std::sqrt(sigma * dv);

  // Kinetic energy and momentum through Parseval: one transform.
  const auto spec = transform(field);
  auto k = grid.wavenumbers();
  const auto k2 = wavenumber_squared(grid);
  k[static_cast<std::size_t>(grid.n / 2)] = 0.0;
  const double parseval = dv / static_cast<double>(grid.size());
  double kin = 0.0, p0 = 0.0, p1 = 0.0;
  for (std::size_t idx = 0; idx < spec.size(); ++idx) {
    const double a2 = std::norm(spec[idx]);
    kin += k2[idx] * a2;
    if (grid.dim == 1) {
      p0 += k[idx] * a2;
    } else {
      p0 += k[idx / grid.n] * a2;
      p1 += k[idx % grid.n] * a2;
    }
  }
  obs.kinetic = 0.5 * kin * parseval;
  obs.momentum = {p0 * parseval, p1 * parseval};
  obs.energy = obs.kinetic + obs.potential;
  if (model.omega) obs.action = obs.energy + *model.omega * obs.mass;
  return obs;
}

double h1_apriori_bound(const Observables& initial, const ModelParams& model) {
  if (model.lambda < 0.0) throw Error(ErrorCode::InvalidArgument, "h1_apriori_bound needs lambda >= 0");
  switch (model.family) {
    case Family::CubicLog2D:
      return initial.energy + 0.5 * model.lambda * constants::sqrt_e() * initial.mass;
    case Family::QuinticLog1D:
      return initial.energy + model.lambda / (6.0 * constants::e_third()) * initial.mass;
    case Family::PureCubic2D:
      return model.lambda == 0.0 ? initial.energy : std::numeric_limits<double>::infinity();
  }
  return std::numeric_limits<double>::infinity();
}

}  // namespace lognls
