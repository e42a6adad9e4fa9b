#include "ddiv/interp.hpp"

#include <cmath>
#include <limits>

#include "ddiv/error.hpp"
#include "ddiv/quadrature.hpp"

namespace ddiv {

TensorField plane_wave_field(std::vector<PlaneWave> waves) {
  TensorField f;
  f.tag = "plane-waves";
  f.jet = [waves = std::move(waves)](const Eigen::Vector2d& x) {
    TensorJet j;
    for (const auto& w : waves) {
      const double arg = w.k.dot(x) + w.phase;
      const double s = std::sin(arg), c = std::cos(arg);
      Eigen::Matrix2d a;
      a << w.amp(0), w.amp(1), w.amp(1), w.amp(2);
      j.value += s * a;
      j.grad[0] += c * w.k.x() * a;
      j.grad[1] += c * w.k.y() * a;
      j.div += c * a * w.k;
      j.divdiv -= s * w.k.dot(a * w.k);
    }
    return j;
  };
  return f;
}

TensorField random_plane_wave_field(std::mt19937_64& rng, int terms, double kmax) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * 3.14159265358979323846);
  std::vector<PlaneWave> waves;
  for (int t = 0; t < terms; ++t) {
    PlaneWave w;
    w.amp = Eigen::Vector3d(unit(rng), unit(rng), unit(rng));
    const double r = kmax * 0.5 * (1.0 + unit(rng));
    const double th = angle(rng);
    w.k = Eigen::Vector2d(r * std::cos(th), r * std::sin(th));
    w.phase = angle(rng);
    waves.push_back(w);
  }
  return plane_wave_field(std::move(waves));
}

double ScalarFieldP1::eval_ref(int cell, const Eigen::Vector2d& xhat) const {
  const auto i = static_cast<Eigen::Index>(3 * cell);
  return coeffs(i) + coeffs(i + 1) * xhat.x() + coeffs(i + 2) * xhat.y();
}

ScalarFieldP1 project_p1(const ScalarFunction& f, const Mesh& mesh, int order) {
  const QuadRule& rule = cached_gauss_rule(order, 2);
  ScalarFieldP1 out;
  out.coeffs = Vector::Zero(3 * mesh.num_cells());
  for (int k = 0; k < mesh.num_cells(); ++k) {
    const ElementMap map = element_map(mesh, k);
    Eigen::Vector3d r = Eigen::Vector3d::Zero();
    for (std::size_t g = 0; g < rule.size(); ++g) {
      const Eigen::Vector2d xh(rule.points[g][0], rule.points[g][1]);
      const double v = rule.weights[g] * f(map(xh));
      r += v * Eigen::Vector3d(1.0, xh.x(), xh.y());
    }
    out.coeffs.segment<3>(3 * k) = r.cwiseQuotient(p1_reference_mass());
  }
  return out;
}

Vector interpolate_ddiv(const TensorField& field, const Mesh& mesh, const DofMap& dofs, int edge_order) {
  Vector x = Vector::Zero(dofs.num_free());
  for (int k = 0; k < mesh.num_cells(); ++k) {
    const Dof20 local = local_dofs(element_map(mesh, k), field.jet, edge_order);
    for (int m = 0; m < kLocalDofs; ++m) {
      const auto ent = dofs.local_entries(k, m);
      if (ent.size() != 1) continue;
      x(ent[0].global) = ent[0].coeff * local(m);
    }
  }
  return x;
}

ScalarFieldP1 discrete_divdiv(const DiscreteField& field) {
  const Mesh& mesh = field.mesh();
  ScalarFieldP1 out;
  out.coeffs = Vector::Zero(3 * mesh.num_cells());
  for (int k = 0; k < mesh.num_cells(); ++k) {
    const Poly2 dd = ref_divdiv(field.reference(k));
    if (dd.total_degree() > 1) throw DegreeBoundError("div div of a discrete field left P1");
    const double j = std::abs(field.map(k).J);
    out.coeffs.segment<3>(3 * k) = Eigen::Vector3d(dd.coeff(0, 0), dd.coeff(1, 0), dd.coeff(0, 1)) / j;
  }
  return out;
}

double p1_l2_distance(const Mesh& mesh, const ScalarFieldP1& a, const ScalarFieldP1& b) {
  double s = 0.0;
  for (int k = 0; k < mesh.num_cells(); ++k) {
    const Eigen::Vector3d d = a.coeffs.segment<3>(3 * k) - b.coeffs.segment<3>(3 * k);
    s += std::abs(element_map(mesh, k).J) * d.cwiseProduct(d).dot(p1_reference_mass());
  }
  return std::sqrt(s);
}

double tensor_l2_error(const TensorField& exact, const DiscreteField& approx, int order) {
  const QuadRule& rule = cached_gauss_rule(order, 2);
  double s = 0.0;
  for (int k = 0; k < approx.mesh().num_cells(); ++k) {
    const ElementMap& map = approx.map(k);
    for (std::size_t g = 0; g < rule.size(); ++g) {
      const Eigen::Vector2d xh(rule.points[g][0], rule.points[g][1]);
      const Eigen::Matrix2d d = exact.jet(map(xh)).value - approx.eval_ref(k, xh).value;
      s += rule.weights[g] * std::abs(map.J) * d.squaredNorm();
    }
  }
  return std::sqrt(s);
}

InterpolationCheck check_interpolation(const TensorField& field, const Mesh& mesh, LocalBasisCache& cache,
                                       int edge_order, int volume_order) {
  const DofMap dofs(mesh);
  const Vector x = interpolate_ddiv(field, mesh, dofs, edge_order);
  const DiscreteField pi = DiscreteField::from_global(mesh, dofs, cache, x);
  InterpolationCheck c;
  c.err_M = tensor_l2_error(field, pi, volume_order);
  const ScalarFunction dd = [&field](const Eigen::Vector2d& p) { return field.jet(p).divdiv; };
  const ScalarFieldP1 proj = project_p1(dd, mesh, volume_order);
  c.commuting = p1_l2_distance(mesh, discrete_divdiv(pi), proj);
  const QuadRule& rule = cached_gauss_rule(volume_order, 2);
  double s = 0.0;
  for (int k = 0; k < mesh.num_cells(); ++k) {
    const ElementMap map = element_map(mesh, k);
    for (std::size_t g = 0; g < rule.size(); ++g) {
      const double v = dd(map(Eigen::Vector2d(rule.points[g][0], rule.points[g][1])));
      s += rule.weights[g] * std::abs(map.J) * v * v;
    }
  }
  c.divdiv_norm = std::sqrt(s);
  c.conformity = check_conformity(pi);
  return c;
}

double eoc(double coarse, double fine, double floor) {
  if (!(coarse > floor) || !(fine > floor)) return std::numeric_limits<double>::quiet_NaN();
  return std::log2(coarse / fine);
}

std::vector<InterpolationRow> interpolation_error_study(const TensorField& field, const MeshFactory& meshes,
                                                        int min_level, int max_level) {
  if (min_level < 0 || max_level < min_level) throw ParameterError("interpolation study: bad level range");
  LocalBasisCache cache;
  std::vector<InterpolationRow> rows;
  for (int l = min_level; l <= max_level; ++l) {
    const Mesh mesh = meshes(l);
    const InterpolationCheck c = check_interpolation(field, mesh, cache);
    InterpolationRow r;
    r.level = l;
    r.cells = mesh.num_cells();
    r.h = mesh.h();
    r.err_M = c.err_M;
    r.commuting = c.commuting;
    r.eoc = rows.empty() ? std::numeric_limits<double>::quiet_NaN() : eoc(rows.back().err_M, r.err_M);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace ddiv
