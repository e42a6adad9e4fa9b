#include "ddiv/problems.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>
#include <vector>

#include "ddiv/error.hpp"
#include "ddiv/quadrature.hpp"

namespace ddiv {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Eigen::Matrix2d sym(double xx, double xy, double yy) {
  Eigen::Matrix2d m;
  m << xx, xy, xy, yy;
  return m;
}

}  // namespace

ProblemId parse_problem(const std::string& name) {
  if (name == "ex1") return ProblemId::Ex1;
  if (name == "ex2") return ProblemId::Ex2;
  throw ParameterError("unknown problem '" + name + "' (expected ex1 or ex2)");
}

std::string problem_name(ProblemId id) { return id == ProblemId::Ex1 ? "ex1" : "ex2"; }

Poly2 example1_polynomial() {
  const int b = 8;
  const Poly2 a = Poly2::from_terms({{2, 0, 1.0}, {0, 0, -1.0}}, b);
  const Poly2 d = Poly2::from_terms({{2, 0, 1.0}, {1, 1, -2.0}, {0, 2, 1.0}, {0, 0, -1.0}}, b);
  const Poly2 a2 = multiply(a, a, b, b);
  const Poly2 d2 = multiply(d, d, b, b);
  return multiply(a2, d2, b, b);
}

std::array<Eigen::Vector2d, 4> example1_corners() {
  return {Eigen::Vector2d(-1, -2), Eigen::Vector2d(1, 0), Eigen::Vector2d(1, 2), Eigen::Vector2d(-1, 0)};
}

ExactSolution exact_example1() {
  const Poly2 u = example1_polynomial();
  const Poly2 ux = u.dx(), uy = u.dy();
  const Poly2 uxx = ux.dx(), uxy = ux.dy(), uyy = uy.dy();
  const Poly2 uxxx = uxx.dx(), uxxy = uxx.dy(), uxyy = uxy.dy(), uyyy = uyy.dy();
  const Poly2 f = laplacian(laplacian(u));
  ExactSolution e;
  e.id = ProblemId::Ex1;
  e.u = [u](const Eigen::Vector2d& p) { return u(p.x(), p.y()); };
  e.grad_u = [ux, uy](const Eigen::Vector2d& p) { return Eigen::Vector2d(ux(p.x(), p.y()), uy(p.x(), p.y())); };
  e.f = [f](const Eigen::Vector2d& p) { return f(p.x(), p.y()); };
  e.moment.tag = "ex1";
  e.moment.jet = [=](const Eigen::Vector2d& p) {
    const double x = p.x(), y = p.y();
    TensorJet j;
    j.value = sym(uxx(x, y), uxy(x, y), uyy(x, y));
    const double a = uxxx(x, y), b = uxxy(x, y), c = uxyy(x, y), d = uyyy(x, y);
    j.grad = {sym(a, b, c), sym(b, c, d)};
    j.div = Eigen::Vector2d(a + c, b + d);
    j.divdiv = f(x, y);
    return j;
  };
  e.alpha = kNaN;
  e.c = kNaN;
  return e;
}

CornerConstants clamped_corner_constants(double opening) {
  const double w = 0.5 * opening;
  auto det = [w](double a) {
    return (a - 1.0) * std::cos((a + 1.0) * w) * std::sin((a - 1.0) * w) -
           (a + 1.0) * std::sin((a + 1.0) * w) * std::cos((a - 1.0) * w);
  };
  // The determinant vanishes trivially at 0; scan (0, 1) for the first sign change.
  const int n = 1000;
  double lo = kNaN, hi = kNaN;
  for (int i = 1; i < n; ++i) {
    const double a = static_cast<double>(i) / n, b = static_cast<double>(i + 1) / n;
    if (det(a) * det(b) <= 0.0) {
      lo = a;
      hi = b;
      break;
    }
  }
  if (std::isnan(lo)) throw ConfigurationError("clamped corner: no exponent bracketed in (0, 1)");
  double flo = det(lo);
  for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = det(mid);
    if (fm == 0.0) {
      lo = hi = mid;
      break;
    }
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  const double alpha = 0.5 * (lo + hi);
  const double c = -std::cos((alpha + 1.0) * w) / std::cos((alpha - 1.0) * w);
  if (!(alpha > 0.0 && alpha < 1.0) || !std::isfinite(c))
    throw ConfigurationError("clamped corner: root finding failed");
  return {alpha, c};
}

namespace {

struct PolarJet {
  double r, phi;
  Eigen::Vector2d er, ep;
};

PolarJet polar(const Eigen::Vector2d& p) {
  PolarJet j;
  j.r = p.norm();
  j.phi = std::atan2(p.y(), p.x());
  if (j.phi < -0.5 * std::numbers::pi) j.phi += 2.0 * std::numbers::pi;
  j.er = Eigen::Vector2d(std::cos(j.phi), std::sin(j.phi));
  j.ep = Eigen::Vector2d(-std::sin(j.phi), std::cos(j.phi));
  return j;
}

}  // namespace

ExactSolution exact_example2() {
  const CornerConstants cc = clamped_corner_constants(1.5 * std::numbers::pi);
  const double a = cc.alpha, c = cc.c;
  const double q = 0.25 * std::numbers::pi;
  auto g = [a, c](double s) { return std::cos((a + 1) * s) + c * std::cos((a - 1) * s); };
  auto gp = [a, c](double s) { return -(a + 1) * std::sin((a + 1) * s) - c * (a - 1) * std::sin((a - 1) * s); };
  auto gpp = [a, c](double s) {
    return -(a + 1) * (a + 1) * std::cos((a + 1) * s) - c * (a - 1) * (a - 1) * std::cos((a - 1) * s);
  };
  auto hess = [=](const Eigen::Vector2d& p) {
    const PolarJet pj = polar(p);
    const double r = pj.r, s = pj.phi - q;
    const double fr = (1 + a) * std::pow(r, a) * g(s);
    const double frr = (1 + a) * a * std::pow(r, a - 1) * g(s);
    const double fp = std::pow(r, 1 + a) * gp(s);
    const double fpp = std::pow(r, 1 + a) * gpp(s);
    const double frp = (1 + a) * std::pow(r, a) * gp(s);
    const Eigen::Matrix2d rp = pj.er * pj.ep.transpose() + pj.ep * pj.er.transpose();
    return Eigen::Matrix2d(frr * pj.er * pj.er.transpose() + (fr / r + fpp / (r * r)) * pj.ep * pj.ep.transpose() +
                           (frp / r - fp / (r * r)) * rp);
  };
  ExactSolution e;
  e.id = ProblemId::Ex2;
  e.alpha = a;
  e.c = c;
  e.singular = true;
  e.u = [=](const Eigen::Vector2d& p) {
    const PolarJet pj = polar(p);
    return std::pow(pj.r, 1 + a) * g(pj.phi - q);
  };
  e.grad_u = [=](const Eigen::Vector2d& p) {
    const PolarJet pj = polar(p);
    if (pj.r == 0.0) return Eigen::Vector2d(0.0, 0.0);
    const double s = pj.phi - q;
    return Eigen::Vector2d((1 + a) * std::pow(pj.r, a) * g(s) * pj.er + std::pow(pj.r, a) * gp(s) * pj.ep);
  };
  e.f = [](const Eigen::Vector2d&) { return 0.0; };
  e.moment.tag = "ex2";
  e.moment.jet = [=](const Eigen::Vector2d& p) {
    TensorJet j;
    j.value = hess(p);
    // div grad grad u = grad (Laplace u) with Laplace u = 4 a C r^{a-1} cos((a-1) psi).
    const PolarJet pj = polar(p);
    const double s = pj.phi - q, b = a - 1;
    const double amp = 4 * a * c * b * std::pow(pj.r, b - 1);
    j.div = amp * (std::cos(b * s) * pj.er - std::sin(b * s) * pj.ep);
    j.divdiv = 0.0;
    // Gradient by central differences; only used for diagnostics.
    const double hd = 1e-6 * std::max(pj.r, 1e-3);
    j.grad[0] = (hess(p + Eigen::Vector2d(hd, 0)) - hess(p - Eigen::Vector2d(hd, 0))) / (2 * hd);
    j.grad[1] = (hess(p + Eigen::Vector2d(0, hd)) - hess(p - Eigen::Vector2d(0, hd))) / (2 * hd);
    return j;
  };
  return e;
}

ExactSolution exact_solution(ProblemId id) { return id == ProblemId::Ex1 ? exact_example1() : exact_example2(); }

Mesh problem_mesh(ProblemId id, int level) {
  return id == ProblemId::Ex1 ? make_parallelogram_domain(example1_corners(), level) : make_lshape(level);
}

ErrorTuple l2_errors(const DiscreteField& mh, const ScalarFieldP1& uh, const ExactSolution& exact,
                     const ErrorOptions& opts) {
  const Mesh& mesh = mh.mesh();
  double su = 0, sm = 0, sdd = 0, sd = 0;
  struct Box {
    Eigen::Vector2d centre;
    double half;
  };
  std::vector<Box> boxes;
  for (int k = 0; k < mesh.num_cells(); ++k) {
    int corner = -1;
    if (exact.singular)
      for (int j = 0; j < 4; ++j)
        if ((mesh.vertex(mesh.cell(k)[static_cast<std::size_t>(j)]) - exact.singular_point).norm() < 1e-12)
          corner = j;
    boxes.clear();
    if (corner < 0) {
      boxes.push_back({Eigen::Vector2d::Zero(), 1.0});
    } else {
      // Split towards the singular reference corner: three quarter squares per layer.
      const Eigen::Vector2d c = reference_corner(corner);
      double side = 2.0;
      for (int l = 0; l < opts.corner_layers; ++l, side *= 0.5) {
        const Eigen::Vector2d centre = c - 0.5 * side * c;
        for (const Eigen::Vector2d& s : {Eigen::Vector2d(-c.x(), c.y()), Eigen::Vector2d(c.x(), -c.y()), Eigen::Vector2d(-c)})
          boxes.push_back({centre + 0.25 * side * s, 0.25 * side});
      }
    }
    const QuadRule& rule = cached_gauss_rule(corner < 0 ? opts.order : opts.corner_order, 2);
    const ElementMap& map = mh.map(k);
    const double aj = std::abs(map.J);
    for (const Box& box : boxes)
      for (std::size_t g = 0; g < rule.size(); ++g) {
        const Eigen::Vector2d xh = box.centre + box.half * Eigen::Vector2d(rule.points[g][0], rule.points[g][1]);
        const Eigen::Vector2d x = map(xh);
        const double w = rule.weights[g] * aj * box.half * box.half;
        const TensorJet ex = exact.moment.jet(x);
        const TensorJet ap = mh.eval_ref(k, xh);
        const double du = exact.u(x) - uh.eval_ref(k, xh);
        su += w * du * du;
        sm += w * (ex.value - ap.value).squaredNorm();
        sdd += w * (ex.divdiv - ap.divdiv) * (ex.divdiv - ap.divdiv);
        sd += w * (ex.div - ap.div).squaredNorm();
      }
  }
  ErrorTuple e{std::sqrt(su), std::sqrt(sm), std::sqrt(sdd), std::sqrt(sd)};
  if (exact.singular) {
    // div M is not square integrable and div div M vanishes identically.
    e.ddiv = kNaN;
    e.div = kNaN;
  }
  return e;
}

LevelResult solve_level(ProblemId id, int level, const RunOptions& opts, LocalBasisCache& cache, Mesh* mesh_out) {
  const ExactSolution exact = exact_solution(id);
  Mesh mesh = problem_mesh(id, level);
  const DofMap dofs(mesh);
  SaddleSystem sys = assemble(mesh, dofs, MaterialLaw::identity(), cache);
  sys.f_load = load_f(mesh, exact.f, opts.load_order);
  sys.g_load = dirichlet_load(mesh, dofs, {exact.u, exact.grad_u}, opts.boundary_order);
  if (mesh.count_edges(EdgeKind::Neumann) > 0)
    set_constraints(sys, neumann_constraints(mesh, dofs, exact.moment, opts.boundary_order));
  SolveResult sol = solve_problem(sys, opts.solve);

  LevelResult r;
  r.level = level;
  r.cells = mesh.num_cells();
  r.free_dofs = dofs.num_free();
  r.unknowns = sys.size();
  r.h = mesh.h();
  r.info = sol.info;
  r.state = std::move(sol.state);
  const DiscreteField mh = DiscreteField::from_global(mesh, dofs, cache, r.state.m);
  const ScalarFieldP1 uh{r.state.u};
  r.err = l2_errors(mh, uh, exact, opts.errors);
  r.conformity = check_conformity(mh);
  const ScalarFieldP1 dd = discrete_divdiv(mh);
  r.divdiv_norm = p1_l2_distance(mesh, dd, ScalarFieldP1{Vector::Zero(dd.coeffs.size())});
  r.m_norm = std::sqrt(r.state.m.dot(sys.A * r.state.m));
  if (mesh_out) *mesh_out = std::move(mesh);
  return r;
}

ConvergenceReport convergence_study(ProblemId id, int min_level, int max_level, const RunOptions& opts) {
  if (min_level < 0 || max_level < min_level || max_level > 6)
    throw ParameterError("convergence levels must satisfy 0 <= min <= max <= 6");
  ConvergenceReport rep;
  rep.id = id;
  LocalBasisCache cache;
  for (int l = min_level; l <= max_level; ++l) {
    rep.levels.push_back(solve_level(id, l, opts, cache));
    const LevelResult& lr = rep.levels.back();
    ConvergenceRow row;
    row.level = l;
    row.nelem = lr.cells;
    row.h = lr.h;
    row.err_u = lr.err.u;
    row.err_M = lr.err.M;
    row.err_ddiv = lr.err.ddiv;
    row.err_div = lr.err.div;
    if (rep.rows.empty()) {
      row.eoc_u = row.eoc_M = row.eoc_ddiv = row.eoc_div = kNaN;
    } else {
      const ConvergenceRow& p = rep.rows.back();
      row.eoc_u = eoc(p.err_u, row.err_u);
      row.eoc_M = eoc(p.err_M, row.err_M);
      row.eoc_ddiv = eoc(p.err_ddiv, row.err_ddiv);
      row.eoc_div = eoc(p.err_div, row.err_div);
    }
    rep.rows.push_back(row);
  }
  return rep;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_convergence_csv(std::ostream& os, const ConvergenceReport& report) {
  const bool omit = report.id == ProblemId::Ex2;
  os << "level,nelem,h,err_u,eoc_u,err_M,eoc_M,err_ddiv,eoc_ddiv,err_div,eoc_div\n";
  for (const auto& r : report.rows) {
    os << r.level << ',' << r.nelem << ',' << format_double(r.h) << ',' << format_double(r.err_u) << ','
       << format_double(r.eoc_u) << ',' << format_double(r.err_M) << ',' << format_double(r.eoc_M) << ',';
    if (omit)
      os << "omitted,omitted,omitted,omitted\n";
    else
      os << format_double(r.err_ddiv) << ',' << format_double(r.eoc_ddiv) << ',' << format_double(r.err_div) << ','
         << format_double(r.eoc_div) << '\n';
  }
}

void write_solution_csv(std::ostream& os, const DiscreteField& mh, const ScalarFieldP1& uh, int samples) {
  if (samples < 2) throw ParameterError("solution samples per direction must be at least 2");
  os << "cell,x,y,u,mxx,mxy,myy,div_x,div_y,divdiv\n";
  for (int k = 0; k < mh.mesh().num_cells(); ++k)
    for (int j = 0; j < samples; ++j)
      for (int i = 0; i < samples; ++i) {
        const Eigen::Vector2d xh(-1.0 + 2.0 * i / (samples - 1), -1.0 + 2.0 * j / (samples - 1));
        const Eigen::Vector2d x = mh.map(k)(xh);
        const TensorJet t = mh.eval_ref(k, xh);
        os << k << ',' << format_double(x.x()) << ',' << format_double(x.y()) << ','
           << format_double(uh.eval_ref(k, xh)) << ',' << format_double(t.value(0, 0)) << ','
           << format_double(t.value(0, 1)) << ',' << format_double(t.value(1, 1)) << ',' << format_double(t.div.x())
           << ',' << format_double(t.div.y()) << ',' << format_double(t.divdiv) << '\n';
      }
}

}  // namespace ddiv
