#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <set>
#include <string>

#include "ddiv/assembly.hpp"
#include "ddiv/problems.hpp"
#include "ddiv/quadrature.hpp"
#include "ddiv/refelement.hpp"

using namespace ddiv;

namespace {

int failures = 0;

void report(int id, const char* name, bool ok, const std::string& detail) {
  std::printf("[%s] %2d %-28s %s\n", ok ? "PASS" : "FAIL", id, name, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a) {
  char b[128];
  std::snprintf(b, sizeof b, f, a);
  return b;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool guarded(int id, const char* name, const std::function<void()>& body) {
  try {
    body();
    return true;
  } catch (const std::exception& e) {
    report(id, name, false, std::string("exception: ") + e.what());
    return false;
  }
}

double divdiv_l2(const TensorField& f, const Mesh& m) {
  const QuadRule& r = cached_gauss_rule(6, 2);
  double s = 0.0;
  for (int k = 0; k < m.num_cells(); ++k) {
    const ElementMap map = element_map(m, k);
    for (std::size_t q = 0; q < r.size(); ++q) {
      const double v = f.jet(map(Eigen::Vector2d(r.points[q][0], r.points[q][1]))).divdiv;
      s += r.weights[q] * std::abs(map.J) * v * v;
    }
  }
  return std::sqrt(s);
}

double max_conformity = 0.0;

void criterion1() {
  guarded(1, "reference unisolvency", [] {
    const auto t0 = std::chrono::steady_clock::now();
    const auto basis = build_reference_basis();
    const UnisolvencyReport rep = verify_unisolvency(basis);
    // Second evaluation of every functional by quadrature through the identity map.
    ElementMap id;
    id.B = Eigen::Matrix2d::Identity();
    id.a = Eigen::Vector2d::Zero();
    id.J = 1.0;
    double quad_dev = 0.0;
    for (int i = 0; i < kLocalDofs; ++i) {
      const Dof20 d = local_dofs(id, basis[static_cast<std::size_t>(i)], 8);
      for (int r = 0; r < kLocalDofs; ++r)
        quad_dev = std::max(quad_dev, std::abs(d(r) / dof_normalization(r) - (r == i ? 1.0 : 0.0)));
    }
    const double t = seconds_since(t0);
    const bool ok = rep.max_deviation <= 1e-12 && quad_dev <= 1e-12 && t < 1.0;
    report(1, "reference unisolvency", ok,
           fmt("max|D-I| = %.3e", rep.max_deviation) + fmt(", quadrature %.3e", quad_dev) + fmt(", %.3f s", t));
  });
}

void criterion2() {
  guarded(2, "div div images", [] {
    const auto& basis = reference_basis();
    auto coeff_err = [](const Poly2& p, double c00, double c10, double c01) {
      double e = 0.0;
      for (int i = 0; i <= p.bound_x(); ++i)
        for (int j = 0; j <= p.bound_y(); ++j) {
          double want = 0.0;
          if (i == 0 && j == 0) want = c00;
          if (i == 1 && j == 0) want = c10;
          if (i == 0 && j == 1) want = c01;
          e = std::max(e, std::abs(p.coeff(i, j) - want));
        }
      return e;
    };
    const double e1 = coeff_err(ref_divdiv(basis[0]), 0.0, 0.0, 1.5);
    const double e4 = coeff_err(ref_divdiv(basis[3]), 0.0, 1.5, 0.0);
    const double e9 = coeff_err(ref_divdiv(basis[8]), 0.5, 0.0, -1.5);
    double beyond = 0.0;
    for (const auto& phi : basis) {
      const Poly2 d = ref_divdiv(phi);
      for (int i = 0; i <= d.bound_x(); ++i)
        for (int j = 0; j <= d.bound_y(); ++j)
          if (i + j > 1) beyond = std::max(beyond, std::abs(d.coeff(i, j)));
    }
    const double worst = std::max({e1, e4, e9});
    report(2, "div div images", worst <= 1e-14 && beyond <= 1e-14,
           fmt("coefficient error %.3e", worst) + fmt(", non-P1 part %.3e", beyond));
  });
}

void criterion3() {
  guarded(3, "dimension formula", [] {
    int meshes = 0, bad = 0;
    for (int level = 0; level <= 3; ++level)
      for (ProblemId id : {ProblemId::Ex1, ProblemId::Ex2}) {
        const Mesh m = problem_mesh(id, level);
        std::set<int> boundary;
        for (const auto& e : m.edges())
          if (e.cells[1] < 0) boundary.insert({e.v[0], e.v[1]});
        const int n0 = m.num_vertices() - static_cast<int>(boundary.size());
        const DofMap d(m);
        ++meshes;
        if (d.num_free() != 4 * m.num_edges() + 4 * m.num_cells() - n0) ++bad;
      }
    report(3, "dimension formula", meshes >= 6 && bad == 0,
           std::to_string(meshes) + " meshes, " + std::to_string(bad) + " mismatches");
  });
}

void criterion4() {
  guarded(4, "commuting diagram", [] {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(20240601);
    LocalBasisCache cache;
    double worst = 0.0;
    int runs = 0;
    for (const Mesh& m : {problem_mesh(ProblemId::Ex1, 3), make_lshape(2)}) {
      const DofMap d(m);
      for (int trial = 0; trial < 5; ++trial) {
        const TensorField f = random_plane_wave_field(rng);
        const Vector x = interpolate_ddiv(f, m, d);
        const DiscreteField pi = DiscreteField::from_global(m, d, cache, x);
        const ScalarFieldP1 proj = project_p1([&](const Eigen::Vector2d& p) { return f.jet(p).divdiv; }, m);
        const double dist = p1_l2_distance(m, discrete_divdiv(pi), proj);
        worst = std::max(worst, dist / (1.0 + divdiv_l2(f, m)));
        max_conformity = std::max(max_conformity, check_conformity(pi).max_violation());
        ++runs;
      }
    }
    const double t = seconds_since(t0);
    report(4, "commuting diagram", worst <= 1e-9 && t < 10.0,
           std::to_string(runs) + " fields" + fmt(", max relative %.3e", worst) + fmt(", %.2f s", t));
  });
}

void criterion5() {
  guarded(5, "P1 reproduction", [] {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    LocalBasisCache cache;
    double worst = 0.0;
    for (const Mesh& m : {problem_mesh(ProblemId::Ex1, 2), make_lshape(2)}) {
      const DofMap d(m);
      for (int trial = 0; trial < 3; ++trial) {
        Eigen::Matrix<double, 3, 3> c;
        for (int i = 0; i < 9; ++i) c(i) = u(rng);
        auto value = [c](const Eigen::Vector2d& p) {
          const Eigen::Vector3d e = c * Eigen::Vector3d(1.0, p.x(), p.y());
          Eigen::Matrix2d v;
          v << e(0), e(1), e(1), e(2);
          return v;
        };
        TensorField f;
        f.jet = [=](const Eigen::Vector2d& p) {
          TensorJet j;
          j.value = value(p);
          j.grad[0] << c(0, 1), c(1, 1), c(1, 1), c(2, 1);
          j.grad[1] << c(0, 2), c(1, 2), c(1, 2), c(2, 2);
          j.div = Eigen::Vector2d(j.grad[0](0, 0) + j.grad[1](0, 1), j.grad[0](1, 0) + j.grad[1](1, 1));
          return j;
        };
        const DiscreteField pi = DiscreteField::from_global(m, d, cache, interpolate_ddiv(f, m, d));
        const QuadRule& r = cached_gauss_rule(3, 2);
        for (int k = 0; k < m.num_cells(); ++k)
          for (std::size_t q = 0; q < r.size(); ++q) {
            const Eigen::Vector2d xh(r.points[q][0], r.points[q][1]);
            worst = std::max(worst, (pi.eval_ref(k, xh).value - value(pi.map(k)(xh))).cwiseAbs().maxCoeff());
          }
        max_conformity = std::max(max_conformity, check_conformity(pi).max_violation());
      }
    }
    report(5, "P1 reproduction", worst <= 1e-11, fmt("max pointwise error %.3e", worst));
  });
}

struct Studies {
  ConvergenceReport ex1, ex2;
  double seconds1 = 0.0, seconds2 = 0.0;
  bool ok = false;
};

Studies run_studies() {
  Studies s;
  try {
    auto t0 = std::chrono::steady_clock::now();
    s.ex1 = convergence_study(ProblemId::Ex1, 1, 5);
    s.seconds1 = seconds_since(t0);
    t0 = std::chrono::steady_clock::now();
    s.ex2 = convergence_study(ProblemId::Ex2, 1, 5);
    s.seconds2 = seconds_since(t0);
    s.ok = true;
  } catch (const std::exception& e) {
    std::printf("convergence studies failed: %s\n", e.what());
  }
  return s;
}

void criterion6(const Studies& s) {
  double sol = std::numeric_limits<double>::infinity();
  if (s.ok) {
    sol = 0.0;
    for (const auto* rep : {&s.ex1, &s.ex2})
      for (const LevelResult& l : rep->levels) sol = std::max(sol, l.conformity.max_violation());
  }
  report(6, "conformity", max_conformity <= 1e-9 && sol <= 1e-9,
         fmt("interpolants %.3e", max_conformity) + fmt(", solutions %.3e", sol));
}

bool in(double v, double lo, double hi) { return v >= lo && v <= hi; }

void criterion7(const Studies& s) {
  if (!s.ok) return report(7, "example 1 rates", false, "study failed");
  const ConvergenceRow& r = s.ex1.rows.back();
  const bool ok = in(r.eoc_u, 1.8, 2.2) && in(r.eoc_M, 1.8, 2.2) && in(r.eoc_ddiv, 1.8, 2.2) &&
                  in(r.eoc_div, 0.8, 1.2) && s.seconds1 <= 300.0;
  report(7, "example 1 rates", ok,
         fmt("eoc u %.3f", r.eoc_u) + fmt(", M %.3f", r.eoc_M) + fmt(", ddiv %.3f", r.eoc_ddiv) +
             fmt(", div %.3f", r.eoc_div) + fmt(", %.1f s", s.seconds1));
}

void criterion8(const Studies& s) {
  if (!s.ok) return report(8, "example 2 rates", false, "study failed");
  const ConvergenceRow& r = s.ex2.rows.back();
  double dd = 0.0;
  for (const LevelResult& l : s.ex2.levels) dd = std::max(dd, l.divdiv_norm / (1.0 + l.m_norm));
  const bool ok = in(r.eoc_M, 0.45, 0.65) && in(r.eoc_u, 0.95, 1.25) && dd <= 1e-8;
  report(8, "example 2 rates", ok,
         fmt("eoc M %.3f", r.eoc_M) + fmt(", u %.3f", r.eoc_u) + fmt(", max |divdiv M_h|/(1+|M_h|) %.3e", dd) +
             fmt(", %.1f s", s.seconds2));
}

void criterion9() {
  guarded(9, "singular constants", [] {
    const ExactSolution e = exact_example2();
    const bool ok = std::abs(e.alpha - 0.54448) < 5e-6 && std::abs(e.c - 1.8414) < 5e-5;
    report(9, "singular constants", ok, fmt("alpha %.7f", e.alpha) + fmt(", C %.6f", e.c));
  });
}

void criterion10() {
  guarded(10, "sparse vs dense", [] {
    const Mesh m = problem_mesh(ProblemId::Ex1, 0);
    const DofMap d(m);
    LocalBasisCache cache;
    SaddleSystem sys = assemble(m, d, MaterialLaw::identity(), cache);
    sys.f_load = load_f(m, exact_example1().f);
    SolveOptions opts;
    opts.strategy = SolverStrategy::Sparse;
    const Vector sparse = solve_saddle(sys.matrix(), sys.rhs(), opts);
    const DenseMatrix dense_matrix(sys.matrix());
    const Vector dense = dense_matrix.fullPivLu().solve(sys.rhs());
    const double diff = (sparse - dense).cwiseAbs().maxCoeff() / (1.0 + dense.cwiseAbs().maxCoeff());
    report(10, "sparse vs dense", diff <= 1e-10,
           std::to_string(sys.size()) + " unknowns" + fmt(", max relative difference %.3e", diff));
  });
}

}  // namespace

int main() {
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  const Studies s = run_studies();
  criterion6(s);
  criterion7(s);
  criterion8(s);
  criterion9();
  criterion10();
  std::printf("%s: %d failing criteria\n", failures == 0 ? "PASS" : "FAIL", failures);
  return failures == 0 ? 0 : 1;
}
