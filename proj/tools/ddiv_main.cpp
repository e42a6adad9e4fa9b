#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <string>

#include "ddiv/assembly.hpp"
#include "ddiv/error.hpp"
#include "ddiv/interp.hpp"
#include "ddiv/mesh.hpp"
#include "ddiv/piola.hpp"
#include "ddiv/problems.hpp"
#include "ddiv/refelement.hpp"
#include "ddiv/space.hpp"

using namespace ddiv;
using nlohmann::json;

namespace {

struct Tolerances {
  double unisolvency = 1e-12;
  double duality = 1e-10;
  double commuting = 1e-9;
  double conformity = 1e-9;
  double divdiv_zero = 1e-8;
  double second_lo = 1.8, second_hi = 2.2;
  double first_lo = 0.8, first_hi = 1.2;
  double ex2_m_lo = 0.45, ex2_m_hi = 0.65;
  double ex2_u_lo = 0.95, ex2_u_hi = 1.25;
};

void add_tolerances(CLI::App* app, Tolerances& t) {
  app->add_option("--tol-unisolvency", t.unisolvency, "max deviation of the normalized dof matrix");
  app->add_option("--tol-duality", t.duality, "max deviation of physical dofs of the dual basis");
  app->add_option("--tol-commuting", t.commuting, "relative commuting-diagram residual");
  app->add_option("--tol-conformity", t.conformity, "interface and patch-jump violation");
  app->add_option("--tol-divdiv", t.divdiv_zero, "relative size of div div M_h for ex2");
  app->add_option("--eoc2-min", t.second_lo);
  app->add_option("--eoc2-max", t.second_hi);
  app->add_option("--eoc1-min", t.first_lo);
  app->add_option("--eoc1-max", t.first_hi);
  app->add_option("--ex2-m-min", t.ex2_m_lo);
  app->add_option("--ex2-m-max", t.ex2_m_hi);
  app->add_option("--ex2-u-min", t.ex2_u_lo);
  app->add_option("--ex2-u-max", t.ex2_u_hi);
}

bool in_band(double v, double lo, double hi) { return std::isfinite(v) && v >= lo && v <= hi; }

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw ConfigurationError("cannot open '" + path + "' for writing");
  return os;
}

void write_json(const std::string& path, const json& j) {
  auto os = open_out(path);
  os << j.dump(2) << '\n';
}

SolverStrategy parse_solver(const std::string& s) {
  if (s == "auto") return SolverStrategy::Auto;
  if (s == "sparse") return SolverStrategy::Sparse;
  if (s == "dense") return SolverStrategy::Dense;
  throw ParameterError("unknown solver '" + s + "'");
}

int cmd_verify(int fault_phi, const Tolerances& tol) {
  bool ok = true;
  auto basis = build_reference_basis();
  if (fault_phi > 0) {
    if (fault_phi > kLocalDofs) throw ParameterError("--fault-phi must be in 1..20");
    basis[static_cast<std::size_t>(fault_phi - 1)].xx += Poly2::constant(1e-3);
  }

  const UnisolvencyReport u = verify_unisolvency(basis, tol.unisolvency);
  std::printf("unisolvency: max deviation %s over 20 dofs x 20 basis tensors: %s\n",
              format_double(u.max_deviation).c_str(), u.passed ? "pass" : "FAIL");
  for (const auto& [dof, phi] : u.offending)
    std::printf("  dof %d on Phi%d: %s\n", dof + 1, phi + 1, format_double(u.normalized(dof, phi)).c_str());
  ok = ok && u.passed;

  int p1_fail = 0, space_fail = 0;
  for (int i = 0; i < kLocalDofs; ++i) {
    const auto& phi = basis[static_cast<std::size_t>(i)];
    if (ref_divdiv(phi).total_degree() > 1) {
      std::printf("  div div Phi%d is not linear\n", i + 1);
      ++p1_fail;
    }
    if (!in_x0_space(phi)) {
      std::printf("  Phi%d leaves the shape-function space\n", i + 1);
      ++space_fail;
    }
  }
  std::printf("div div images in P1: %s\n", p1_fail == 0 ? "pass" : "FAIL");
  std::printf("shape-function space membership: %s\n", space_fail == 0 ? "pass" : "FAIL");
  ok = ok && p1_fail == 0 && space_fail == 0;

  const ElementMap id;
  const LocalBasis lb = local_basis_matrix(id);
  double dev = 0.0;
  for (int m = 0; m < kLocalDofs; ++m)
    for (int i = 0; i < kLocalDofs; ++i)
      dev = std::max(dev, std::abs(lb.T(m, i) - (m == i ? dof_normalization(m) : 0.0)));
  const bool t_ok = dev <= tol.unisolvency;
  std::printf("identity map reproduces the reference dof matrix: %s (%s)\n", t_ok ? "pass" : "FAIL",
              format_double(dev).c_str());
  ok = ok && t_ok;

  const Mesh sheared = make_parallelogram_domain(example1_corners(), 0);
  const ElementMap sm = element_map(sheared, 0);
  const LocalBasis sb = local_basis_matrix(sm);
  double dual = 0.0;
  for (int j = 0; j < kLocalDofs; ++j) {
    Dof20 e = Dof20::Zero();
    e(j) = 1.0;
    const Dof20 d = local_dofs(sm, reference_tensor(sb, e));
    dual = std::max(dual, (d - e).cwiseAbs().maxCoeff());
  }
  const bool dual_ok = dual <= tol.duality;
  std::printf("dual basis on a sheared cell: %s (%s, condition %s)\n", dual_ok ? "pass" : "FAIL",
              format_double(dual).c_str(), format_double(sb.condition).c_str());
  ok = ok && dual_ok;

  const Dof20 rect = local_dofs(element_map({Eigen::Vector2d(0, 0), Eigen::Vector2d(2, 0), Eigen::Vector2d(2, 1),
                                             Eigen::Vector2d(0, 1)}),
                                basis[0]);
  const Dof20 shear = local_dofs(sm, basis[0]);
  const bool jumps_ok = rect.tail<4>().cwiseAbs().maxCoeff() <= 1e-14 && shear.tail<4>().cwiseAbs().maxCoeff() > 1e-3;
  std::printf("Phi1 corner jumps vanish on rectangles and not on the sheared cell: %s\n", jumps_ok ? "pass" : "FAIL");
  ok = ok && jumps_ok;

  std::printf("%s\n", ok ? "verify: pass" : "verify: FAIL");
  return ok ? 0 : 1;
}

int cmd_interp_test(int levels, const std::string& domain, unsigned seed, const Tolerances& tol) {
  std::mt19937_64 rng(seed);
  const TensorField field = random_plane_wave_field(rng);
  MeshFactory factory;
  if (domain == "ex1")
    factory = [](int l) { return make_parallelogram_domain(example1_corners(), l); };
  else if (domain == "lshape")
    factory = [](int l) { return make_lshape(l); };
  else
    throw ParameterError("unknown domain '" + domain + "'");
  LocalBasisCache cache;
  bool ok = true;
  double last_eoc = NAN, prev_err = NAN;
  std::printf("level,h,err,eoc,commuting,conformity\n");
  for (int l = 0; l <= levels; ++l) {
    const Mesh mesh = factory(l);
    const InterpolationCheck c = check_interpolation(field, mesh, cache, 10, 10);
    last_eoc = l == 0 ? NAN : eoc(prev_err, c.err_M);
    prev_err = c.err_M;
    std::printf("%d,%s,%s,%s,%s,%s\n", l, format_double(mesh.h()).c_str(), format_double(c.err_M).c_str(),
                format_double(last_eoc).c_str(), format_double(c.commuting).c_str(),
                format_double(c.conformity.max_violation()).c_str());
    ok = ok && c.commuting <= tol.commuting * (1.0 + c.divdiv_norm) && c.conformity.passed(tol.conformity);
  }
  const bool rate_ok = levels < 1 || in_band(last_eoc, tol.second_lo, tol.second_hi);
  std::printf("commuting and conformity: %s; final EOC %s: %s\n", ok ? "pass" : "FAIL",
              format_double(last_eoc).c_str(), rate_ok ? "pass" : "FAIL");
  return ok && rate_ok ? 0 : 1;
}

int cmd_solve(const std::string& problem, int level, const std::string& mesh_out, const std::string& solution_out,
              bool dump_dofs, int grid, const std::string& solver, const Tolerances& tol) {
  const ProblemId id = parse_problem(problem);
  RunOptions opts;
  opts.solve.strategy = parse_solver(solver);
  LocalBasisCache cache;
  Mesh mesh = problem_mesh(id, 0);
  const LevelResult r = solve_level(id, level, opts, cache, &mesh);
  const DofMap dofs(mesh);
  if (!mesh_out.empty()) {
    auto os = open_out(mesh_out);
    write_mesh(os, mesh);
  }
  if (!solution_out.empty()) {
    auto os = open_out(solution_out);
    write_solution_csv(os, DiscreteField::from_global(mesh, dofs, cache, r.state.m), ScalarFieldP1{r.state.u}, grid);
  }
  if (dump_dofs) dofs.dump(std::cout);
  const bool conf_ok = r.conformity.passed(tol.conformity);
  const bool dd_ok = id != ProblemId::Ex2 || r.divdiv_norm <= tol.divdiv_zero * (1.0 + r.m_norm);
  json j = {{"schema_version", 1},
            {"problem", problem_name(id)},
            {"level", level},
            {"cells", r.cells},
            {"free_dofs", r.free_dofs},
            {"unknowns", r.unknowns},
            {"h", r.h},
            {"solver", r.info.used == SolverStrategy::Dense ? "dense" : "sparse"},
            {"relative_residual", r.info.relative_residual},
            {"err_u", number(r.err.u)},
            {"err_M", number(r.err.M)},
            {"err_ddiv", number(r.err.ddiv)},
            {"err_div", number(r.err.div)},
            {"divdiv_norm", r.divdiv_norm},
            {"conformity", r.conformity.max_violation()},
            {"pass", conf_ok && dd_ok}};
  if (id == ProblemId::Ex2) j["junction_vertex_jumps"] = "free";
  std::cout << j.dump(2) << '\n';
  return conf_ok && dd_ok ? 0 : 1;
}

int cmd_convergence(const std::string& problem, int levels, const std::string& out, std::string summary,
                    const Tolerances& tol) {
  const ProblemId id = parse_problem(problem);
  const ConvergenceReport rep = convergence_study(id, 0, levels);
  {
    auto os = open_out(out);
    write_convergence_csv(os, rep);
  }
  write_convergence_csv(std::cout, rep);
  const ConvergenceRow& last = rep.rows.back();
  json flags;
  bool ok = true;
  auto flag = [&](const char* name, bool v) {
    flags[name] = v;
    ok = ok && v;
  };
  bool conf = true, dd = true;
  for (const auto& l : rep.levels) {
    conf = conf && l.conformity.passed(tol.conformity);
    dd = dd && l.divdiv_norm <= tol.divdiv_zero * (1.0 + l.m_norm);
  }
  flag("conformity", conf);
  if (id == ProblemId::Ex1) {
    flag("eoc_u_second_order", in_band(last.eoc_u, tol.second_lo, tol.second_hi));
    flag("eoc_M_second_order", in_band(last.eoc_M, tol.second_lo, tol.second_hi));
    flag("eoc_ddiv_second_order", in_band(last.eoc_ddiv, tol.second_lo, tol.second_hi));
    flag("eoc_div_first_order", in_band(last.eoc_div, tol.first_lo, tol.first_hi));
  } else {
    flag("eoc_M_alpha", in_band(last.eoc_M, tol.ex2_m_lo, tol.ex2_m_hi));
    flag("eoc_u_two_alpha", in_band(last.eoc_u, tol.ex2_u_lo, tol.ex2_u_hi));
    flag("divdiv_zero", dd);
  }
  json j = {{"schema_version", 1},
            {"problem", problem_name(id)},
            {"levels", levels},
            {"csv", out},
            {"final_eoc",
             {{"u", number(last.eoc_u)},
              {"M", number(last.eoc_M)},
              {"ddiv", id == ProblemId::Ex2 ? json("omitted") : number(last.eoc_ddiv)},
              {"div", id == ProblemId::Ex2 ? json("omitted") : number(last.eoc_div)}}},
            {"flags", flags},
            {"pass", ok}};
  if (id == ProblemId::Ex2) {
    const ExactSolution ex = exact_example2();
    j["alpha"] = ex.alpha;
    j["C"] = ex.c;
    j["junction_vertex_jumps"] = "free";
  }
  if (summary.empty()) summary = out + ".json";
  write_json(summary, j);
  std::printf("summary: %s (%s)\n", summary.c_str(), ok ? "pass" : "FAIL");
  return ok ? 0 : 1;
}

int cmd_sample_basis(int phi, int grid, const std::string& out) {
  if (phi < 1 || phi > kLocalDofs) throw ParameterError("--phi must be in 1..20, got " + std::to_string(phi));
  const auto samples = sample_reference_field(reference_basis()[static_cast<std::size_t>(phi - 1)], grid);
  auto os = open_out(out);
  os << "x,y,mxx,mxy,myy,div_x,div_y,divdiv\n";
  for (const auto& s : samples)
    os << format_double(s.x) << ',' << format_double(s.y) << ',' << format_double(s.mxx) << ','
       << format_double(s.mxy) << ',' << format_double(s.myy) << ',' << format_double(s.div_x) << ','
       << format_double(s.div_y) << ',' << format_double(s.divdiv) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lowest-order H(div div) parallelogram elements for Kirchhoff-Love plates"};
  app.require_subcommand(1);
  Tolerances tol;

  int fault_phi = 0;
  auto* verify = app.add_subcommand("verify", "exact checks of the reference element and the transform");
  verify->add_option("--fault-phi", fault_phi, "perturb shape tensor I (1..20) to test failure reporting");
  add_tolerances(verify, tol);

  int interp_levels = 4;
  std::string domain = "ex1";
  unsigned seed = 1;
  auto* interp = app.add_subcommand("interp-test", "interpolation errors and commuting residuals");
  interp->add_option("--levels", interp_levels)->check(CLI::Range(0, 6));
  interp->add_option("--domain", domain, "ex1 or lshape");
  interp->add_option("--seed", seed);
  add_tolerances(interp, tol);

  std::string problem = "ex1", mesh_out, solution_out, solver = "auto";
  int level = 2, grid = 3;
  bool dump_dofs = false;
  auto* solve = app.add_subcommand("solve", "solve one level");
  solve->add_option("--problem", problem)->required();
  solve->add_option("--level", level)->check(CLI::Range(0, 7));
  solve->add_option("--mesh-out", mesh_out);
  solve->add_option("--solution-out", solution_out);
  solve->add_option("--grid", grid, "samples per direction per cell for --solution-out");
  solve->add_option("--solver", solver, "auto, sparse or dense");
  solve->add_flag("--dump-dofs", dump_dofs);
  add_tolerances(solve, tol);

  int conv_levels = 5;
  std::string out, summary;
  auto* conv = app.add_subcommand("convergence", "convergence study over levels 0..N");
  conv->add_option("--problem", problem)->required();
  conv->add_option("--levels", conv_levels)->check(CLI::Range(0, 6));
  conv->add_option("--out", out)->required();
  conv->add_option("--summary", summary, "JSON summary path (default: <out>.json)");
  add_tolerances(conv, tol);

  int phi = 1, sgrid = 11;
  std::string sout;
  auto* sample = app.add_subcommand("sample-basis", "grid samples of one reference shape tensor");
  sample->add_option("--phi", phi)->required();
  sample->add_option("--grid", sgrid);
  sample->add_option("--out", sout)->required();

  CLI11_PARSE(app, argc, argv);
  try {
    if (*verify) return cmd_verify(fault_phi, tol);
    if (*interp) return cmd_interp_test(interp_levels, domain, seed, tol);
    if (*solve) return cmd_solve(problem, level, mesh_out, solution_out, dump_dofs, grid, solver, tol);
    if (*conv) return cmd_convergence(problem, conv_levels, out, summary, tol);
    if (*sample) return cmd_sample_basis(phi, sgrid, sout);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
