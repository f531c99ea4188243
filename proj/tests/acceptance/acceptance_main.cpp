// Acceptance criteria, one PASS/FAIL/SKIP line each. Run with --full-scale
// to include the criteria that need the full 2048-element, T = 1000 study.
// --known-red AC8,AC11 keeps listed failures out of the exit code; a listed
// criterion that passes is an error so the list cannot go stale.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <optional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include <Eigen/Dense>

#include "fhnrom/assembly.hpp"
#include "fhnrom/deim.hpp"
#include "fhnrom/experiment.hpp"
#include "fhnrom/fom.hpp"
#include "fhnrom/pod.hpp"

using namespace fhnrom;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3e", x);
  return buf;
}

enum class Status { pass, fail, skip };

struct Tally {
  int pass = 0, fail = 0, skip = 0;
  std::set<std::string> known_red;
  int unexpected = 0;

  void report(const char* id, const char* name, Status s, const std::string& detail) {
    const char* tag = s == Status::pass ? "PASS" : s == Status::fail ? "FAIL" : "SKIP";
    (s == Status::pass ? pass : s == Status::fail ? fail : skip)++;
    const bool listed = known_red.count(id) > 0;
    if ((s == Status::fail) != listed && s != Status::skip) ++unexpected;
    std::cout << tag << ' ' << id << ' ' << name << ": " << detail;
    if (listed && s == Status::fail) std::cout << " [known red]";
    if (listed && s == Status::pass) std::cout << " [listed as known red but passed]";
    std::cout << std::endl;
  }

  // Runs `body`; an exception counts as a failure with its message.
  void run(const char* id, const char* name, const std::function<std::pair<Status, std::string>()>& body) {
    try {
      const auto [s, detail] = body();
      report(id, name, s, detail);
    } catch (const std::exception& e) {
      report(id, name, Status::fail, std::string("exception: ") + e.what());
    }
  }
};

Status verdict(bool ok) { return ok ? Status::pass : Status::fail; }

Vector random_vector(Eigen::Index n, std::mt19937_64& gen) {
  std::normal_distribution<double> dist;
  Vector x(n);
  for (Eigen::Index i = 0; i < n; ++i) x(i) = dist(gen);
  return x;
}

ExperimentConfig desk_config() {
  ExperimentConfig c;
  c.refinements = 3;
  c.t_final = 100.0;
  c.test_mu = {0.02};
  return c;
}

RunOptions in_memory() {
  RunOptions o;
  o.persist = false;
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  bool full_scale = false;
  std::set<std::string> known_red;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--full-scale") == 0) {
      full_scale = true;
    } else if (std::strcmp(argv[i], "--known-red") == 0 && i + 1 < argc) {
      std::stringstream list(argv[++i]);
      for (std::string id; std::getline(list, id, ',');) known_red.insert(id);
    } else {
      std::cerr << "usage: " << argv[0] << " [--full-scale] [--known-red ID,ID,...]\n";
      return 2;
    }
  }
  Tally tally;
  tally.known_red = known_red;
  std::mt19937_64 gen(424242);

  tally.run("AC1", "element-count", [] {
    const auto start = Clock::now();
    const DGSpace space(build_square_mesh(10.0, 5), 1);
    const double t = since(start);
    const bool ok = space.num_elements() == 2048 && space.num_dofs() == 6144 && t < 1.0;
    return std::pair{verdict(ok), std::to_string(space.num_elements()) + " elements, N = " +
                                      std::to_string(space.num_dofs()) + ", " + num(t) + " s"};
  });

  tally.run("AC2", "pod-m-orthonormality", [] {
    const auto start = Clock::now();
    ExperimentConfig c;
    c.refinements = 2;
    c.t_final = 50.0;
    const OfflineArtifacts art = run_offline(c, in_memory());
    const double du = m_orthonormality_defect(art.basis.u.modes, art.operators->mass());
    const double dv = m_orthonormality_defect(art.basis.v.modes, art.operators->mass());
    const double t = since(start);
    const bool ok = std::max(du, dv) <= 1e-8 && t < 10.0;
    return std::pair{verdict(ok), "k = " + std::to_string(art.basis.u.size()) + ", defect u " + num(du) + ", v " +
                                      num(dv) + ", " + num(t) + " s"};
  });

  tally.run("AC3", "pod-optimality", [] {
    // 96 DoFs, short horizon, all training parameters.
    const auto space = std::make_shared<const DGSpace>(build_square_mesh(10.0, 2), 1);
    const FomOperators ops(space, FhnParameters{});
    const auto [u0, v0] = initial_state(*space, ExperimentConfig{}.seed);
    std::vector<DenseMatrix> parts;
    Eigen::Index cols = 0;
    for (double mu : ExperimentConfig{}.train_mu) {
      parts.push_back(fom_solve(ops.with_mu(mu), u0, v0, 0.5, 5.0).u);
      cols += parts.back().cols();
    }
    DenseMatrix w(static_cast<Eigen::Index>(space->num_dofs()), cols);
    Eigen::Index c0 = 0;
    for (const auto& p : parts) {
      w.middleCols(c0, p.cols()) = p;
      c0 += p.cols();
    }
    const Eigen::MatrixXd m = ops.mass().to_dense();
    // Oracle: eigenvalues of the weighted Gram matrix W^T M W.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(w.transpose() * m * w);
    Eigen::VectorXd lambda = eig.eigenvalues().reverse().cwiseMax(0.0);
    const BlockCholesky factor = cholesky(ops.mass());
    double worst = 0.0;
    std::string detail = std::to_string(w.rows()) + "x" + std::to_string(w.cols()) + " snapshots;";
    for (int k : {1, 5, 10}) {
      ModeSelection sel;
      sel.modes = k;
      const DenseMatrix psi = compute_pod_basis(w, factor, sel).modes;
      const DenseMatrix e = w - psi * (psi.transpose() * (m * w));
      const double residual = e.cwiseProduct(m * e).sum();
      const double tail = lambda.tail(lambda.size() - k).sum();
      const double rel = std::abs(residual - tail) / tail;
      worst = std::max(worst, rel);
      detail += " k=" + std::to_string(k) + " rel " + num(rel);
    }
    return std::pair{verdict(worst <= 1e-6), detail};
  });

  // Desk-scale study shared by AC4, AC5, AC7, AC8 and AC11.
  const auto desk_start = Clock::now();
  std::optional<OfflineArtifacts> desk;
  std::optional<BenchmarkReport> desk_report;
  std::string desk_error;
  try {
    desk = run_offline(desk_config(), in_memory());
    desk_report = run_online(desk_config(), *desk);
  } catch (const std::exception& e) {
    desk_error = e.what();
  }
  const double desk_seconds = since(desk_start);
  auto need_desk = [&] {
    if (!desk || !desk_report) throw std::runtime_error("desk-scale study failed: " + desk_error);
  };

  // Full-scale study for AC5 (bound value) and AC9, only with --full-scale.
  std::optional<BenchmarkReport> full;
  std::string full_error;
  if (full_scale) {
    try {
      const ExperimentConfig c;
      const OfflineArtifacts art = run_offline(c, in_memory());
      full = run_online(c, art);
    } catch (const std::exception& e) {
      full_error = e.what();
    }
  }
  auto need_full = [&] {
    if (!full) throw std::runtime_error("full-scale study failed: " + full_error);
  };

  tally.run("AC4", "deim-interpolation", [&] {
    need_desk();
    const DenseMatrix& w = desk->deim_basis;
    const IndexList& p = desk->deim->indices();
    const Eigen::FullPivLU<DenseMatrix> lu(select_rows(w, p));
    double span = 0.0, at_p = 0.0;
    for (int t = 0; t < 100; ++t) {
      const Vector f = w * random_vector(w.cols(), gen);
      span = std::max(span, (f - w * lu.solve(select_rows(f, p))).norm() / f.norm());
      const Vector g = random_vector(w.rows(), gen);
      const Vector gi = w * lu.solve(select_rows(g, p));
      for (auto i : p) at_p = std::max(at_p, std::abs(g(i) - gi(i)) / g.cwiseAbs().maxCoeff());
    }
    return std::pair{verdict(span <= 1e-10 && at_p <= 1e-12),
                     "n = " + std::to_string(w.cols()) + ", span error " + num(span) + ", residual at indices " + num(at_p)};
  });

  tally.run("AC5", "deim-error-bound", [&] {
    need_desk();
    const DenseMatrix& w = desk->deim_basis;
    const IndexList& p = desk->deim->indices();
    const double bound = deim_error_bound(w, p);
    const Eigen::FullPivLU<DenseMatrix> lu(select_rows(w, p));
    int violations = 0;
    double tightest = 0.0;
    for (int t = 0; t < 50; ++t) {
      const Vector f = random_vector(w.rows(), gen);
      const double lhs = (f - w * lu.solve(select_rows(f, p))).norm();
      const double rhs = bound * (f - w * (w.transpose() * f)).norm();
      if (lhs > rhs) ++violations;
      tightest = std::max(tightest, lhs / rhs);
    }
    std::string detail = "desk bound " + num(bound) + ", 50 trials, " + std::to_string(violations) +
                         " violations, max lhs/rhs " + num(tightest);
    bool ok = violations == 0;
    if (full_scale) {
      need_full();
      ok = ok && full->deim_bound < 1000.0;
      detail += "; full-scale bound " + num(full->deim_bound) + " (< 1000)";
    } else {
      detail += "; full-scale bound not checked (needs --full-scale)";
    }
    return std::pair{verdict(ok), detail};
  });

  tally.run("AC6", "jacobian-consistency", [&] {
    const auto space = std::make_shared<const DGSpace>(build_square_mesh(10.0, 1), 1);
    const auto n = static_cast<Eigen::Index>(space->num_dofs());
    const double h = 1e-6;
    const double mu = 0.01;
    double worst_full = 0.0;
    for (int t = 0; t < 20; ++t) {
      const Vector u = random_vector(n, gen);
      const Eigen::MatrixXd j = assemble_nonlinear_jacobian(*space, u, mu).to_dense();
      Eigen::MatrixXd fd(n, n);
      for (Eigen::Index c = 0; c < n; ++c) {
        Vector up = u, um = u;
        up(c) += h;
        um(c) -= h;
        fd.col(c) = (assemble_nonlinear(*space, up, mu) - assemble_nonlinear(*space, um, mu)) / (2 * h);
      }
      worst_full = std::max(worst_full, (fd - j).cwiseAbs().maxCoeff() / j.cwiseAbs().maxCoeff());
    }
    // DEIM-reduced Jacobian on the same mesh.
    ExperimentConfig c;
    c.refinements = 1;
    c.t_final = 20.0;
    const OfflineArtifacts art = run_offline(c, in_memory());
    const DeimOperator& op = *art.deim;
    const auto k = static_cast<Eigen::Index>(op.num_modes());
    double worst_deim = 0.0;
    for (int t = 0; t < 20; ++t) {
      const Vector ur = random_vector(k, gen);
      const Eigen::MatrixXd j = op.jacobian(ur, mu);
      Eigen::MatrixXd fd(k, k);
      for (Eigen::Index col = 0; col < k; ++col) {
        Vector up = ur, um = ur;
        up(col) += h;
        um(col) -= h;
        fd.col(col) = (op.evaluate(up, mu) - op.evaluate(um, mu)) / (2 * h);
      }
      worst_deim = std::max(worst_deim, (fd - j).cwiseAbs().maxCoeff() / j.cwiseAbs().maxCoeff());
    }
    return std::pair{verdict(worst_full <= 1e-6 && worst_deim <= 1e-6),
                     "max relative FD error J_F " + num(worst_full) + ", DEIM (k = " + std::to_string(k) + ", n = " +
                         std::to_string(op.num_points()) + ") " + num(worst_deim)};
  });

  tally.run("AC7", "rom-accuracy", [&] {
    need_desk();
    const CaseResult& c = desk_report->cases.at(0);
    if (!c.ok) return std::pair{Status::fail, "mu = 0.02 failed: " + c.error};
    const bool ok = c.pod_error <= 1e-2 && c.deim_error <= 2.0 * c.pod_error && desk_seconds < 300.0;
    return std::pair{verdict(ok), "k = " + std::to_string(desk_report->modes) + ", n = " +
                                      std::to_string(desk_report->deim_modes) + ", POD error " + num(c.pod_error) +
                                      ", DEIM error " + num(c.deim_error) + " (ratio " +
                                      num(c.deim_error / c.pod_error) + "), " + num(desk_seconds) + " s"};
  });

  tally.run("AC8", "newton-iterations", [&] {
    need_desk();
    double worst = desk_report->cases.at(0).fom_newton;
    for (double m : desk->mean_newton_iterations) worst = std::max(worst, m);
    return std::pair{verdict(worst <= 2.0), "max mean Newton iterations per FOM step " + num(worst)};
  });

  tally.run("AC9", "speedup-ordering", [&]() -> std::pair<Status, std::string> {
    if (!full_scale) return {Status::skip, "needs --full-scale (refinements 5, T = 1000)"};
    need_full();
    const BenchmarkReport& r = *full;
    bool ordered = true;
    int doubled = 0;
    std::ostringstream detail;
    detail << "k = " << r.modes << ", n = " << r.deim_modes << ";";
    for (const CaseResult& cs : r.cases) {
      if (!cs.ok) {
        ordered = false;
        detail << " mu " << mu_label(cs.mu) << " failed: " << cs.error << ";";
        continue;
      }
      ordered = ordered && cs.deim_seconds < cs.pod_seconds && cs.pod_seconds < cs.fom_seconds;
      if (cs.speedup_deim >= 2.0 * cs.speedup_pod) ++doubled;
      detail << " mu " << mu_label(cs.mu) << ": FOM " << num(cs.fom_seconds) << " POD " << num(cs.pod_seconds)
             << " DEIM " << num(cs.deim_seconds) << " S_POD " << num(cs.speedup_pod) << " S_DEIM "
             << num(cs.speedup_deim) << ";";
    }
    detail << " S_DEIM >= 2 S_POD in " << doubled << " of " << r.cases.size();
    return {verdict(ordered && doubled >= 3), detail.str()};
  });

  tally.run("AC10", "deim-cost-independence", [&] {
    // Same (k, n) at refinements 3 and 5, bases from short training runs.
    std::vector<std::uint64_t> flops;
    std::vector<std::size_t> owners;
    for (int r : {3, 5}) {
      ExperimentConfig c;
      c.refinements = r;
      c.t_final = 20.0;
      c.modes = 10;
      c.deim_modes = 20;
      const OfflineArtifacts art = run_offline(c, in_memory());
      OpCounter counter;
      art.deim->evaluate(Vector::Ones(10) * 0.1, 0.01, &counter);
      flops.push_back(counter.flops);
      owners.push_back(art.deim->num_sampled_elements());
    }
    const double change = std::abs(static_cast<double>(flops[1]) - static_cast<double>(flops[0])) /
                          static_cast<double>(flops[0]);
    return std::pair{verdict(change <= 0.10), "flops r=3 " + std::to_string(flops[0]) + " (" +
                                                  std::to_string(owners[0]) + " elements), r=5 " +
                                                  std::to_string(flops[1]) + " (" + std::to_string(owners[1]) +
                                                  " elements), change " + num(change)};
  });

  tally.run("AC11", "singular-value-decay", [&] {
    need_desk();
    double worst = 0.0;
    std::string detail;
    for (const auto& [name, s] : {std::pair<const char*, const Vector*>{"U", &desk->basis.u.singular_values},
                                  {"V", &desk->basis.v.singular_values}, {"F", &desk->f_singular_values}}) {
      const double ratio = (*s)(29) / (*s)(0);
      worst = std::max(worst, ratio);
      detail += std::string(detail.empty() ? "" : ", ") + name + " " + num(ratio);
    }
    return std::pair{verdict(worst <= 1e-3), "sigma_30/sigma_1: " + detail};
  });

  std::cout << tally.pass << " passed, " << tally.fail << " failed, " << tally.skip << " skipped" << std::endl;
  return tally.unexpected == 0 ? 0 : 1;
}
