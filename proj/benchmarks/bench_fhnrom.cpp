// Kernel timings at refinements 3-5. Reduced bases are random orthonormal
// matrices of the usual sizes, which is enough for timing.
#include <memory>
#include <optional>
#include <random>

#include <Eigen/QR>
#include <benchmark/benchmark.h>

#include "fhnrom/assembly.hpp"
#include "fhnrom/deim.hpp"
#include "fhnrom/experiment.hpp"
#include "fhnrom/rom.hpp"

using namespace fhnrom;

namespace {

constexpr int kModes = 20;
constexpr int kDeimModes = 40;

DenseMatrix orthonormal(Eigen::Index rows, Eigen::Index cols, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> dist;
  DenseMatrix a(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) a(i, j) = dist(gen);
  const Eigen::HouseholderQR<DenseMatrix> qr(a);
  return qr.householderQ() * DenseMatrix::Identity(rows, cols);
}

struct Setup {
  std::shared_ptr<const DGSpace> space;
  std::optional<FomOperators> ops;
  Vector u0, v0;
  RomOperators rom;
  std::shared_ptr<const DeimOperator> deim;
  DenseMatrix psi_u;

  explicit Setup(int refinements) {
    const ExperimentConfig c;
    space = std::make_shared<const DGSpace>(build_square_mesh(c.half_width, refinements), c.degree);
    FhnParameters p = c.physics;
    p.mu = 0.02;
    ops.emplace(space, p, c.penalty);
    std::tie(u0, v0) = initial_state(*space, c.seed);
    const auto n = static_cast<Eigen::Index>(space->num_dofs());
    // M is |det| I blockwise, so scaling by 1/sqrt(|det|) gives M-orthonormal columns.
    psi_u = orthonormal(n, kModes, 1);
    DenseMatrix psi_v = orthonormal(n, kModes, 2);
    for (std::size_t e = 0; e < space->num_elements(); ++e) {
      const double s = 1.0 / std::sqrt(std::abs(space->mesh().affine_maps()[e].det));
      const auto row = static_cast<Eigen::Index>(space->dof(e, 0));
      psi_u.middleRows(row, space->local_size()) *= s;
      psi_v.middleRows(row, space->local_size()) *= s;
    }
    rom = reduce_operators(psi_u, psi_v, ops->mass(), ops->stiffness_u(), ops->stiffness_v(), p);
    const DenseMatrix w = orthonormal(n, kDeimModes, 3);
    deim = std::make_shared<const DeimOperator>(DeimOperator::build(psi_u, w, deim_select(w), *space));
  }
};

Setup& setup(int refinements) {
  static std::unique_ptr<Setup> cache[6];
  if (!cache[refinements]) cache[refinements] = std::make_unique<Setup>(refinements);
  return *cache[refinements];
}

void BM_FomStep(benchmark::State& state) {
  Setup& s = setup(static_cast<int>(state.range(0)));
  FomStepper stepper(*s.ops, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(stepper.step(s.u0, s.v0));
  state.counters["N"] = static_cast<double>(s.space->num_dofs());
}

void BM_NonlinearAssembly(benchmark::State& state) {
  Setup& s = setup(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(assemble_nonlinear(*s.space, s.u0, 0.02));
}

void BM_PodRomStep(benchmark::State& state) {
  Setup& s = setup(static_cast<int>(state.range(0)));
  const PodNonlinearity pod(s.space, s.psi_u);
  const RomState start{Vector::Constant(kModes, 0.1), Vector::Zero(kModes), 0.0};
  for (auto _ : state) benchmark::DoNotOptimize(rom_step(s.rom, pod, start, 0.5));
}

void BM_DeimRomStep(benchmark::State& state) {
  Setup& s = setup(static_cast<int>(state.range(0)));
  const DeimNonlinearity deim(s.deim);
  const RomState start{Vector::Constant(kModes, 0.1), Vector::Zero(kModes), 0.0};
  for (auto _ : state) benchmark::DoNotOptimize(rom_step(s.rom, deim, start, 0.5));
}

void BM_DeimEvaluate(benchmark::State& state) {
  Setup& s = setup(static_cast<int>(state.range(0)));
  const Vector ur = Vector::Constant(kModes, 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(s.deim->evaluate(ur, 0.02));
  OpCounter counter;
  s.deim->evaluate(ur, 0.02, &counter);
  state.counters["flops"] = static_cast<double>(counter.flops);
}

}  // namespace

BENCHMARK(BM_FomStep)->DenseRange(3, 5)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_NonlinearAssembly)->DenseRange(3, 5)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_PodRomStep)->DenseRange(3, 5)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_DeimRomStep)->DenseRange(3, 5)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_DeimEvaluate)->DenseRange(3, 5)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
