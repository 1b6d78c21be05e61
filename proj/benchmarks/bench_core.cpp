#include <benchmark/benchmark.h>

#include <random>

#include "sojourn/sojourn.hpp"

using namespace sojourn;

namespace {

HermitianOperator random_operator(int d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> N(0.0, 1.0);
  Matrix A(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j <= i; ++j) {
      const cplx z(N(rng), i == j ? 0.0 : N(rng));
      A(i, j) = z;
      A(j, i) = std::conj(z);
    }
  return HermitianOperator(A);
}

PerturbedFamily band(int n) {
  WignerWeisskopfSpec s;
  s.E0 = 0.0;
  s.band_lo = -4.0;
  s.band_hi = 4.0;
  s.n_levels = n;
  s.coupling = [](double) { return 2.0; };
  return wigner_weisskopf(s);
}

void BM_Eigendecomposition(benchmark::State& st) {
  const int d = static_cast<int>(st.range(0));
  const HermitianOperator H = random_operator(d, 1);
  for (auto _ : st) benchmark::DoNotOptimize(HermitianOperator(H.matrix()));
}
BENCHMARK(BM_Eigendecomposition)->Arg(64)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_SpectralMeasure(benchmark::State& st) {
  const int d = static_cast<int>(st.range(0));
  const HermitianOperator H = random_operator(d, 2);
  const State psi = State::basis(d, 0);
  for (auto _ : st) benchmark::DoNotOptimize(spectral_measure(H, psi));
}
BENCHMARK(BM_SpectralMeasure)->Arg(256)->Arg(1024);

void BM_EnergyWidth(benchmark::State& st) {
  const PerturbedFamily fam = band(static_cast<int>(st.range(0)));
  const SpectralMeasure mu = spectral_measure(fam.H(0.1), fam.psi());
  for (auto _ : st) benchmark::DoNotOptimize(energy_width(mu, 0.0));
}
BENCHMARK(BM_EnergyWidth)->Arg(400)->Arg(2000);

void BM_ReducedResolvent(benchmark::State& st) {
  const int d = static_cast<int>(st.range(0));
  const HermitianOperator H = random_operator(d, 3);
  const State p = State::basis(d, 0);
  const ReducedOperator R(H, p);
  const Vector v = H.matrix().col(0);
  for (auto _ : st) benchmark::DoNotOptimize(R.expectation(v, cplx(0.1, 0.05)));
}
BENCHMARK(BM_ReducedResolvent)->Arg(256)->Arg(1024);

void BM_SojournTruncated(benchmark::State& st) {
  const PerturbedFamily fam = band(static_cast<int>(st.range(0)));
  const SpectralMeasure mu = spectral_measure(fam.H(0.1), fam.psi());
  const double horizon = 0.4 * heisenberg_time(mu);
  for (auto _ : st) benchmark::DoNotOptimize(sojourn_truncated(mu, horizon));
}
BENCHMARK(BM_SojournTruncated)->Arg(400)->Arg(2000)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
