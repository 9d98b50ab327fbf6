#include <benchmark/benchmark.h>

#include <tbresnet/nn.hpp>
#include <tbresnet/synthetic.hpp>
#include <tbresnet/train.hpp>

using namespace tbresnet;

namespace {

MlpParams network(int width, int inputs, int outputs) {
  Rng rng = make_rng(1, "bench");
  return MlpParams::glorot({inputs, width, width, outputs}, rng);
}

void BM_MlpForward(benchmark::State& state) {
  const int width = static_cast<int>(state.range(0));
  const auto p = network(width, 22, 5);
  const Eigen::MatrixXd x = Eigen::MatrixXd::Random(22, 100);
  for (auto _ : state) benchmark::DoNotOptimize(mlp_forward_batch(p, x));
  state.SetItemsProcessed(state.iterations() * 100);
}
BENCHMARK(BM_MlpForward)->Arg(32)->Arg(128)->Arg(512);

void BM_MlpBackward(benchmark::State& state) {
  const int width = static_cast<int>(state.range(0));
  const auto p = network(width, 22, 5);
  const Eigen::MatrixXd x = Eigen::MatrixXd::Random(22, 100);
  const Eigen::MatrixXd up = Eigen::MatrixXd::Random(5, 100);
  for (auto _ : state) benchmark::DoNotOptimize(mlp_backward(p, x, up, false));
  state.SetItemsProcessed(state.iterations() * 100);
}
BENCHMARK(BM_MlpBackward)->Arg(32)->Arg(128)->Arg(512);

void BM_LossGradients(benchmark::State& state) {
  const auto scenario = static_cast<Scenario>(state.range(0));
  const auto design = default_design(scenario);
  const auto data = generate_synthetic(design, 1000, Noise::gumbel, 2);
  TrainConfig cfg;
  cfg.width = 32;
  TbResNetModel m = initial_model(design.spec, 0.5, data, cfg, 2);
  m.dcm_params = design.true_params;
  const auto in = m.encode(data);
  for (auto _ : state) benchmark::DoNotOptimize(loss_gradients(m, in, data.choices()));
  state.SetLabel(std::string(to_string(scenario)));
}
BENCHMARK(BM_LossGradients)
    ->Arg(static_cast<int>(Scenario::mnl))
    ->Arg(static_cast<int>(Scenario::pt))
    ->Arg(static_cast<int>(Scenario::hd));

void BM_TheoryFit(benchmark::State& state) {
  const auto scenario = static_cast<Scenario>(state.range(0));
  const auto design = default_design(scenario);
  const auto data = generate_synthetic(design, 2000, Noise::gumbel, 3);
  for (auto _ : state) benchmark::DoNotOptimize(fit_pure_dcm(design.spec, data, TrainConfig{}, 3));
  state.SetLabel(std::string(to_string(scenario)));
}
BENCHMARK(BM_TheoryFit)
    ->Arg(static_cast<int>(Scenario::mnl))
    ->Arg(static_cast<int>(Scenario::pt))
    ->Arg(static_cast<int>(Scenario::hd))
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
