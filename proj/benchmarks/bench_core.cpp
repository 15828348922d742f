#include <benchmark/benchmark.h>

#include "hipmdp/domains/hiv.hpp"
#include "hipmdp/domains/toy.hpp"
#include "hipmdp/gp/model.hpp"
#include "hipmdp/latent/support_selection.hpp"
#include "hipmdp/policy/learner.hpp"
#include "hipmdp/rng.hpp"

using namespace hipmdp;

namespace {

Eigen::MatrixXd random_inputs(Rng& rng, Eigen::Index n, Eigen::Index d) {
    Eigen::MatrixXd X(n, d);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < d; ++j) X(i, j) = rng.uniform(-1.0, 1.0);
    return X;
}

Eigen::VectorXd random_targets(Rng& rng, Eigen::Index n) {
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) y(i) = rng.normal();
    return y;
}

}  // namespace

static void KernelMatrix(benchmark::State& state) {
    Rng rng(1);
    const Eigen::Index n = state.range(0);
    const auto X = random_inputs(rng, n, 8);
    const auto hyper = gp::KernelHyper::from_values(1.0, Eigen::VectorXd::Constant(8, 0.7), 0.05);
    for (auto _ : state) {
        benchmark::DoNotOptimize(gp::kernel_matrix(X, hyper));
    }
    state.SetComplexityN(n);
}
BENCHMARK(KernelMatrix)->Range(64, 512)->Complexity();

static void MarginalLikelihoodGradient(benchmark::State& state) {
    Rng rng(2);
    const Eigen::Index n = state.range(0);
    const auto X = random_inputs(rng, n, 8);
    const auto y = random_targets(rng, n);
    const auto hyper = gp::KernelHyper::from_values(1.0, Eigen::VectorXd::Constant(8, 0.7), 0.05);
    for (auto _ : state) {
        benchmark::DoNotOptimize(gp::marginal_log_likelihood(hyper, X, y));
    }
    state.SetComplexityN(n);
}
BENCHMARK(MarginalLikelihoodGradient)->Range(32, 256)->Complexity();

static void PredictBatch(benchmark::State& state) {
    Rng rng(3);
    const auto X = random_inputs(rng, 150, 12);
    const auto y = random_targets(rng, 150);
    const gp::GpModel model(
        gp::KernelHyper::from_values(1.0, Eigen::VectorXd::Constant(12, 0.7), 0.05), X, y);
    const auto Q = random_inputs(rng, state.range(0), 12);
    Eigen::VectorXd means, vars;
    for (auto _ : state) {
        model.predict_batch(Q, means, vars);
        benchmark::DoNotOptimize(means);
    }
}
BENCHMARK(PredictBatch)->Range(32, 1024);

static void SupportSelection(benchmark::State& state) {
    Rng rng(4);
    const auto X = random_inputs(rng, 200, 6);
    Eigen::MatrixXd Y(200, 2);
    Y.col(0) = random_targets(rng, 200);
    Y.col(1) = random_targets(rng, 200);
    latent::AnnealConfig cfg;
    cfg.steps = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(latent::select_support_points(X, Y, 40, cfg));
    }
}
BENCHMARK(SupportSelection)->Arg(50)->Arg(200);

static void HivDecisionStep(benchmark::State& state) {
    const domains::HivConfig cfg;
    const domains::HivParams params;
    const domains::HivState s = domains::hiv_initial_state(cfg);
    for (auto _ : state) {
        benchmark::DoNotOptimize(domains::hiv_step(s, 3, params, cfg));
    }
}
BENCHMARK(HivDecisionStep);

static void ToyStep(benchmark::State& state) {
    const domains::ToyConfig cfg;
    const domains::ToyParams params{domains::ToyClass::Blue, cfg.noise_scale};
    Rng rng(5);
    const Eigen::Vector2d s(0.5, 0.5);
    for (auto _ : state) {
        benchmark::DoNotOptimize(domains::toy_step(s, domains::ToyAction::Up, params, cfg, rng));
    }
}
BENCHMARK(ToyStep);

static void TrainStep(benchmark::State& state) {
    Rng rng(6);
    policy::LearnerConfig cfg;
    cfg.batch_size = 32;
    policy::DdqnLearner learner(6, 4, cfg, rng);
    policy::PrioritizedBuffer buffer(4096, 0.6);
    Rng data(7);
    for (int i = 0; i < 1024; ++i) {
        TransitionTuple t;
        t.state = Eigen::VectorXd::NullaryExpr(6, [&](Eigen::Index) { return data.normal(); });
        t.next_state = Eigen::VectorXd::NullaryExpr(6, [&](Eigen::Index) { return data.normal(); });
        t.action = static_cast<int>(data.index(4));
        t.reward = data.normal();
        buffer.push(std::move(t));
    }
    Rng train(8);
    for (auto _ : state) {
        benchmark::DoNotOptimize(learner.train_step(buffer, train));
    }
}
BENCHMARK(TrainStep);

BENCHMARK_MAIN();
