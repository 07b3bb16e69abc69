#include "bregmn/trainer.hpp"

#include <chrono>
#include <cmath>
#include <functional>

#include "bregmn/convex.hpp"

namespace bregmn {

namespace {

constexpr int kConvergeStreak = 20;
constexpr std::uint64_t kStepTag = 0x5331u;

class Optimizer {
 public:
  explicit Optimizer(const OptimizerSpec& spec, Eigen::Index n) : spec_(spec) {
    if (spec.kind != "sgd" && spec.kind != "adam")
      throw ConfigError("config: unknown optimizer '" + spec.kind + "'");
    if (!(spec.lr > 0)) throw ConfigError("config: optimizer lr must be positive");
    v_ = Eigen::VectorXd::Zero(n);
    m_ = Eigen::VectorXd::Zero(n);
  }

  // In-place parameter update. The gradient is norm-clipped before it enters
  // the momentum/moment buffers, and the applied step is clipped again so
  // |phi_next - phi| <= lr * clip holds even with accumulated momentum.
  void apply(Eigen::VectorXd& phi, const Eigen::VectorXd& raw_grad) {
    ++t_;
    Eigen::VectorXd grad = raw_grad;
    const double gn = grad.norm();
    if (gn > spec_.clip) grad *= spec_.clip / gn;
    Eigen::VectorXd step;
    if (spec_.kind == "sgd") {
      v_ = spec_.momentum * v_ + grad;
      step = v_;
    } else {
      m_ = spec_.beta1 * m_ + (1.0 - spec_.beta1) * grad;
      v_ = spec_.beta2 * v_ + (1.0 - spec_.beta2) * grad.cwiseAbs2();
      const double bc1 = 1.0 - std::pow(spec_.beta1, t_);
      const double bc2 = 1.0 - std::pow(spec_.beta2, t_);
      step = (m_ / bc1).cwiseQuotient(((v_ / bc2).cwiseSqrt().array() + spec_.eps).matrix());
    }
    const double n = step.norm();
    if (n > spec_.clip) step *= spec_.clip / n;
    phi -= spec_.lr * step;
  }

 private:
  OptimizerSpec spec_;
  Eigen::VectorXd v_, m_;
  int t_ = 0;
};

using GradFn = std::function<Eigen::VectorXd(GeneratorModel&, std::uint64_t,
                                             double*)>;

TrainState run_loop(const ExperimentConfig& cfg, GeneratorModel gen,
                    const GradFn& gradient) {
  TrainState st;
  st.seed = cfg.seed;
  Optimizer opt(cfg.optimizer, gen.params().size());

  int streak = 0;
  for (int step = 0; step < cfg.max_steps; ++step) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::uint64_t step_seed =
        derive_seed(cfg.seed, {kStepTag, static_cast<std::uint64_t>(step)});

    double loss = 0.0;
    const Eigen::VectorXd grad = gradient(gen, step_seed, &loss);

    if (!std::isfinite(loss) || !grad.allFinite()) {
      st.aborted = true;
      st.abort_reason = "non-finite loss at step " + std::to_string(step);
      break;
    }

    st.loss.push_back(loss);
    const double gnorm = grad.norm();
    st.grad_norm.push_back(gnorm);
    opt.apply(gen.params(), grad);
    st.phi_history.push_back(gen.params());
    ++st.step;

    st.wall_ms.push_back(
        std::chrono::duration<double, std::milli>(
            std::chrono::steady_clock::now() - t0)
            .count());

    streak = gnorm < cfg.tol ? streak + 1 : 0;
    if (streak >= kConvergeStreak) {
      st.converged = true;
      break;
    }
  }

  st.phi = gen.params();
  st.generator = std::move(gen);
  return st;
}

}  // namespace

TrainState train(const ExperimentConfig& cfg) {
  const Measure data = build_measure(cfg.data);
  GeneratorModel gen =
      build_generator(cfg.generator, make_rng(cfg.seed, {stream::kInit}));
  const ConvexGenerator& f = ConvexGenerator::by_name(cfg.f);
  const PipelineConfig pipe = to_pipeline(cfg);
  const int refit_every = cfg.estimator.refit_every;

  // Ratio models refit every `refit_every` steps and frozen in between;
  // with the default of 1 every finite-difference evaluation refits.
  FittedRatios cache;
  int counter = 0;
  GradFn g = [&](GeneratorModel& m, std::uint64_t seed, double* loss) {
    const FittedRatios* frozen = nullptr;
    if (refit_every > 1) {
      if (counter % refit_every == 0)
        cache = pipeline_estimate(f, m, data, pipe, seed).ratios;
      frozen = &cache;
    }
    ++counter;
    return estimate_gradient(f, m, data, pipe, seed, frozen, loss);
  };

  return run_loop(cfg, std::move(gen), g);
}

TrainState train_f_divergence_baseline(const ExperimentConfig& cfg) {
  const Measure data = build_measure(cfg.data);
  GeneratorModel gen =
      build_generator(cfg.generator, make_rng(cfg.seed, {stream::kInit}));
  const ConvexGenerator& f = ConvexGenerator::by_name(cfg.f);
  const PipelineConfig pipe = to_pipeline(cfg);
  const int refit_every = cfg.estimator.refit_every;

  RatioModel cache;
  int counter = 0;
  GradFn g = [&](GeneratorModel& m, std::uint64_t seed, double* loss) {
    const RatioModel* frozen = nullptr;
    if (refit_every > 1) {
      if (counter % refit_every == 0)
        cache = fit_pq_ratio(m, data, pipe, seed);
      frozen = &cache;
    }
    ++counter;
    return f_divergence_gradient(f, m, data, pipe, seed, loss, frozen);
  };
  return run_loop(cfg, std::move(gen), g);
}

TrainState train_nonadversarial_mixture(const ExperimentConfig& cfg) {
  if (cfg.data.kind != "mixture" || cfg.data.components.size() != 4)
    throw ConfigError(
        "config: mixture training expects a 4-component mixture as data");
  if (cfg.generator.family != "mlp")
    throw ConfigError("config: mixture training expects the mlp generator");
  if (cfg.dre.kind != "mmd")
    throw ConfigError("config: mixture training supports only the mmd ratio fit");
  return train(cfg);
}

}  // namespace bregmn
