#include "bregmn/estimator.hpp"

#include <cmath>
#include <stdexcept>

#include "bregmn/simd/kernels.hpp"

namespace bregmn {

namespace {

struct BaseDraws {
  Eigen::MatrixXd x;             // one base sample per row
  std::vector<Eigen::Index> q_rows;  // rows that came from the generator branch
  Eigen::MatrixXd z_q;           // generator noise for those rows, in order
};

// Mixture base draws: P-branch with probability alpha (data sample plus
// N(0, sigma2_p I)), generator branch otherwise (pushforward plus
// N(0, sigma2_q I)). Branch picks are parameter-free, so the draw sequence
// is aligned across perturbed generator parameters.
BaseDraws sample_base(const GeneratorModel& gen, const Measure& data,
                      const PipelineConfig& cfg, int n, Rng& rng) {
  const int d = gen.out_dim();
  const double s_p = std::sqrt(cfg.sigma2_p);
  const double s_q = std::sqrt(cfg.sigma2_q);
  std::uniform_real_distribution<double> pick(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  BaseDraws out;
  out.x.resize(n, d);
  out.z_q.resize(n, gen.noise_dim());
  Eigen::Index nq = 0;
  for (int i = 0; i < n; ++i) {
    if (pick(rng) < cfg.alpha) {
      out.x.row(i) = data.sample(1, rng);
      for (int a = 0; a < d; ++a) out.x(i, a) += s_p * gauss(rng);
    } else {
      const Eigen::MatrixXd z = gen.sample_noise(1, rng);
      out.x.row(i) = gen.push(z);
      for (int a = 0; a < d; ++a) out.x(i, a) += s_q * gauss(rng);
      out.q_rows.push_back(i);
      out.z_q.row(nq++) = z;
    }
  }
  out.z_q.conservativeResize(nq, Eigen::NoChange);
  return out;
}

struct PipelineDraws {
  Eigen::MatrixXd x_p, x_q;
  BaseDraws base_fit, base_eval;
};

PipelineDraws make_draws(const GeneratorModel& gen, const Measure& data,
                         const PipelineConfig& cfg, std::uint64_t seed) {
  PipelineDraws d;
  Rng r_data = make_rng(seed, {stream::kData});
  d.x_p = data.sample(cfg.n_fit, r_data);
  Rng r_gen = make_rng(seed, {stream::kGenNoise});
  d.x_q = gen.push(gen.sample_noise(cfg.n_fit, r_gen));
  Rng r_fit = make_rng(seed, {stream::kBaseBranch});
  d.base_fit = sample_base(gen, data, cfg, cfg.n_fit, r_fit);
  Rng r_eval = make_rng(seed, {stream::kEval});
  d.base_eval = sample_base(gen, data, cfg, cfg.n_base, r_eval);
  return d;
}

FittedRatios fit_ratios(const PipelineConfig& cfg, const Eigen::MatrixXd& x_p,
                        const Eigen::MatrixXd& x_q,
                        const Eigen::MatrixXd& base_fit, std::uint64_t seed) {
  if (cfg.dre == DreKind::Mmd) {
    auto [r_pm, r_qm] = fit_mmd_ratio_pair(x_p, x_q, base_fit, cfg.kernel);
    return {std::move(r_pm), std::move(r_qm)};
  }
  Rng r1 = make_rng(seed, {stream::kDreInit, 1});
  Rng r2 = make_rng(seed, {stream::kDreInit, 2});
  return {fit_discriminator_ratio(x_p, base_fit, cfg.disc, r1),
          fit_discriminator_ratio(x_q, base_fit, cfg.disc, r2)};
}

void check_pipeline(const PipelineConfig& cfg) {
  if (cfg.n_fit < 2 || cfg.n_base < 1)
    throw std::invalid_argument("estimator: sample counts too small");
  if (!(cfg.alpha >= 0.0 && cfg.alpha <= 1.0))
    throw std::invalid_argument("estimator: alpha must be in [0,1]");
  if (!(cfg.sigma2_p > 0.0) || !(cfg.sigma2_q > 0.0))
    throw std::invalid_argument("estimator: base noise variances must be positive");
}

GradMode resolve_mode(const PipelineConfig& cfg, int param_count) {
  if (cfg.grad_mode == GradMode::FiniteDifference) {
    if (param_count > 64)
      throw std::invalid_argument(
          "estimator: finite differences are limited to 64 parameters; use "
          "the pathwise mode");
    return GradMode::FiniteDifference;
  }
  if (cfg.grad_mode == GradMode::Pathwise) return GradMode::Pathwise;
  return param_count <= 64 ? GradMode::FiniteDifference : GradMode::Pathwise;
}

}  // namespace

BregmanEstimate estimate(const ConvexGenerator& f, const RatioModel& r_pm,
                         const RatioModel& r_qm,
                         const Eigen::MatrixXd& base_samples,
                         std::uint64_t seed) {
  if (base_samples.rows() < 1)
    throw std::invalid_argument("estimator: empty base sample table");

  const Eigen::VectorXd rp = r_pm.eval_batch(base_samples);
  const Eigen::VectorXd rq = r_qm.eval_batch(base_samples);
  const std::size_t n = static_cast<std::size_t>(base_samples.rows());

  std::vector<double> frp(n), frq(n), dfrq(n);
  f.f_batch(rp.data(), frp.data(), n);
  f.f_batch(rq.data(), frq.data(), n);
  f.df_batch(rq.data(), dfrq.data(), n);

  BregmanEstimate e;
  e.terms.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    e.terms[i] = frp[i] - frq[i] - dfrq[i] * (rp[k] - rq[k]);
    if (!std::isfinite(e.terms[i]))
      throw std::logic_error(
          "estimator: non-finite term despite ratio clamping");
  }
  e.n = n;
  e.f_name = f.name();
  e.seed = seed;
  e.value = simd::active().sum(e.terms.data(), n) / static_cast<double>(n);
  return e;
}

PipelineResult pipeline_estimate(const ConvexGenerator& f,
                                 const GeneratorModel& gen,
                                 const Measure& data,
                                 const PipelineConfig& cfg, std::uint64_t seed,
                                 const FittedRatios* frozen) {
  check_pipeline(cfg);
  const PipelineDraws d = make_draws(gen, data, cfg, seed);
  FittedRatios ratios =
      frozen ? *frozen : fit_ratios(cfg, d.x_p, d.x_q, d.base_fit.x, seed);
  PipelineResult out{estimate(f, ratios.r_pm, ratios.r_qm, d.base_eval.x, seed),
                     std::move(ratios)};
  return out;
}

Eigen::VectorXd estimate_gradient(const ConvexGenerator& f,
                                  GeneratorModel& gen, const Measure& data,
                                  const PipelineConfig& cfg, std::uint64_t seed,
                                  const FittedRatios* frozen,
                                  double* loss_out) {
  check_pipeline(cfg);
  if (!(cfg.fd_step > 0))
    throw std::invalid_argument("estimator: fd_step must be positive");

  const int np = gen.param_count();
  const GradMode mode = resolve_mode(cfg, np);
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(np);

  if (mode == GradMode::FiniteDifference) {
    Eigen::VectorXd& phi = gen.params();
    for (int i = 0; i < np; ++i) {
      const double orig = phi[i];
      const double h = cfg.fd_step * (1.0 + std::abs(orig));
      phi[i] = orig + h;
      const double lp = pipeline_estimate(f, gen, data, cfg, seed, frozen).est.value;
      phi[i] = orig - h;
      const double lm = pipeline_estimate(f, gen, data, cfg, seed, frozen).est.value;
      phi[i] = orig;
      grad[i] = (lp - lm) / (2.0 * h);
    }
    if (loss_out)
      *loss_out = pipeline_estimate(f, gen, data, cfg, seed, frozen).est.value;
    return grad;
  }

  // Pathwise: freeze the ratio models and differentiate the estimate through
  // the generator-branch base samples x = G_phi(z) + noise.
  const PipelineDraws d = make_draws(gen, data, cfg, seed);
  FittedRatios ratios =
      frozen ? *frozen : fit_ratios(cfg, d.x_p, d.x_q, d.base_fit.x, seed);

  const BregmanEstimate e =
      estimate(f, ratios.r_pm, ratios.r_qm, d.base_eval.x, seed);
  if (loss_out) *loss_out = e.value;

  const double inv_n = 1.0 / static_cast<double>(d.base_eval.x.rows());
  for (std::size_t j = 0; j < d.base_eval.q_rows.size(); ++j) {
    const Eigen::Index row = d.base_eval.q_rows[j];
    const Eigen::VectorXd x = d.base_eval.x.row(row).transpose();
    const double rp = ratios.r_pm(x);
    const double rq = ratios.r_qm(x);
    const Eigen::VectorXd gp = ratios.r_pm.grad_x(x);
    const Eigen::VectorXd gq = ratios.r_qm.grad_x(x);
    const Eigen::VectorXd dterm_dx =
        (f.df(rp) - f.df(rq)) * gp - f.d2f(rq) * (rp - rq) * gq;
    gen.push_backward(d.base_eval.z_q.row(static_cast<Eigen::Index>(j)).transpose(),
                      inv_n * dterm_dx, grad);
  }
  return grad;
}

RatioModel fit_pq_ratio(const GeneratorModel& gen, const Measure& data,
                        const PipelineConfig& cfg, std::uint64_t seed) {
  check_pipeline(cfg);
  Rng r_data = make_rng(seed, {stream::kData});
  const Eigen::MatrixXd x_p = data.sample(cfg.n_fit, r_data);
  Rng r_gen = make_rng(seed, {stream::kGenNoise});
  const Eigen::MatrixXd x_q = gen.push(gen.sample_noise(cfg.n_fit, r_gen));

  if (cfg.dre == DreKind::Mmd) return fit_mmd_ratio(x_p, x_q, cfg.kernel);
  Rng r1 = make_rng(seed, {stream::kDreInit, 1});
  return fit_discriminator_ratio(x_p, x_q, cfg.disc, r1);
}

BregmanEstimate pipeline_f_divergence(const ConvexGenerator& f,
                                      const GeneratorModel& gen,
                                      const Measure& data,
                                      const PipelineConfig& cfg,
                                      std::uint64_t seed,
                                      const RatioModel* frozen) {
  check_pipeline(cfg);
  const RatioModel r_pq =
      frozen ? *frozen : fit_pq_ratio(gen, data, cfg, seed);

  Rng r_eval = make_rng(seed, {stream::kEval});
  const Eigen::MatrixXd x_eval =
      gen.push(gen.sample_noise(cfg.n_base, r_eval));
  const Eigen::VectorXd r = r_pq.eval_batch(x_eval);

  BregmanEstimate e;
  const std::size_t n = static_cast<std::size_t>(x_eval.rows());
  e.terms.resize(n);
  f.f_batch(r.data(), e.terms.data(), n);
  e.n = n;
  e.f_name = f.name();
  e.seed = seed;
  e.value = simd::active().sum(e.terms.data(), n) / static_cast<double>(n);
  return e;
}

Eigen::VectorXd f_divergence_gradient(const ConvexGenerator& f,
                                      GeneratorModel& gen, const Measure& data,
                                      const PipelineConfig& cfg,
                                      std::uint64_t seed, double* loss_out,
                                      const RatioModel* frozen) {
  check_pipeline(cfg);
  if (!(cfg.fd_step > 0))
    throw std::invalid_argument("estimator: fd_step must be positive");
  const int np = gen.param_count();
  if (np > 64)
    throw std::invalid_argument(
        "estimator: baseline gradient supports at most 64 parameters");

  Eigen::VectorXd grad(np);
  Eigen::VectorXd& phi = gen.params();
  for (int i = 0; i < np; ++i) {
    const double orig = phi[i];
    const double h = cfg.fd_step * (1.0 + std::abs(orig));
    phi[i] = orig + h;
    const double lp =
        pipeline_f_divergence(f, gen, data, cfg, seed, frozen).value;
    phi[i] = orig - h;
    const double lm =
        pipeline_f_divergence(f, gen, data, cfg, seed, frozen).value;
    phi[i] = orig;
    grad[i] = (lp - lm) / (2.0 * h);
  }
  if (loss_out)
    *loss_out = pipeline_f_divergence(f, gen, data, cfg, seed, frozen).value;
  return grad;
}

}  // namespace bregmn
