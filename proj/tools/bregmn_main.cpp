#include <Eigen/Core>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>

#include "CLI11.hpp"

#include "bregmn/artifacts.hpp"
#include "bregmn/divergence.hpp"
#include "bregmn/geometry.hpp"

namespace {

using namespace bregmn;

struct CommonArgs {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool quiet = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "experiment config (JSON)")
      ->required();
  cmd->add_option("--seed", args.seed, "override the config seed");
  cmd->add_option("--out", args.out, "override the config output directory");
  cmd->add_flag("--quiet", args.quiet, "suppress progress output");
}

ExperimentConfig load(const CommonArgs& args) {
  ExperimentConfig cfg = load_config(args.config_path);
  if (args.seed) cfg.seed = *args.seed;
  if (!args.out.empty()) cfg.out_dir = args.out;
  return cfg;
}

std::filesystem::path ensure_out_dir(const ExperimentConfig& cfg) {
  std::filesystem::path dir =
      cfg.out_dir.empty() ? std::filesystem::path("runs") / cfg.experiment
                          : std::filesystem::path(cfg.out_dir);
  std::filesystem::create_directories(dir);
  return dir;
}

const MeasureSpec& require_model(const ExperimentConfig& cfg) {
  if (!cfg.model) throw ConfigError("config: this command needs a 'model' measure");
  return *cfg.model;
}

int cmd_divergence(const CommonArgs& args) {
  const ExperimentConfig cfg = load(args);
  const Measure p = build_measure(cfg.data);
  const Measure q = build_measure(require_model(cfg));
  const Measure m =
      cfg.base_measure ? build_measure(*cfg.base_measure) : q;
  const ConvexGenerator& f = ConvexGenerator::by_name(cfg.f);

  const QuadratureGrid grid = grid_for({&p, &q, &m}, cfg.grid_points);
  const double fd = f_divergence(f, p, q, grid);
  const double sep = separable_bregman(f, p, q, grid);
  const double sb = scaled_bregman(f, p, q, m, grid);

  std::cout << "f_divergence: " << format_double(fd) << '\n'
            << "separable_bregman: " << format_double(sep) << '\n'
            << "scaled_bregman: " << format_double(sb) << '\n';
  if (!cfg.out_dir.empty()) {
    const auto dir = ensure_out_dir(cfg);
    std::ofstream out(dir / "divergence.json");
    out << "{\n  \"f_divergence\": " << format_double(fd)
        << ",\n  \"separable_bregman\": " << format_double(sep)
        << ",\n  \"scaled_bregman\": " << format_double(sb) << "\n}\n";
  }
  return 0;
}

int cmd_dre_fit(const CommonArgs& args) {
  const ExperimentConfig cfg = load(args);
  const Measure p = build_measure(cfg.data);
  const Measure q = build_measure(require_model(cfg));
  const PipelineConfig pipe = to_pipeline(cfg);

  Rng r_p = make_rng(cfg.seed, {stream::kData});
  Rng r_q = make_rng(cfg.seed, {stream::kGenNoise});
  const Eigen::MatrixXd xp = p.sample(pipe.n_fit, r_p);
  const Eigen::MatrixXd xq = q.sample(pipe.n_fit, r_q);

  RatioModel model;
  if (pipe.dre == DreKind::Mmd) {
    model = fit_mmd_ratio(xp, xq, pipe.kernel);
  } else {
    Rng r_init = make_rng(cfg.seed, {stream::kDreInit, 1});
    model = fit_discriminator_ratio(xp, xq, pipe.disc, r_init);
  }

  Rng r_eval = make_rng(cfg.seed, {stream::kEval});
  const Eigen::MatrixXd held = q.sample(512, r_eval);
  const Eigen::VectorXd r = model.eval_batch(held);
  std::cout << "mean_ratio_on_denominator: " << format_double(r.mean())
            << '\n';

  if (!cfg.out_dir.empty()) {
    const auto dir = ensure_out_dir(cfg);
    std::ofstream out(dir / "ratio_fit.csv", std::ios::binary);
    for (Eigen::Index a = 0; a < held.cols(); ++a) out << 'x' << a << ',';
    out << "r_hat\n";
    for (Eigen::Index i = 0; i < held.rows(); ++i) {
      for (Eigen::Index a = 0; a < held.cols(); ++a)
        out << format_double(held(i, a)) << ',';
      out << format_double(r[i]) << '\n';
    }
  }
  return 0;
}

int run_training(const CommonArgs& args, bool baseline) {
  const ExperimentConfig cfg = load(args);
  const auto t0 = std::chrono::steady_clock::now();
  const TrainState st =
      baseline ? train_f_divergence_baseline(cfg) : train(cfg);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();

  const auto dir = ensure_out_dir(cfg);
  RunRecord rec;
  rec.experiment = cfg.experiment;
  rec.config_hash = config_hash(cfg);
  rec.wall_seconds = wall;
  rec.csv_paths = {(dir / "loss.csv").string(),
                   (dir / "samples_final.csv").string()};
  if (!st.loss.empty()) {
    rec.metrics["final_loss"] = st.loss.back();
    rec.metrics["final_grad_norm"] = st.grad_norm.back();
  }
  rec.metrics["steps"] = st.step;
  rec.metrics["converged"] = st.converged ? 1.0 : 0.0;
  if (st.phi.size() == 1) rec.metrics["theta_final"] = st.phi[0];

  write_loss_csv(dir / "loss.csv", st);
  Rng r_final = make_rng(cfg.seed, {stream::kEval, 0xF1AEu});
  write_samples_csv(dir / "samples_final.csv",
                    st.generator->push(st.generator->sample_noise(2000, r_final)));
  write_state_json(dir / "state.json", cfg, st, rec);

  if (!args.quiet) {
    std::cout << "steps: " << st.step << '\n';
    if (!st.loss.empty())
      std::cout << "final_loss: " << format_double(st.loss.back()) << '\n';
    std::cout << "phi:";
    for (Eigen::Index i = 0; i < std::min<Eigen::Index>(st.phi.size(), 8); ++i)
      std::cout << ' ' << format_double(st.phi[i]);
    std::cout << (st.phi.size() > 8 ? " ...\n" : "\n");
  }
  if (st.aborted) {
    std::cerr << "error: " << st.abort_reason << '\n';
    return 1;
  }
  return 0;
}

int cmd_verify_prop1(const CommonArgs& args) {
  const ExperimentConfig cfg = load(args);
  const Measure p = build_measure(cfg.data);
  const Measure q = build_measure(require_model(cfg));
  Rng rng = make_rng(cfg.seed, {stream::kEval});
  const Prop1Report rep = verify_prop1(p, q, cfg.sigma2, cfg.n_mc, rng);
  const std::string text = prop1_to_json(rep);
  std::cout << text << '\n';
  if (!cfg.out_dir.empty()) {
    const auto dir = ensure_out_dir(cfg);
    std::ofstream out(dir / "prop1.json");
    out << text << '\n';
  }
  return rep.violated ? 1 : 0;
}

int cmd_support_signal(const CommonArgs& args) {
  const ExperimentConfig cfg = load(args);
  if (cfg.thetas.empty())
    throw ConfigError("config: support-signal needs a non-empty 'thetas' sweep");
  if (cfg.generator.family != "uniform-shift")
    throw ConfigError("config: support-signal sweeps the uniform-shift family");
  const Measure p = build_measure(cfg.data);
  const ConvexGenerator& f = ConvexGenerator::by_name(cfg.f);
  const double width = cfg.generator.width;
  const auto family = [width](double theta) {
    return Measure::uniform_box(Eigen::VectorXd::Constant(1, theta),
                                Eigen::VectorXd::Constant(1, theta + width));
  };

  const std::vector<SignalRow> rows =
      support_signal_check(p, family, cfg.thetas, f, to_pipeline(cfg),
                           SignalSource::Pipeline, cfg.seed,
                           cfg.estimator.fd_step);

  if (!args.quiet) {
    std::cout << "theta,js_grad,breg_grad,breg_value\n";
    for (const SignalRow& r : rows)
      std::cout << format_double(r.theta) << ',' << format_double(r.js_grad)
                << ',' << format_double(r.breg_grad) << ','
                << format_double(r.breg_value) << '\n';
  }
  if (!cfg.out_dir.empty())
    write_signal_csv((ensure_out_dir(cfg) / "signal.csv").string(), rows);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* threads = std::getenv("BREGMN_THREADS"))
    Eigen::setNbThreads(std::max(1, std::atoi(threads)));

  CLI::App app{"scaled-Bregman divergence toolkit: exact divergences, "
               "density-ratio estimation, and generative training"};
  app.require_subcommand(1);

  CommonArgs divergence_args, dre_args, train_args, baseline_args, prop1_args,
      signal_args;
  add_common(app.add_subcommand("divergence",
                                "quadrature divergences for a measure triple"),
             divergence_args);
  add_common(app.add_subcommand("dre-fit", "fit a density-ratio model"),
             dre_args);
  add_common(app.add_subcommand("train", "scaled-Bregman generator training"),
             train_args);
  add_common(app.add_subcommand("baseline-train",
                                "f-divergence baseline training"),
             baseline_args);
  add_common(app.add_subcommand("verify-prop1",
                                "check the Wasserstein smoothness bound"),
             prop1_args);
  add_common(app.add_subcommand("support-signal",
                                "gradient-signal sweep over a support gap"),
             signal_args);

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("divergence")) return cmd_divergence(divergence_args);
    if (app.got_subcommand("dre-fit")) return cmd_dre_fit(dre_args);
    if (app.got_subcommand("train")) return run_training(train_args, false);
    if (app.got_subcommand("baseline-train"))
      return run_training(baseline_args, true);
    if (app.got_subcommand("verify-prop1")) return cmd_verify_prop1(prop1_args);
    if (app.got_subcommand("support-signal"))
      return cmd_support_signal(signal_args);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
