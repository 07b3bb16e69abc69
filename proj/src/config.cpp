#include "bregmn/config.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace bregmn {

namespace {

using nlohmann::json;

void check_keys(const json& j, const std::string& path,
                std::initializer_list<const char*> allowed) {
  if (!j.is_object())
    throw ConfigError("config: expected an object at " + path);
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed)
      if (it.key() == a) {
        ok = true;
        break;
      }
    if (!ok)
      throw ConfigError("config: unknown key '" + it.key() + "' at " + path);
  }
}

template <typename T>
void read(const json& j, const std::string& path, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config: bad value for '" + std::string(key) + "' at " +
                      path);
  }
}

MeasureSpec parse_measure(const json& j, const std::string& path) {
  check_keys(j, path,
             {"kind", "mean", "var", "cov", "lo", "hi", "weights", "components"});
  MeasureSpec m;
  read(j, path, "kind", m.kind);
  read(j, path, "mean", m.mean);
  read(j, path, "var", m.var);
  read(j, path, "cov", m.cov);
  read(j, path, "lo", m.lo);
  read(j, path, "hi", m.hi);
  read(j, path, "weights", m.weights);
  if (j.contains("components")) {
    const json& comps = j.at("components");
    if (!comps.is_array())
      throw ConfigError("config: 'components' must be an array at " + path);
    int i = 0;
    for (const json& c : comps)
      m.components.push_back(
          parse_measure(c, path + ".components[" + std::to_string(i++) + "]"));
  }
  return m;
}

json measure_to_json(const MeasureSpec& m) {
  json j;
  j["kind"] = m.kind;
  if (m.kind == "gaussian") {
    j["mean"] = m.mean;
    if (m.cov.empty())
      j["var"] = m.var;
    else
      j["cov"] = m.cov;
  } else if (m.kind == "uniform" || m.kind == "flat") {
    j["lo"] = m.lo;
    j["hi"] = m.hi;
  } else if (m.kind == "mixture") {
    j["weights"] = m.weights;
    json comps = json::array();
    for (const MeasureSpec& c : m.components) comps.push_back(measure_to_json(c));
    j["components"] = comps;
  }
  return j;
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  check_keys(j, "$",
             {"experiment", "seed", "out_dir", "f", "max_steps", "tol", "data",
              "generator", "base", "dre", "estimator", "optimizer", "model",
              "base_measure", "grid_points", "sigma2", "n_mc", "thetas"});

  ExperimentConfig c;
  read(j, "$", "experiment", c.experiment);
  read(j, "$", "seed", c.seed);
  read(j, "$", "out_dir", c.out_dir);
  read(j, "$", "f", c.f);
  read(j, "$", "max_steps", c.max_steps);
  read(j, "$", "tol", c.tol);
  read(j, "$", "grid_points", c.grid_points);
  read(j, "$", "sigma2", c.sigma2);
  read(j, "$", "n_mc", c.n_mc);
  read(j, "$", "thetas", c.thetas);

  if (j.contains("data")) c.data = parse_measure(j.at("data"), "$.data");
  if (j.contains("model"))
    c.model = parse_measure(j.at("model"), "$.model");
  if (j.contains("base_measure"))
    c.base_measure = parse_measure(j.at("base_measure"), "$.base_measure");

  if (j.contains("generator")) {
    const json& g = j.at("generator");
    check_keys(g, "$.generator",
               {"family", "theta0", "width", "a0", "b0", "noise_dim",
                "out_dim", "widths"});
    read(g, "$.generator", "family", c.generator.family);
    read(g, "$.generator", "theta0", c.generator.theta0);
    read(g, "$.generator", "width", c.generator.width);
    read(g, "$.generator", "a0", c.generator.a0);
    read(g, "$.generator", "b0", c.generator.b0);
    read(g, "$.generator", "noise_dim", c.generator.noise_dim);
    read(g, "$.generator", "out_dim", c.generator.out_dim);
    read(g, "$.generator", "widths", c.generator.widths);
  }
  if (j.contains("base")) {
    const json& b = j.at("base");
    check_keys(b, "$.base", {"alpha", "sigma1", "sigma2"});
    read(b, "$.base", "alpha", c.base.alpha);
    read(b, "$.base", "sigma1", c.base.sigma1);
    read(b, "$.base", "sigma2", c.base.sigma2);
  }
  if (j.contains("dre")) {
    const json& d = j.at("dre");
    check_keys(d, "$.dre", {"kind", "bandwidth", "lambda", "widths", "steps", "lr"});
    read(d, "$.dre", "kind", c.dre.kind);
    if (d.contains("bandwidth")) {
      if (d.at("bandwidth").is_string()) {
        if (d.at("bandwidth").get<std::string>() != "median")
          throw ConfigError(
              "config: bad value for 'bandwidth' at $.dre (number or "
              "\"median\")");
        c.dre.bandwidth = 0.0;
      } else {
        read(d, "$.dre", "bandwidth", c.dre.bandwidth);
      }
    }
    read(d, "$.dre", "lambda", c.dre.lambda);
    read(d, "$.dre", "widths", c.dre.widths);
    read(d, "$.dre", "steps", c.dre.steps);
    read(d, "$.dre", "lr", c.dre.lr);
  }
  if (j.contains("estimator")) {
    const json& e = j.at("estimator");
    check_keys(e, "$.estimator",
               {"n_fit", "n_base", "fd_step", "refit_every", "grad_mode"});
    read(e, "$.estimator", "n_fit", c.estimator.n_fit);
    read(e, "$.estimator", "n_base", c.estimator.n_base);
    read(e, "$.estimator", "fd_step", c.estimator.fd_step);
    read(e, "$.estimator", "refit_every", c.estimator.refit_every);
    read(e, "$.estimator", "grad_mode", c.estimator.grad_mode);
  }
  if (j.contains("optimizer")) {
    const json& o = j.at("optimizer");
    check_keys(o, "$.optimizer",
               {"kind", "lr", "momentum", "clip", "beta1", "beta2", "eps"});
    read(o, "$.optimizer", "kind", c.optimizer.kind);
    read(o, "$.optimizer", "lr", c.optimizer.lr);
    read(o, "$.optimizer", "momentum", c.optimizer.momentum);
    read(o, "$.optimizer", "clip", c.optimizer.clip);
    read(o, "$.optimizer", "beta1", c.optimizer.beta1);
    read(o, "$.optimizer", "beta2", c.optimizer.beta2);
    read(o, "$.optimizer", "eps", c.optimizer.eps);
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& c) {
  json j;
  j["experiment"] = c.experiment;
  j["seed"] = c.seed;
  j["out_dir"] = c.out_dir;
  j["f"] = c.f;
  j["max_steps"] = c.max_steps;
  j["tol"] = c.tol;
  j["data"] = measure_to_json(c.data);
  j["generator"] = {{"family", c.generator.family},
                    {"theta0", c.generator.theta0},
                    {"width", c.generator.width},
                    {"a0", c.generator.a0},
                    {"b0", c.generator.b0},
                    {"noise_dim", c.generator.noise_dim},
                    {"out_dim", c.generator.out_dim},
                    {"widths", c.generator.widths}};
  j["base"] = {{"alpha", c.base.alpha},
               {"sigma1", c.base.sigma1},
               {"sigma2", c.base.sigma2}};
  j["dre"] = {{"kind", c.dre.kind},     {"bandwidth", c.dre.bandwidth},
              {"lambda", c.dre.lambda}, {"widths", c.dre.widths},
              {"steps", c.dre.steps},   {"lr", c.dre.lr}};
  j["estimator"] = {{"n_fit", c.estimator.n_fit},
                    {"n_base", c.estimator.n_base},
                    {"fd_step", c.estimator.fd_step},
                    {"refit_every", c.estimator.refit_every},
                    {"grad_mode", c.estimator.grad_mode}};
  j["optimizer"] = {{"kind", c.optimizer.kind}, {"lr", c.optimizer.lr},
                    {"momentum", c.optimizer.momentum},
                    {"clip", c.optimizer.clip}, {"beta1", c.optimizer.beta1},
                    {"beta2", c.optimizer.beta2}, {"eps", c.optimizer.eps}};
  if (c.model) j["model"] = measure_to_json(*c.model);
  if (c.base_measure) j["base_measure"] = measure_to_json(*c.base_measure);
  if (c.grid_points > 0) j["grid_points"] = c.grid_points;
  j["sigma2"] = c.sigma2;
  j["n_mc"] = c.n_mc;
  if (!c.thetas.empty()) j["thetas"] = c.thetas;
  return j.dump(2);
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
  const std::string s = serialize_config(cfg);
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

Measure build_measure(const MeasureSpec& spec) {
  auto vec = [](const std::vector<double>& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(),
                                             static_cast<Eigen::Index>(v.size()));
  };
  if (spec.kind == "gaussian") {
    if (spec.mean.empty())
      throw ConfigError("config: gaussian measure needs 'mean'");
    const auto d = static_cast<Eigen::Index>(spec.mean.size());
    if (spec.cov.empty()) {
      if (!(spec.var > 0))
        throw ConfigError("config: gaussian 'var' must be positive");
      return Measure::gaussian_iso(vec(spec.mean), spec.var);
    }
    Eigen::MatrixXd cov(d, d);
    if (static_cast<Eigen::Index>(spec.cov.size()) != d)
      throw ConfigError("config: 'cov' shape does not match 'mean'");
    for (Eigen::Index i = 0; i < d; ++i) {
      if (static_cast<Eigen::Index>(spec.cov[static_cast<std::size_t>(i)].size()) != d)
        throw ConfigError("config: 'cov' must be square");
      for (Eigen::Index k = 0; k < d; ++k)
        cov(i, k) = spec.cov[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
    }
    return Measure::gaussian(vec(spec.mean), cov);
  }
  if (spec.kind == "uniform") {
    if (spec.lo.empty() || spec.lo.size() != spec.hi.size())
      throw ConfigError("config: uniform measure needs matching 'lo'/'hi'");
    return Measure::uniform_box(vec(spec.lo), vec(spec.hi));
  }
  if (spec.kind == "flat") {
    if (spec.lo.empty() || spec.lo.size() != spec.hi.size())
      throw ConfigError("config: flat measure needs matching 'lo'/'hi'");
    return Measure::flat(vec(spec.lo), vec(spec.hi));
  }
  if (spec.kind == "mixture") {
    if (spec.weights.size() != spec.components.size() || spec.weights.empty())
      throw ConfigError("config: mixture needs matching weights/components");
    std::vector<Measure> comps;
    comps.reserve(spec.components.size());
    for (const MeasureSpec& c : spec.components) comps.push_back(build_measure(c));
    return Measure::mixture(spec.weights, std::move(comps));
  }
  throw ConfigError("config: unknown measure kind '" + spec.kind + "'");
}

GeneratorModel build_generator(const GeneratorSpec& spec, Rng&& init_rng) {
  if (spec.family == "uniform-shift")
    return GeneratorModel::uniform_shift(spec.theta0, spec.width);
  if (spec.family == "affine") return GeneratorModel::affine(spec.a0, spec.b0);
  if (spec.family == "mlp")
    return GeneratorModel::mlp(spec.noise_dim, spec.widths, spec.out_dim,
                               init_rng);
  throw ConfigError("config: unknown generator family '" + spec.family + "'");
}

PipelineConfig to_pipeline(const ExperimentConfig& cfg) {
  PipelineConfig p;
  p.n_fit = cfg.estimator.n_fit;
  p.n_base = cfg.estimator.n_base;
  p.fd_step = cfg.estimator.fd_step;
  if (cfg.estimator.grad_mode == "auto")
    p.grad_mode = GradMode::Auto;
  else if (cfg.estimator.grad_mode == "fd")
    p.grad_mode = GradMode::FiniteDifference;
  else if (cfg.estimator.grad_mode == "pathwise")
    p.grad_mode = GradMode::Pathwise;
  else
    throw ConfigError("config: unknown grad_mode '" + cfg.estimator.grad_mode +
                      "'");
  if (cfg.dre.kind == "mmd")
    p.dre = DreKind::Mmd;
  else if (cfg.dre.kind == "discriminator")
    p.dre = DreKind::Discriminator;
  else
    throw ConfigError("config: unknown dre kind '" + cfg.dre.kind + "'");
  p.kernel.bandwidth = cfg.dre.bandwidth;
  p.kernel.lambda = cfg.dre.lambda;
  p.disc.widths = cfg.dre.widths;
  p.disc.steps = cfg.dre.steps;
  p.disc.lr = cfg.dre.lr;
  p.alpha = cfg.base.alpha;
  p.sigma2_p = cfg.base.sigma1;
  p.sigma2_q = cfg.base.sigma2;
  if (cfg.estimator.refit_every < 1)
    throw ConfigError("config: refit_every must be >= 1");
  return p;
}

}  // namespace bregmn
