#include "bregmn/artifacts.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace bregmn {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("artifacts: cannot write " + path);
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_loss_csv(const std::string& path, const TrainState& st) {
  std::ofstream out = open_out(path);
  out << "step,loss,grad_norm,wall_ms\n";
  for (std::size_t i = 0; i < st.loss.size(); ++i)
    out << i << ',' << format_double(st.loss[i]) << ','
        << format_double(st.grad_norm[i]) << ",0\n";
}

void write_samples_csv(const std::string& path, const Eigen::MatrixXd& samples) {
  std::ofstream out = open_out(path);
  for (Eigen::Index a = 0; a < samples.cols(); ++a)
    out << (a ? "," : "") << 'x' << a;
  out << '\n';
  for (Eigen::Index i = 0; i < samples.rows(); ++i) {
    for (Eigen::Index a = 0; a < samples.cols(); ++a)
      out << (a ? "," : "") << format_double(samples(i, a));
    out << '\n';
  }
}

void write_signal_csv(const std::string& path,
                      const std::vector<SignalRow>& rows) {
  std::ofstream out = open_out(path);
  out << "theta,js_grad,breg_grad,breg_value\n";
  for (const SignalRow& r : rows)
    out << format_double(r.theta) << ',' << format_double(r.js_grad) << ','
        << format_double(r.breg_grad) << ',' << format_double(r.breg_value)
        << '\n';
}

void write_state_json(const std::string& path, const ExperimentConfig& cfg,
                      const TrainState& st, const RunRecord& rec) {
  nlohmann::json j;
  j["config"] = nlohmann::json::parse(serialize_config(cfg));
  j["config_hash"] = rec.config_hash;
  j["version"] = rec.version;
  j["experiment"] = rec.experiment;
  j["csv_paths"] = rec.csv_paths;
  j["metrics"] = rec.metrics;
  j["wall_seconds"] = rec.wall_seconds;
  j["steps"] = st.step;
  j["converged"] = st.converged;
  j["aborted"] = st.aborted;
  if (st.aborted) j["abort_reason"] = st.abort_reason;
  j["seed"] = st.seed;
  std::vector<double> phi(st.phi.data(), st.phi.data() + st.phi.size());
  j["phi"] = phi;

  std::ofstream out = open_out(path);
  out << j.dump(2) << '\n';
}

std::string prop1_to_json(const Prop1Report& r) {
  nlohmann::json j;
  j["lhs"] = r.lhs;
  j["lhs_se"] = r.lhs_se;
  j["w2"] = r.w2;
  j["entropy_gap"] = r.entropy_gap;
  j["e_norm_p"] = r.e_norm_p;
  j["e_norm_q"] = r.e_norm_q;
  j["c"] = r.c;
  j["rhs"] = r.rhs;
  j["slack"] = r.slack;
  j["sigma2"] = r.sigma2;
  j["violated"] = r.violated;
  return j.dump(2);
}

}  // namespace bregmn
