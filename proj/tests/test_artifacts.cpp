#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"

#include "bregmn/artifacts.hpp"

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("bregmn_test_" + std::to_string(std::rand()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace

TEST_CASE("artifacts: loss csv layout and wall-clock independence") {
  bregmn::TrainState st;
  st.step = 2;
  st.loss = {1.5, 0.25};
  st.grad_norm = {3.0, 0.125};
  st.wall_ms = {17.0, 23.0};  // varies run to run; must not reach the file

  TempDir tmp;
  const auto p = tmp.path / "loss.csv";
  bregmn::write_loss_csv(p.string(), st);
  const std::string a = slurp(p);
  CHECK(a ==
        "step,loss,grad_norm,wall_ms\n"
        "0,1.5,3,0\n"
        "1,0.25,0.125,0\n");

  st.wall_ms = {99.0, 1.0};
  bregmn::write_loss_csv(p.string(), st);
  CHECK(slurp(p) == a);
}

TEST_CASE("artifacts: doubles are written round-trip exact") {
  const double v = 0.1 + 0.2;
  const std::string s = bregmn::format_double(v);
  CHECK(std::stod(s) == v);
  CHECK(bregmn::format_double(1.0) == "1");
  CHECK(std::stod(bregmn::format_double(1e300)) == 1e300);
}

TEST_CASE("artifacts: samples csv has one header and n rows") {
  Eigen::MatrixXd x(3, 2);
  x << 1, 2, 3, 4, 5, 6;
  TempDir tmp;
  const auto p = tmp.path / "s.csv";
  bregmn::write_samples_csv(p.string(), x);
  const std::string text = slurp(p);
  CHECK(text == "x0,x1\n1,2\n3,4\n5,6\n");
}

TEST_CASE("artifacts: state json embeds the resolved config and final phi") {
  bregmn::ExperimentConfig cfg;
  cfg.experiment = "unit";
  cfg.seed = 5;
  bregmn::TrainState st;
  st.step = 1;
  st.loss = {0.5};
  st.grad_norm = {1.0};
  st.phi = Eigen::VectorXd::Constant(1, 2.5);
  st.seed = 5;
  bregmn::RunRecord rec;
  rec.experiment = "unit";
  rec.config_hash = bregmn::config_hash(cfg);
  rec.metrics["final_loss"] = 0.5;

  TempDir tmp;
  const auto p = tmp.path / "state.json";
  bregmn::write_state_json(p.string(), cfg, st, rec);
  const std::string text = slurp(p);
  CHECK(text.find("\"experiment\"") != std::string::npos);
  CHECK(text.find("\"config\"") != std::string::npos);
  CHECK(text.find("\"config_hash\"") != std::string::npos);
  CHECK(text.find("2.5") != std::string::npos);
  CHECK(text.find(bregmn::kArtifactVersion) != std::string::npos);
}
