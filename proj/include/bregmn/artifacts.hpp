#pragma once

#include <string>
#include <vector>

#include "bregmn/base_measure.hpp"
#include "bregmn/config.hpp"
#include "bregmn/geometry.hpp"
#include "bregmn/trainer.hpp"

namespace bregmn {

// CSV/JSON artifact writers. CSVs use a header row, '.' decimals with
// %.17g (round-trip exact), and '\n' line endings; identical runs produce
// byte-identical files, so the per-step wall clock stays out of them.

void write_loss_csv(const std::string& path, const TrainState& st);

void write_samples_csv(const std::string& path, const Eigen::MatrixXd& samples);

void write_signal_csv(const std::string& path,
                      const std::vector<SignalRow>& rows);

void write_state_json(const std::string& path, const ExperimentConfig& cfg,
                      const TrainState& st, const RunRecord& rec);

std::string prop1_to_json(const Prop1Report& r);

std::string format_double(double v);  // %.17g

}  // namespace bregmn
