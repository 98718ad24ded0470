#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fpad/features.hpp"

namespace fpad {

std::vector<double> default_c_grid();

struct TrainConfig {
  double C = 100.0;
  std::vector<double> c_grid = default_c_grid();
  double tolerance = 1e-6;
  int max_epochs = 10000;
  std::uint64_t seed = 0;
};

// score(d) = 1 / (1 + exp(A*d + B)), increasing in d whenever A < 0.
struct Calibration {
  double A = -1.0;
  double B = 0.0;
};

struct SvmModel {
  Eigen::VectorXd w;
  double b = 0.0;
  double C = 0.0;
  std::optional<Descriptor> descriptor;
  Calibration calib;
  std::string train_fingerprint;
  std::string version = "fpad.model/1";
};

// Squared-hinge primal objective: 0.5*|w|^2 + C * sum max(0, 1 - y*(w.x + b))^2.
double svm_objective(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double C,
                     const Eigen::VectorXd& w, double b);

// Rows of X are samples; y entries are +1 (spoof) or -1 (live). The bias is
// fit jointly but left out of the regularizer.
SvmModel train_l2svm(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                     const TrainConfig& cfg);

double decision_value(const SvmModel& model, const Eigen::VectorXd& x);
double decision_value(const SvmModel& model, const FeatureVector& x);

// Fits the logistic score map on holdout decision values, then guarantees the
// score is monotone increasing in the decision value.
SvmModel calibrate(SvmModel model, const Eigen::MatrixXd& X_holdout,
                   const Eigen::VectorXd& y_holdout);

double calibrated_score(const Calibration& calib, double decision);
double calibrated_score(const SvmModel& model, const FeatureVector& x);

// Mean validation accuracy over k stratified folds per grid value; ties go to
// the smaller C.
double select_C(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const TrainConfig& cfg,
                int k = 5);

void save_model(const SvmModel& model, const std::filesystem::path& path);
SvmModel load_model(const std::filesystem::path& path);

std::uint64_t fnv1a64(const void* data, std::size_t size);
std::uint64_t fnv1a64_file(const std::filesystem::path& path);

}  // namespace fpad
