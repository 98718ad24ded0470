#include "fpad/svm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include "json.hpp"

#include "fpad/rng.hpp"

namespace fpad {
namespace {

using json = nlohmann::ordered_json;

void check_training_input(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  if (X.rows() != y.size())
    raise(Errc::DimensionMismatch, "label count does not match sample count");
  if (X.rows() < 2) raise(Errc::InsufficientData, "training needs at least two samples");
  if (!X.allFinite()) raise(Errc::InvalidData, "non-finite feature values");
  bool pos = false, neg = false;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (y(i) == 1.0)
      pos = true;
    else if (y(i) == -1.0)
      neg = true;
    else
      raise(Errc::InvalidData, "labels must be +1 or -1");
  }
  if (!pos || !neg) raise(Errc::DegenerateLabels, "training set contains a single class");
}

struct ObjectiveState {
  double value = 0.0;
  Eigen::VectorXd margins;  // 1 - y*(X w + b), any sign
};

ObjectiveState evaluate(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double C,
                        const Eigen::VectorXd& w, double b) {
  ObjectiveState st;
  st.margins = 1.0 - (y.array() * ((X * w).array() + b));
  const double hinge = st.margins.array().max(0.0).square().sum();
  st.value = 0.5 * w.squaredNorm() + C * hinge;
  return st;
}

// Newton step via conjugate gradients on the active-set Hessian
// H = [[I + 2C Xa' Xa, 2C Xa' 1], [2C 1' Xa, 2C |A|]], which is positive
// definite in the w block, so every truncated solution is a descent direction.
void newton_direction(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double C,
                      const Eigen::VectorXd& active, const Eigen::VectorXd& gw, double gb,
                      double forcing, Eigen::VectorXd& dw, double& db) {
  const Eigen::Index d = X.cols();
  dw.setZero(d);
  db = 0.0;
  Eigen::VectorXd rw = -gw;
  double rb = -gb;
  Eigen::VectorXd pw = rw;
  double pb = rb;
  double rr = rw.squaredNorm() + rb * rb;
  const double target = forcing * forcing * rr;
  const int max_cg = static_cast<int>(std::min<Eigen::Index>(d + 1, 250));
  for (int it = 0; it < max_cg && rr > target && rr > 0.0; ++it) {
    const Eigen::VectorXd u = (active.array() * ((X * pw).array() + pb)).matrix();
    const Eigen::VectorXd hw = pw + 2.0 * C * (X.transpose() * u);
    const double hb = 2.0 * C * u.sum();
    const double curvature = pw.dot(hw) + pb * hb;
    if (curvature <= 0.0) break;
    const double alpha = rr / curvature;
    dw += alpha * pw;
    db += alpha * pb;
    rw -= alpha * hw;
    rb -= alpha * hb;
    const double rr_next = rw.squaredNorm() + rb * rb;
    const double beta = rr_next / rr;
    pw = rw + beta * pw;
    pb = rb + beta * pb;
    rr = rr_next;
  }
}

int predict_sign(const Eigen::VectorXd& w, double b, const Eigen::VectorXd& x) {
  return w.dot(x) + b >= 0.0 ? 1 : -1;
}

double logistic_nll(const Eigen::VectorXd& d, const Eigen::VectorXd& t, double A, double B) {
  double nll = 0.0;
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    const double z = A * d(i) + B;
    // ln(1 + e^z) - (1 - t) z, computed from the non-positive side.
    if (z >= 0.0)
      nll += t(i) * z + std::log1p(std::exp(-z));
    else
      nll += -(1.0 - t(i)) * z + std::log1p(std::exp(z));
  }
  return nll;
}

}  // namespace

std::vector<double> default_c_grid() {
  std::vector<double> grid;
  for (int e = -5; e <= 5; ++e) grid.push_back(std::pow(10.0, e));
  return grid;
}

double svm_objective(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double C,
                     const Eigen::VectorXd& w, double b) {
  return evaluate(X, y, C, w, b).value;
}

SvmModel train_l2svm(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                     const TrainConfig& cfg) {
  check_training_input(X, y);
  if (cfg.C <= 0.0) raise(Errc::InvalidArgument, "C must be positive");
  if (cfg.tolerance <= 0.0) raise(Errc::InvalidArgument, "tolerance must be positive");

  const Eigen::Index d = X.cols();
  Eigen::VectorXd w = Eigen::VectorXd::Zero(d);
  double b = 0.0;
  ObjectiveState st = evaluate(X, y, cfg.C, w, b);

  Eigen::VectorXd dw(d);
  double g0_norm = -1.0;
  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    const Eigen::VectorXd active =
        (st.margins.array() > 0.0).cast<double>().matrix();
    const Eigen::VectorXd weighted =
        (active.array() * st.margins.array() * y.array()).matrix();
    const Eigen::VectorXd gw = w - 2.0 * cfg.C * (X.transpose() * weighted);
    const double gb = -2.0 * cfg.C * weighted.sum();
    const double g_norm = std::sqrt(gw.squaredNorm() + gb * gb);
    if (g0_norm < 0.0) g0_norm = g_norm;
    if (g_norm <= cfg.tolerance * std::max(1.0, g0_norm)) break;

    const double forcing = std::min(0.5, std::sqrt(g_norm / std::max(g0_norm, 1e-300)));
    double db = 0.0;
    newton_direction(X, y, cfg.C, active, gw, gb, forcing, dw, db);

    const double slope = gw.dot(dw) + gb * db;
    if (slope >= 0.0) break;
    double step = 1.0;
    bool moved = false;
    for (int ls = 0; ls < 60; ++ls) {
      const ObjectiveState trial = evaluate(X, y, cfg.C, w + step * dw, b + step * db);
      if (trial.value <= st.value + 1e-4 * step * slope) {
        w += step * dw;
        b += step * db;
        st = trial;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
  }

  SvmModel model;
  model.w = std::move(w);
  model.b = b;
  model.C = cfg.C;
  return model;
}

double decision_value(const SvmModel& model, const Eigen::VectorXd& x) {
  if (x.size() != model.w.size())
    raise(Errc::DimensionMismatch, "feature dimension does not match model");
  return model.w.dot(x) + model.b;
}

double decision_value(const SvmModel& model, const FeatureVector& x) {
  if (!model.descriptor || *model.descriptor != x.descriptor)
    raise(Errc::DescriptorMismatch, "feature descriptor does not match model");
  return decision_value(model, x.values);
}

SvmModel calibrate(SvmModel model, const Eigen::MatrixXd& X_holdout,
                   const Eigen::VectorXd& y_holdout) {
  if (X_holdout.rows() != y_holdout.size())
    raise(Errc::DimensionMismatch, "label count does not match sample count");
  Eigen::Index n_pos = 0, n_neg = 0;
  for (Eigen::Index i = 0; i < y_holdout.size(); ++i) {
    if (y_holdout(i) == 1.0)
      ++n_pos;
    else if (y_holdout(i) == -1.0)
      ++n_neg;
    else
      raise(Errc::InvalidData, "labels must be +1 or -1");
  }
  if (n_pos == 0 || n_neg == 0)
    raise(Errc::DegenerateLabels, "calibration holdout contains a single class");

  Eigen::VectorXd d(X_holdout.rows());
  for (Eigen::Index i = 0; i < X_holdout.rows(); ++i)
    d(i) = model.w.dot(X_holdout.row(i)) + model.b;

  // Smoothed targets keep the likelihood bounded on separable holdouts.
  const double t_pos = (n_pos + 1.0) / (n_pos + 2.0);
  const double t_neg = 1.0 / (n_neg + 2.0);
  Eigen::VectorXd t(y_holdout.size());
  for (Eigen::Index i = 0; i < y_holdout.size(); ++i)
    t(i) = y_holdout(i) == 1.0 ? t_pos : t_neg;

  double A = 0.0;
  double B = std::log((n_neg + 1.0) / (n_pos + 1.0));
  double nll = logistic_nll(d, t, A, B);
  for (int iter = 0; iter < 100; ++iter) {
    double gA = 0.0, gB = 0.0, hAA = 1e-12, hAB = 0.0, hBB = 1e-12;
    for (Eigen::Index i = 0; i < d.size(); ++i) {
      const double z = A * d(i) + B;
      const double p = z >= 0.0 ? std::exp(-z) / (1.0 + std::exp(-z))
                                : 1.0 / (1.0 + std::exp(z));
      const double r = t(i) - p;
      gA += r * d(i);
      gB += r;
      const double pq = p * (1.0 - p);
      hAA += pq * d(i) * d(i);
      hAB += pq * d(i);
      hBB += pq;
    }
    if (std::max(std::abs(gA), std::abs(gB)) < 1e-10) break;
    const double det = hAA * hBB - hAB * hAB;
    double dA = -(hBB * gA - hAB * gB) / det;
    double dB = -(hAA * gB - hAB * gA) / det;
    double step = 1.0;
    bool moved = false;
    for (int ls = 0; ls < 60; ++ls) {
      const double trial = logistic_nll(d, t, A + step * dA, B + step * dB);
      if (trial < nll) {
        A += step * dA;
        B += step * dB;
        nll = trial;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
  }

  if (A >= 0.0) {
    // Anti-predictive or flat holdout: pin a vanishing slope of the right
    // sign and refit the intercept so the score stays increasing in d.
    A = -1e-12;
    B = 0.0;
    nll = logistic_nll(d, t, A, B);
    for (int iter = 0; iter < 100; ++iter) {
      double gB = 0.0, hBB = 1e-12;
      for (Eigen::Index i = 0; i < d.size(); ++i) {
        const double z = A * d(i) + B;
        const double p = z >= 0.0 ? std::exp(-z) / (1.0 + std::exp(-z))
                                  : 1.0 / (1.0 + std::exp(z));
        gB += t(i) - p;
        hBB += p * (1.0 - p);
      }
      if (std::abs(gB) < 1e-10) break;
      double step = 1.0, dB = -gB / hBB;
      bool moved = false;
      for (int ls = 0; ls < 60; ++ls) {
        const double trial = logistic_nll(d, t, A, B + step * dB);
        if (trial < nll) {
          B += step * dB;
          nll = trial;
          moved = true;
          break;
        }
        step *= 0.5;
      }
      if (!moved) break;
    }
  }

  model.calib = {A, B};
  return model;
}

double calibrated_score(const Calibration& calib, double decision) {
  double z = calib.A * decision + calib.B;
  z = std::clamp(z, -500.0, 500.0);
  return 1.0 / (1.0 + std::exp(z));
}

double calibrated_score(const SvmModel& model, const FeatureVector& x) {
  return calibrated_score(model.calib, decision_value(model, x));
}

double select_C(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const TrainConfig& cfg,
                int k) {
  check_training_input(X, y);
  if (cfg.c_grid.empty()) raise(Errc::InvalidArgument, "C grid is empty");
  if (k < 2) raise(Errc::InvalidArgument, "cross-validation needs k >= 2");
  const Eigen::Index n = X.rows();
  if (n < k) raise(Errc::DegenerateLabels, "fewer samples than folds");

  std::vector<int> pos, neg;
  for (Eigen::Index i = 0; i < n; ++i) (y(i) == 1.0 ? pos : neg).push_back(static_cast<int>(i));
  if (pos.size() < 2 || neg.size() < 2)
    raise(Errc::DegenerateLabels, "each class needs at least two samples for stratified folds");

  std::mt19937_64 rng(cfg.seed);
  deterministic_shuffle(pos, rng);
  deterministic_shuffle(neg, rng);
  std::vector<int> fold_of(n);
  for (std::size_t i = 0; i < pos.size(); ++i) fold_of[pos[i]] = static_cast<int>(i % k);
  for (std::size_t i = 0; i < neg.size(); ++i) fold_of[neg[i]] = static_cast<int>(i % k);

  std::vector<double> grid = cfg.c_grid;
  std::sort(grid.begin(), grid.end());
  for (double c : grid)
    if (c <= 0.0) raise(Errc::InvalidArgument, "C grid values must be positive");

  double best_c = grid.front();
  double best_acc = -1.0;
  for (double c : grid) {
    double acc_sum = 0.0;
    for (int f = 0; f < k; ++f) {
      std::vector<int> train_idx, val_idx;
      for (Eigen::Index i = 0; i < n; ++i)
        (fold_of[i] == f ? val_idx : train_idx).push_back(static_cast<int>(i));
      Eigen::MatrixXd Xt(train_idx.size(), X.cols());
      Eigen::VectorXd yt(train_idx.size());
      for (std::size_t i = 0; i < train_idx.size(); ++i) {
        Xt.row(i) = X.row(train_idx[i]);
        yt(i) = y(train_idx[i]);
      }
      TrainConfig fold_cfg = cfg;
      fold_cfg.C = c;
      const SvmModel m = train_l2svm(Xt, yt, fold_cfg);
      int correct = 0;
      for (int i : val_idx)
        if (predict_sign(m.w, m.b, X.row(i)) == static_cast<int>(y(i))) ++correct;
      acc_sum += val_idx.empty() ? 0.0 : static_cast<double>(correct) / val_idx.size();
    }
    const double acc = acc_sum / k;
    if (acc > best_acc) {
      best_acc = acc;
      best_c = c;
    }
  }
  return best_c;
}

void save_model(const SvmModel& model, const std::filesystem::path& path) {
  if (!model.descriptor) raise(Errc::InvalidArgument, "model has no descriptor to persist");
  if (model.w.size() != descriptor_dim(*model.descriptor))
    raise(Errc::DimensionMismatch, "weight dimension does not match descriptor");
  json j;
  j["version"] = model.version;
  j["descriptor"] = to_string(*model.descriptor);
  j["C"] = model.C;
  j["w"] = std::vector<double>(model.w.data(), model.w.data() + model.w.size());
  j["b"] = model.b;
  j["calib"] = {{"A", model.calib.A}, {"B", model.calib.B}};
  j["train_fingerprint"] = model.train_fingerprint;
  std::ofstream out(path);
  if (!out) raise(Errc::IoError, "cannot open for writing: " + path.string());
  out << j.dump(2) << '\n';
  if (!out) raise(Errc::IoError, "write failed: " + path.string());
}

SvmModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) raise(Errc::IoError, "cannot open: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    raise(Errc::ParseError, path.string() + ": " + e.what());
  }
  SvmModel model;
  try {
    model.version = j.at("version").get<std::string>();
    model.descriptor = parse_descriptor(j.at("descriptor").get<std::string>());
    model.C = j.at("C").get<double>();
    const auto w = j.at("w").get<std::vector<double>>();
    model.w = Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
    model.b = j.at("b").get<double>();
    model.calib.A = j.at("calib").at("A").get<double>();
    model.calib.B = j.at("calib").at("B").get<double>();
    model.train_fingerprint = j.at("train_fingerprint").get<std::string>();
  } catch (const json::exception& e) {
    raise(Errc::ParseError, path.string() + ": " + e.what());
  }
  if (model.version != "fpad.model/1")
    raise(Errc::ParseError, "unsupported model version: " + model.version);
  if (model.w.size() != descriptor_dim(*model.descriptor))
    raise(Errc::ParseError, "weight dimension does not match descriptor");
  return model;
}

std::uint64_t fnv1a64(const void* data, std::size_t size) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  std::uint64_t hash = 14695981039346656037ull;
  for (std::size_t i = 0; i < size; ++i) {
    hash ^= bytes[i];
    hash *= 1099511628211ull;
  }
  return hash;
}

std::uint64_t fnv1a64_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(Errc::IoError, "cannot open: " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return fnv1a64(bytes.data(), bytes.size());
}

}  // namespace fpad
