#include "fpad/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>

#include "json.hpp"

#include "fpad/image_io.hpp"
#include "fpad/lbp.hpp"
#include "fpad/raster.hpp"
#include "fpad/rng.hpp"

namespace fpad {
namespace {

using json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::vector<Stream> needed_streams(Experiment e) {
  switch (e) {
    case Experiment::CotsLbp:
      return {Stream::Cots};
    case Experiment::FtirClbp:
      return {Stream::Ftir};
    case Experiment::DirectClbp:
      return {Stream::Direct};
    case Experiment::FusionClbp:
      return {Stream::Ftir, Stream::Direct};
  }
  raise(Errc::InvalidArgument, "unknown experiment");
}

struct Unit {
  Label label = Label::Live;
  std::string material;                     // empty for live
  std::map<Stream, const SampleRecord*> records;
  FeatureVector feature;
  double detect_ms = 0.0;
  int test_fold = -1;
};

RasterImage load_unit_image(const SampleRecord& rec, const std::filesystem::path& root) {
  std::filesystem::path p(rec.image_path);
  if (p.is_relative()) p = root / p;
  return load_image(p);
}

FeatureVector extract_color_feature(const RasterImage& img, Stream stream,
                                    const std::string& id) {
  if (img.channels() != 3)
    raise(Errc::InvalidSpace, "CLBP needs a 3-channel image: " + id);
  return clbp_feature(rgb_to_hsv(img), stream);
}

double population_stdev(const std::vector<double>& xs, double mean) {
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / xs.size());
}

}  // namespace

const char* to_string(Experiment e) {
  switch (e) {
    case Experiment::CotsLbp:
      return "COTS_LBP";
    case Experiment::FtirClbp:
      return "FTIR_CLBP";
    case Experiment::DirectClbp:
      return "DIRECT_CLBP";
    case Experiment::FusionClbp:
      return "FUSION_CLBP";
  }
  return "?";
}

Experiment parse_experiment(const std::string& s) {
  std::string t;
  for (char c : s) t += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (t == "cots_lbp" || t == "cots") return Experiment::CotsLbp;
  if (t == "ftir_clbp" || t == "ftir") return Experiment::FtirClbp;
  if (t == "direct_clbp" || t == "direct") return Experiment::DirectClbp;
  if (t == "fusion_clbp" || t == "fusion") return Experiment::FusionClbp;
  raise(Errc::ParseError, "unknown experiment: " + s);
}

Descriptor experiment_descriptor(Experiment e) {
  switch (e) {
    case Experiment::CotsLbp:
      return Descriptor::Gray54;
    case Experiment::FtirClbp:
    case Experiment::DirectClbp:
      return Descriptor::Clbp486;
    case Experiment::FusionClbp:
      return Descriptor::Fusion972;
  }
  raise(Errc::InvalidArgument, "unknown experiment");
}

EvalReport run_experiment(const std::vector<SampleRecord>& records,
                          const std::filesystem::path& image_root, Experiment experiment,
                          const ExperimentConfig& cfg) {
  const auto streams = needed_streams(experiment);
  std::vector<SampleRecord> filtered;
  for (const auto& rec : records)
    if (std::find(streams.begin(), streams.end(), rec.stream) != streams.end())
      filtered.push_back(rec);
  if (filtered.empty())
    raise(Errc::MissingStream, std::string("manifest has no ") +
                                   to_string(streams.front()) + " records");

  // One unit per acquisition, holding every stream the experiment consumes.
  std::map<std::string, Unit> units;
  std::vector<std::string> unit_order;
  std::map<std::string, std::string> id_to_unit;
  for (const auto& rec : filtered) {
    const std::string key = acquisition_key(rec);
    auto [it, inserted] = units.try_emplace(key);
    if (inserted) {
      it->second.label = rec.label;
      it->second.material = rec.material;
      unit_order.push_back(key);
    }
    if (!it->second.records.emplace(rec.stream, &rec).second)
      raise(Errc::InvalidData,
            "acquisition has two " + std::string(to_string(rec.stream)) +
                " records: " + rec.id);
    id_to_unit[rec.id] = key;
  }
  for (const auto& key : unit_order)
    for (Stream s : streams)
      if (!units.at(key).records.count(s))
        raise(Errc::MissingStream,
              "acquisition is missing its " + std::string(to_string(s)) +
                  " record: " + units.at(key).records.begin()->second->id);

  const FoldPlan plan = make_folds(filtered, cfg.k, cfg.seed);
  for (const auto& fold : plan.folds)
    for (const auto& id : fold.test_ids) units.at(id_to_unit.at(id)).test_fold = fold.fold_index;

  for (const auto& key : unit_order) {
    Unit& unit = units.at(key);
    switch (experiment) {
      case Experiment::CotsLbp: {
        const SampleRecord& rec = *unit.records.at(Stream::Cots);
        RasterImage img = load_unit_image(rec, image_root);
        const auto t0 = Clock::now();
        if (img.channels() == 3) img = to_grayscale(img);
        unit.feature = grayscale_lbp_feature(img, Stream::Cots);
        unit.detect_ms = ms_since(t0);
        break;
      }
      case Experiment::FtirClbp:
      case Experiment::DirectClbp: {
        const Stream s = streams.front();
        const SampleRecord& rec = *unit.records.at(s);
        const RasterImage img = load_unit_image(rec, image_root);
        const auto t0 = Clock::now();
        unit.feature = extract_color_feature(img, s, rec.id);
        unit.detect_ms = ms_since(t0);
        break;
      }
      case Experiment::FusionClbp: {
        const SampleRecord& ftir_rec = *unit.records.at(Stream::Ftir);
        const SampleRecord& direct_rec = *unit.records.at(Stream::Direct);
        const RasterImage ftir_img = load_unit_image(ftir_rec, image_root);
        const RasterImage direct_img = load_unit_image(direct_rec, image_root);
        const auto t0 = Clock::now();
        unit.feature = fuse_features(extract_color_feature(ftir_img, Stream::Ftir, ftir_rec.id),
                                     extract_color_feature(direct_img, Stream::Direct,
                                                           direct_rec.id));
        unit.detect_ms = ms_since(t0);
        break;
      }
    }
  }

  const int dim = descriptor_dim(experiment_descriptor(experiment));
  EvalReport report;
  report.experiment = experiment;
  report.k = cfg.k;
  report.seed = cfg.seed;
  report.fdr_target = cfg.fdr_target;
  report.train_only_materials = plan.train_only_materials;

  std::vector<double> detect_times;
  std::map<std::string, std::vector<double>> class_rate_series;
  std::map<std::string, bool> class_is_live;
  for (int f = 0; f < cfg.k; ++f) {
    std::vector<const Unit*> train_units, test_units;
    for (const auto& key : unit_order) {
      const Unit& u = units.at(key);
      (u.test_fold == f ? test_units : train_units).push_back(&u);
    }

    Eigen::MatrixXd X_train(train_units.size(), dim);
    Eigen::VectorXd y_train(train_units.size());
    for (std::size_t i = 0; i < train_units.size(); ++i) {
      X_train.row(static_cast<Eigen::Index>(i)) = train_units[i]->feature.values;
      y_train(static_cast<Eigen::Index>(i)) =
          train_units[i]->label == Label::Spoof ? 1.0 : -1.0;
    }

    TrainConfig tc = cfg.train;
    tc.seed = mix_seed(cfg.seed, 0x5e1ec7 + static_cast<std::uint64_t>(f));
    if (cfg.select_c) tc.C = select_C(X_train, y_train, tc);
    SvmModel model = train_l2svm(X_train, y_train, tc);
    model = calibrate(std::move(model), X_train, y_train);

    std::vector<double> live_scores, spoof_scores;
    std::map<std::string, std::vector<double>> material_scores;
    for (const Unit* u : test_units) {
      const auto t0 = Clock::now();
      const double score =
          calibrated_score(model.calib, model.w.dot(u->feature.values) + model.b);
      const double score_ms = ms_since(t0);
      detect_times.push_back(u->detect_ms + score_ms);
      if (u->label == Label::Live) {
        live_scores.push_back(score);
      } else {
        spoof_scores.push_back(score);
        material_scores[u->material].push_back(score);
      }
    }

    FoldMetrics fm;
    fm.fold_index = f;
    fm.c_used = tc.C;
    fm.train_units = train_units.size();
    fm.test_units = test_units.size();
    const OperatingPoint op = tdr_at_fdr(live_scores, spoof_scores, cfg.fdr_target);
    fm.tdr = op.tdr;
    fm.threshold = op.threshold;

    std::vector<ClassScores> classes;
    classes.push_back({"LIVE", true, live_scores});
    for (auto& [material, scores] : material_scores)
      classes.push_back({material, false, scores});
    fm.class_rates = per_class_rates(classes);
    for (const auto& cr : fm.class_rates) {
      class_rate_series[cr.name].push_back(cr.correct_rate);
      class_is_live[cr.name] = cr.is_live;
    }
    report.folds.push_back(std::move(fm));
  }

  std::vector<double> fold_tdrs;
  for (const auto& fm : report.folds) fold_tdrs.push_back(fm.tdr);
  report.tdr_mean =
      std::accumulate(fold_tdrs.begin(), fold_tdrs.end(), 0.0) / fold_tdrs.size();
  report.tdr_stdev = population_stdev(fold_tdrs, report.tdr_mean);

  for (const auto& [name, series] : class_rate_series) {
    ClassRateSummary cs;
    cs.name = name;
    cs.is_live = class_is_live[name];
    cs.mean = std::accumulate(series.begin(), series.end(), 0.0) / series.size();
    cs.stdev = population_stdev(series, cs.mean);
    report.class_summary.push_back(std::move(cs));
  }
  std::stable_sort(report.class_summary.begin(), report.class_summary.end(),
                   [](const ClassRateSummary& a, const ClassRateSummary& b) {
                     return a.is_live > b.is_live;
                   });

  std::sort(detect_times.begin(), detect_times.end());
  const std::size_t n = detect_times.size();
  if (n > 0)
    report.median_detect_ms = n % 2 ? detect_times[n / 2]
                                    : 0.5 * (detect_times[n / 2 - 1] + detect_times[n / 2]);
  return report;
}

void save_report_json(const EvalReport& report, const std::filesystem::path& path) {
  json j;
  j["version"] = "fpad.report/1";
  j["experiment"] = to_string(report.experiment);
  j["k"] = report.k;
  j["seed"] = report.seed;
  j["fdr_target"] = report.fdr_target;
  j["tdr"] = {{"mean", report.tdr_mean}, {"stdev", report.tdr_stdev}};
  j["folds"] = json::array();
  for (const auto& fm : report.folds) {
    json jf;
    jf["fold"] = fm.fold_index;
    jf["tdr"] = fm.tdr;
    jf["threshold"] = fm.threshold;
    jf["c"] = fm.c_used;
    jf["train_units"] = fm.train_units;
    jf["test_units"] = fm.test_units;
    jf["class_rates"] = json::array();
    for (const auto& cr : fm.class_rates)
      jf["class_rates"].push_back({{"name", cr.name},
                                   {"live", cr.is_live},
                                   {"rate", cr.correct_rate},
                                   {"count", cr.count}});
    j["folds"].push_back(std::move(jf));
  }
  j["class_rates"] = json::array();
  for (const auto& cs : report.class_summary)
    j["class_rates"].push_back(
        {{"name", cs.name}, {"live", cs.is_live}, {"mean", cs.mean}, {"stdev", cs.stdev}});
  j["median_detect_ms"] = report.median_detect_ms;
  j["train_only_materials"] = report.train_only_materials;
  std::ofstream out(path);
  if (!out) raise(Errc::IoError, "cannot open for writing: " + path.string());
  out << j.dump(2) << '\n';
  if (!out) raise(Errc::IoError, "write failed: " + path.string());
}

std::string report_table(const EvalReport& report) {
  char line[160];
  std::string table;
  std::snprintf(line, sizeof(line), "%-14s %5s %11s %9s %8s %10s\n", "experiment", "folds",
                "fdr_target", "tdr_mean", "tdr_std", "detect_ms");
  table += line;
  std::snprintf(line, sizeof(line), "%-14s %5d %11.4f %9.4f %8.4f %10.1f\n",
                to_string(report.experiment), report.k, report.fdr_target, report.tdr_mean,
                report.tdr_stdev, report.median_detect_ms);
  table += line;
  table += '\n';
  std::snprintf(line, sizeof(line), "%-24s %8s %8s\n", "class", "mean", "std");
  table += line;
  for (const auto& cs : report.class_summary) {
    std::snprintf(line, sizeof(line), "%-24s %8.4f %8.4f\n", cs.name.c_str(), cs.mean,
                  cs.stdev);
    table += line;
  }
  if (!report.train_only_materials.empty()) {
    table += "\ntrain-only materials:";
    for (const auto& m : report.train_only_materials) table += " " + m;
    table += '\n';
  }
  return table;
}

void save_report_table(const EvalReport& report, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) raise(Errc::IoError, "cannot open for writing: " + path.string());
  out << report_table(report);
  if (!out) raise(Errc::IoError, "write failed: " + path.string());
}

}  // namespace fpad
