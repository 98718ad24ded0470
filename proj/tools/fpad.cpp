#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <optional>
#include <random>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "json.hpp"

#include "fpad/calibration.hpp"
#include "fpad/dataset.hpp"
#include "fpad/experiment.hpp"
#include "fpad/features.hpp"
#include "fpad/image_io.hpp"
#include "fpad/lbp.hpp"
#include "fpad/svm.hpp"
#include "fpad/synthetic.hpp"

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace fpad;

std::uint64_t resolve_seed(const CLI::Option* opt, std::uint64_t value) {
  if (opt->count() > 0) return value;
  std::random_device rd;
  const auto ticks = static_cast<std::uint64_t>(
      std::chrono::steady_clock::now().time_since_epoch().count());
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd() ^ ticks;
}

void write_config(const json& cfg, const fs::path& path) {
  std::ofstream out(path);
  if (!out) raise(Errc::IoError, "cannot open for writing: " + path.string());
  out << cfg.dump(2) << '\n';
}

bool has_image_extension(const fs::path& p) {
  std::string ext = p.extension().string();
  for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return ext == ".png" || ext == ".pgm" || ext == ".ppm" || ext == ".pnm";
}

std::string common_id_prefix(const std::string& a, const std::string& b) {
  std::size_t n = 0;
  while (n < a.size() && n < b.size() && a[n] == b[n]) ++n;
  std::string prefix = a.substr(0, n);
  while (!prefix.empty() && (prefix.back() == '-' || prefix.back() == '_'))
    prefix.pop_back();
  return prefix.empty() ? a : prefix;
}

std::vector<double> parse_grid(const std::string& csv) {
  std::vector<double> grid;
  std::istringstream in(csv);
  std::string field;
  while (std::getline(in, field, ',')) {
    try {
      std::size_t used = 0;
      grid.push_back(std::stod(field, &used));
      if (used != field.size()) throw std::invalid_argument(field);
    } catch (const std::exception&) {
      raise(Errc::InvalidArgument, "bad grid value: " + field);
    }
  }
  if (grid.empty()) raise(Errc::InvalidArgument, "empty C grid");
  return grid;
}

std::vector<PointCorrespondence> load_pairs(const fs::path& path) {
  std::ifstream in(path);
  if (!in) raise(Errc::IoError, "cannot open: " + path.string());
  std::vector<PointCorrespondence> pairs;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string field;
    double v[4];
    bool ok = true;
    for (int i = 0; i < 4 && ok; ++i) {
      if (!std::getline(ls, field, ',')) {
        ok = false;
        break;
      }
      try {
        std::size_t used = 0;
        v[i] = std::stod(field, &used);
        if (used != field.size()) ok = false;
      } catch (const std::exception&) {
        ok = false;
      }
    }
    if (ok && std::getline(ls, field, ',')) ok = false;
    if (!ok) {
      if (line_no == 1) continue;  // header row
      raise(Errc::ParseError,
            path.string() + ":" + std::to_string(line_no) + ": expected sx,sy,dx,dy");
    }
    pairs.push_back({{v[0], v[1]}, {v[2], v[3]}});
  }
  return pairs;
}

RasterImage load_gray(const fs::path& path) {
  RasterImage img = load_image(path);
  return img.channels() == 3 ? to_grayscale(img) : img;
}

RasterImage load_hsv(const fs::path& path) {
  const RasterImage img = load_image(path);
  if (img.channels() != 3)
    raise(Errc::InvalidSpace, "CLBP needs a 3-channel image: " + path.string());
  return rgb_to_hsv(img);
}

struct ExtractTask {
  std::string id;
  Stream stream = Stream::Cots;
  fs::path primary;
  fs::path secondary;  // fusion only
};

void run_extract(const fs::path& manifest_path, Descriptor descriptor,
                 std::optional<Stream> stream_filter, int workers, const fs::path& out) {
  auto records = load_manifest(manifest_path);
  if (stream_filter) {
    std::erase_if(records,
                  [&](const SampleRecord& rec) { return rec.stream != *stream_filter; });
  }
  if (records.empty()) raise(Errc::EmptyInput, "no manifest records to extract");
  const fs::path root = manifest_path.parent_path();
  const auto resolve = [&](const std::string& rel) {
    fs::path p(rel);
    return p.is_relative() ? root / p : p;
  };

  std::vector<ExtractTask> tasks;
  if (descriptor == Descriptor::Fusion972) {
    std::map<std::string, std::pair<const SampleRecord*, const SampleRecord*>> acqs;
    std::vector<std::string> order;
    for (const auto& rec : records) {
      if (rec.stream != Stream::Ftir && rec.stream != Stream::Direct) continue;
      const std::string key = acquisition_key(rec);
      auto [it, inserted] = acqs.try_emplace(key, nullptr, nullptr);
      if (inserted) order.push_back(key);
      auto& slot = rec.stream == Stream::Ftir ? it->second.first : it->second.second;
      if (slot)
        raise(Errc::InvalidData, "acquisition has two " +
                                     std::string(to_string(rec.stream)) +
                                     " records: " + rec.id);
      slot = &rec;
    }
    if (order.empty()) raise(Errc::MissingStream, "manifest has no FTIR/DIRECT records");
    for (const auto& key : order) {
      const auto& [ftir, direct] = acqs.at(key);
      if (!ftir || !direct)
        raise(Errc::MissingStream, "acquisition is missing its " +
                                       std::string(ftir ? "DIRECT" : "FTIR") +
                                       " record: " + (ftir ? ftir : direct)->id);
      tasks.push_back({common_id_prefix(ftir->id, direct->id), Stream::Fused,
                       resolve(ftir->image_path), resolve(direct->image_path)});
    }
  } else {
    for (const auto& rec : records)
      tasks.push_back({rec.id, rec.stream, resolve(rec.image_path), {}});
  }

  std::vector<FeatureRecord> results(tasks.size());
  std::vector<std::string> failures;
  std::atomic<bool> any_io{false};
  std::atomic<std::size_t> next{0};
  std::mutex failures_mutex;
  const auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < tasks.size(); i = next.fetch_add(1)) {
      const ExtractTask& task = tasks[i];
      try {
        FeatureVector feature;
        switch (descriptor) {
          case Descriptor::Gray54:
            feature = grayscale_lbp_feature(load_gray(task.primary), task.stream);
            break;
          case Descriptor::Clbp486:
            feature = clbp_feature(load_hsv(task.primary), task.stream);
            break;
          case Descriptor::Fusion972:
            feature = fuse_features(clbp_feature(load_hsv(task.primary), Stream::Ftir),
                                    clbp_feature(load_hsv(task.secondary), Stream::Direct));
            break;
        }
        results[i] = {task.id, std::move(feature)};
      } catch (const Error& e) {
        std::scoped_lock lock(failures_mutex);
        failures.push_back(task.id + ": " + e.what());
        if (e.code() == Errc::IoError) any_io = true;
      }
    }
  };

  const int n_workers = std::max(1, std::min<int>(workers, static_cast<int>(tasks.size())));
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_workers; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  if (!failures.empty()) {
    std::sort(failures.begin(), failures.end());
    for (const auto& f : failures) std::cerr << "error: " << f << '\n';
    raise(any_io ? Errc::IoError : Errc::InvalidData,
          std::to_string(failures.size()) + " of " + std::to_string(tasks.size()) +
              " extractions failed");
  }

  if (out.extension() == ".bin")
    save_features_binary(results, out);
  else
    save_features_text(results, out);
  std::cout << "wrote " << results.size() << " feature records to " << out.string() << '\n';
}

Eigen::VectorXd labels_for_features(const std::vector<FeatureRecord>& feats,
                                    const std::vector<SampleRecord>& records) {
  std::map<std::string, Label> by_id;
  for (const auto& rec : records) by_id.emplace(rec.id, rec.label);
  Eigen::VectorXd y(static_cast<Eigen::Index>(feats.size()));
  for (std::size_t i = 0; i < feats.size(); ++i) {
    const auto it = by_id.find(feats[i].id);
    std::optional<Label> label;
    if (it != by_id.end()) {
      label = it->second;
    } else if (feats[i].feature.stream == Stream::Fused) {
      // Fused ids are the shared prefix of the paired per-stream records.
      for (const auto& rec : records) {
        if (rec.id.rfind(feats[i].id, 0) != 0) continue;
        if (label && *label != rec.label)
          raise(Errc::InvalidData, "records matching " + feats[i].id + " disagree on label");
        label = rec.label;
      }
    }
    if (!label)
      raise(Errc::InvalidData, "feature id not found in manifest: " + feats[i].id);
    y(static_cast<Eigen::Index>(i)) = *label == Label::Spoof ? 1.0 : -1.0;
  }
  return y;
}

int run_app(CLI::App& app, int argc, char** argv) {
  app.parse(argc, argv);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-stream optical fingerprint presentation-attack detection pipeline"};
  app.require_subcommand(1);

  // calibrate
  auto* cal = app.add_subcommand("calibrate", "Fit a perspective profile from point pairs");
  fs::path cal_pairs, cal_out;
  double cal_native = 900.0, cal_target = 500.0;
  std::uint64_t cal_seed = 0;
  cal->add_option("--pairs", cal_pairs, "CSV of sx,sy,dx,dy rows")->required();
  cal->add_option("--native-ppi", cal_native, "Sensor resolution of the warped frame");
  cal->add_option("--target-ppi", cal_target, "Exchange resolution");
  auto* cal_out_opt = cal->add_option("--out", cal_out, "Profile JSON path")->required();
  auto* cal_seed_opt = cal->add_option("--seed", cal_seed, "Run seed (recorded only)");
  cal->callback([&] {
    const std::uint64_t seed = resolve_seed(cal_seed_opt, cal_seed);
    const auto pairs = load_pairs(cal_pairs);
    const CalibrationProfile profile = estimate_perspective(pairs, cal_native, cal_target);
    const double residual = max_reprojection_residual(profile, pairs);
    save_profile(profile, cal_out);
    std::cout << "seed: " << seed << '\n';
    std::cout << "wrote " << cal_out.string() << "; max reprojection residual " << residual
              << '\n';
    json cfg{{"command", "calibrate"},
             {"pairs", cal_pairs.string()},
             {"native_ppi", cal_native},
             {"target_ppi", cal_target},
             {"out", cal_out.string()},
             {"seed", seed}};
    write_config(cfg, cal_out.string() + ".config.json");
  });
  (void)cal_out_opt;

  // process
  auto* proc = app.add_subcommand("process", "Enhance and rectify raw FTIR captures");
  fs::path proc_in, proc_profile, proc_out;
  std::uint64_t proc_seed = 0;
  proc->add_option("--in-dir", proc_in, "Directory of raw captures")->required();
  proc->add_option("--profile", proc_profile, "Calibration profile JSON")->required();
  proc->add_option("--out-dir", proc_out, "Destination directory")->required();
  auto* proc_seed_opt = proc->add_option("--seed", proc_seed, "Run seed (recorded only)");
  proc->callback([&] {
    const std::uint64_t seed = resolve_seed(proc_seed_opt, proc_seed);
    const CalibrationProfile profile = load_profile(proc_profile);
    if (!fs::is_directory(proc_in))
      raise(Errc::IoError, "not a directory: " + proc_in.string());
    fs::create_directories(proc_out);
    std::vector<fs::path> inputs;
    for (const auto& entry : fs::directory_iterator(proc_in))
      if (entry.is_regular_file() && has_image_extension(entry.path()))
        inputs.push_back(entry.path());
    std::sort(inputs.begin(), inputs.end());
    std::size_t ok = 0, failed = 0;
    for (const auto& path : inputs) {
      try {
        const RasterImage raw = load_image(path);
        const RasterImage processed = process_ftir(raw, profile);
        save_image(processed, proc_out / (path.stem().string() + ".png"));
        ++ok;
      } catch (const Error& e) {
        std::cerr << "error: " << path.string() << ": " << e.what() << '\n';
        ++failed;
      }
    }
    std::cout << "seed: " << seed << '\n';
    std::cout << "processed " << ok << " of " << inputs.size() << " images into "
              << proc_out.string() << '\n';
    json cfg{{"command", "process"},
             {"in_dir", proc_in.string()},
             {"profile", proc_profile.string()},
             {"out_dir", proc_out.string()},
             {"seed", seed}};
    write_config(cfg, proc_out / "process.config.json");
    if (failed > 0)
      raise(Errc::IoError, std::to_string(failed) + " of " + std::to_string(inputs.size()) +
                               " images failed");
  });

  // extract
  auto* ext = app.add_subcommand("extract", "Extract texture features for a manifest");
  fs::path ext_manifest, ext_out;
  std::string ext_descriptor, ext_stream;
  int ext_workers = 1;
  std::uint64_t ext_seed = 0;
  ext->add_option("--manifest", ext_manifest, "Sample manifest CSV")->required();
  ext->add_option("--descriptor", ext_descriptor, "gray54, clbp486 or fusion972")
      ->required();
  ext->add_option("--stream", ext_stream, "Only this stream: cots, ftir or direct");
  ext->add_option("--workers", ext_workers, "Parallel extraction threads")
      ->check(CLI::PositiveNumber);
  ext->add_option("--out", ext_out, "Feature file (.bin for the binary container)")
      ->required();
  auto* ext_seed_opt = ext->add_option("--seed", ext_seed, "Run seed (recorded only)");
  ext->callback([&] {
    const std::uint64_t seed = resolve_seed(ext_seed_opt, ext_seed);
    std::optional<Stream> filter;
    if (!ext_stream.empty()) filter = parse_stream(ext_stream);
    run_extract(ext_manifest, parse_descriptor(ext_descriptor), filter, ext_workers,
                ext_out);
    std::cout << "seed: " << seed << '\n';
    json cfg{{"command", "extract"},
             {"manifest", ext_manifest.string()},
             {"descriptor", ext_descriptor},
             {"stream", ext_stream},
             {"workers", ext_workers},
             {"out", ext_out.string()},
             {"seed", seed}};
    write_config(cfg, ext_out.string() + ".config.json");
  });

  // train
  auto* tr = app.add_subcommand("train", "Train and calibrate a spoof classifier");
  fs::path tr_features, tr_manifest, tr_out;
  double tr_c = 100.0, tr_tolerance = 1e-6;
  std::string tr_grid;
  std::uint64_t tr_seed = 0;
  tr->add_option("--features", tr_features, "Feature file from extract")->required();
  tr->add_option("--manifest", tr_manifest, "Manifest supplying labels")->required();
  auto* tr_c_opt = tr->add_option("--c", tr_c, "Fixed regularization strength");
  auto* tr_grid_opt =
      tr->add_option("--c-grid", tr_grid, "Comma list of C values to cross-validate");
  tr->add_option("--tolerance", tr_tolerance, "Relative solver stop tolerance");
  auto* tr_seed_opt = tr->add_option("--seed", tr_seed, "Cross-validation shuffle seed");
  tr->add_option("--out", tr_out, "Model JSON path")->required();
  tr->callback([&] {
    if (tr_c_opt->count() > 0 && tr_grid_opt->count() > 0)
      raise(Errc::InvalidArgument, "--c and --c-grid are mutually exclusive");
    const std::uint64_t seed = resolve_seed(tr_seed_opt, tr_seed);
    const auto feats = load_features(tr_features);
    if (feats.empty()) raise(Errc::EmptyInput, "feature file is empty");
    const Descriptor descriptor = feats.front().feature.descriptor;
    for (const auto& f : feats)
      if (f.feature.descriptor != descriptor)
        raise(Errc::DescriptorMismatch, "mixed descriptors in feature file");
    const auto records = load_manifest(tr_manifest);
    const Eigen::VectorXd y = labels_for_features(feats, records);
    Eigen::MatrixXd X(static_cast<Eigen::Index>(feats.size()), descriptor_dim(descriptor));
    for (std::size_t i = 0; i < feats.size(); ++i)
      X.row(static_cast<Eigen::Index>(i)) = feats[i].feature.values;

    TrainConfig cfg;
    cfg.C = tr_c;
    cfg.tolerance = tr_tolerance;
    cfg.seed = seed;
    if (tr_grid_opt->count() > 0) {
      cfg.c_grid = parse_grid(tr_grid);
      cfg.C = select_C(X, y, cfg);
    }
    SvmModel model = train_l2svm(X, y, cfg);
    model = calibrate(std::move(model), X, y);
    model.descriptor = descriptor;
    char fingerprint[32];
    std::snprintf(fingerprint, sizeof(fingerprint), "fnv1a64:%016llx",
                  static_cast<unsigned long long>(fnv1a64_file(tr_manifest)));
    model.train_fingerprint = fingerprint;
    save_model(model, tr_out);
    std::cout << "seed: " << seed << '\n';
    std::cout << "trained on " << X.rows() << " samples (dim " << X.cols() << ", C " << cfg.C
              << "), wrote " << tr_out.string() << '\n';
    json jcfg{{"command", "train"},
              {"features", tr_features.string()},
              {"manifest", tr_manifest.string()},
              {"C", cfg.C},
              {"c_grid", tr_grid_opt->count() > 0 ? tr_grid : ""},
              {"tolerance", tr_tolerance},
              {"out", tr_out.string()},
              {"seed", seed}};
    write_config(jcfg, tr_out.string() + ".config.json");
  });

  // evaluate
  auto* ev = app.add_subcommand("evaluate", "Run a cross-validated detection experiment");
  fs::path ev_manifest, ev_out;
  std::string ev_experiment, ev_grid;
  int ev_folds = 5;
  double ev_fdr = 0.001, ev_c = 100.0;
  std::uint64_t ev_seed = 0;
  ev->add_option("--manifest", ev_manifest, "Sample manifest CSV")->required();
  ev->add_option("--experiment", ev_experiment, "cots, ftir, direct or fusion")->required();
  ev->add_option("--folds", ev_folds, "Cross-validation folds")->check(CLI::PositiveNumber);
  ev->add_option("--fdr", ev_fdr, "False-detection-rate target");
  auto* ev_c_opt = ev->add_option("--c", ev_c, "Fixed regularization strength");
  auto* ev_grid_opt =
      ev->add_option("--c-grid", ev_grid, "Comma list of C values to cross-validate");
  auto* ev_seed_opt = ev->add_option("--seed", ev_seed, "Fold shuffle seed");
  ev->add_option("--out", ev_out, "Report JSON path")->required();
  ev->callback([&] {
    if (ev_c_opt->count() > 0 && ev_grid_opt->count() > 0)
      raise(Errc::InvalidArgument, "--c and --c-grid are mutually exclusive");
    const std::uint64_t seed = resolve_seed(ev_seed_opt, ev_seed);
    const auto records = load_manifest(ev_manifest);
    const Experiment experiment = parse_experiment(ev_experiment);
    ExperimentConfig cfg;
    cfg.k = ev_folds;
    cfg.seed = seed;
    cfg.fdr_target = ev_fdr;
    cfg.train.C = ev_c;
    if (ev_grid_opt->count() > 0) {
      cfg.select_c = true;
      cfg.train.c_grid = parse_grid(ev_grid);
    }
    const EvalReport report =
        run_experiment(records, ev_manifest.parent_path(), experiment, cfg);
    save_report_json(report, ev_out);
    save_report_table(report, ev_out.string() + ".txt");
    std::cout << "seed: " << seed << '\n';
    std::cout << report_table(report);
    std::cout << "wrote " << ev_out.string() << '\n';
    json jcfg{{"command", "evaluate"},
              {"manifest", ev_manifest.string()},
              {"experiment", std::string(to_string(experiment))},
              {"folds", ev_folds},
              {"fdr_target", ev_fdr},
              {"C", ev_c},
              {"c_grid", ev_grid_opt->count() > 0 ? ev_grid : ""},
              {"out", ev_out.string()},
              {"seed", seed}};
    write_config(jcfg, ev_out.string() + ".config.json");
  });

  // predict
  auto* pr = app.add_subcommand("predict", "Score a single acquisition with a model");
  fs::path pr_model, pr_image, pr_direct;
  std::uint64_t pr_seed = 0;
  pr->add_option("--model", pr_model, "Model JSON from train")->required();
  pr->add_option("--image", pr_image, "Image to score (FTIR side for fusion models)")
      ->required();
  auto* pr_direct_opt =
      pr->add_option("--direct", pr_direct, "DIRECT-side image for fusion models");
  auto* pr_seed_opt = pr->add_option("--seed", pr_seed, "Run seed (recorded only)");
  pr->callback([&] {
    const std::uint64_t seed = resolve_seed(pr_seed_opt, pr_seed);
    const SvmModel model = load_model(pr_model);
    FeatureVector feature;
    switch (*model.descriptor) {
      case Descriptor::Gray54:
        feature = grayscale_lbp_feature(load_gray(pr_image), Stream::Cots);
        break;
      case Descriptor::Clbp486:
        feature = clbp_feature(load_hsv(pr_image), Stream::Ftir);
        break;
      case Descriptor::Fusion972:
        if (pr_direct_opt->count() == 0)
          raise(Errc::MissingStream, "fusion models need --direct as well");
        feature = fuse_features(clbp_feature(load_hsv(pr_image), Stream::Ftir),
                                clbp_feature(load_hsv(pr_direct), Stream::Direct));
        break;
    }
    const double score = calibrated_score(model, feature);
    std::cout << std::fixed << std::setprecision(6) << score
              << (score >= 0.5 ? " SPOOF" : " LIVE") << '\n';
    json cfg{{"command", "predict"},
             {"model", pr_model.string()},
             {"image", pr_image.string()},
             {"direct", pr_direct.string()},
             {"seed", seed}};
    std::cerr << "config: " << cfg.dump() << '\n';
  });

  // synth
  auto* sy = app.add_subcommand("synth", "Generate the deterministic synthetic corpus");
  fs::path sy_out;
  SyntheticSpec sy_spec;
  std::string sy_materials;
  std::uint64_t sy_seed = 0;
  sy->add_option("--out-dir", sy_out, "Corpus destination directory")->required();
  sy->add_option("--subjects", sy_spec.subjects, "Live subjects");
  sy->add_option("--fingers", sy_spec.fingers_per_subject, "Fingers per subject");
  sy->add_option("--impressions", sy_spec.impressions, "Impressions per finger");
  sy->add_option("--materials", sy_materials, "Comma list of spoof material names");
  sy->add_option("--instances", sy_spec.instances_per_material, "Spoof casts per material");
  sy->add_option("--impressions-per-instance", sy_spec.impressions_per_instance,
                 "Impressions per cast");
  sy->add_option("--width", sy_spec.width, "Image width");
  sy->add_option("--height", sy_spec.height, "Image height");
  sy->add_option("--hue-separation", sy_spec.hue_separation,
                 "Minimum class hue distance, degrees");
  sy->add_flag("--include-cots", sy_spec.include_cots, "Also render a COTS-like stream");
  auto* sy_seed_opt = sy->add_option("--seed", sy_seed, "Corpus seed");
  sy->callback([&] {
    const std::uint64_t seed = resolve_seed(sy_seed_opt, sy_seed);
    if (!sy_materials.empty()) {
      sy_spec.materials.clear();
      std::istringstream in(sy_materials);
      std::string name;
      while (std::getline(in, name, ',')) sy_spec.materials.push_back(name);
    }
    const auto records = generate_synthetic_corpus(sy_spec, seed, sy_out);
    std::cout << "seed: " << seed << '\n';
    std::cout << "wrote " << records.size() << " records under " << sy_out.string() << '\n';
    json cfg{{"command", "synth"},
             {"out_dir", sy_out.string()},
             {"subjects", sy_spec.subjects},
             {"fingers", sy_spec.fingers_per_subject},
             {"impressions", sy_spec.impressions},
             {"materials", sy_spec.materials},
             {"instances", sy_spec.instances_per_material},
             {"impressions_per_instance", sy_spec.impressions_per_instance},
             {"width", sy_spec.width},
             {"height", sy_spec.height},
             {"hue_separation", sy_spec.hue_separation},
             {"include_cots", sy_spec.include_cots},
             {"seed", seed}};
    write_config(cfg, sy_out / "synth.config.json");
  });

  try {
    return run_app(app, argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code() == Errc::IoError ? 1 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
