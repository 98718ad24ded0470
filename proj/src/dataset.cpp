#include "fpad/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "fpad/rng.hpp"

namespace fpad {
namespace {

constexpr const char* kHeader =
    "id,image_path,stream,label,material,subject_id,spoof_instance_id,finger_id,"
    "impression_index";

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

void check_field(const std::string& value, const char* name,
                 std::vector<std::string>& problems, int line_no) {
  for (char c : value)
    if (c == ',' || c == '\n' || c == '\r')
      problems.push_back("line " + std::to_string(line_no) + ": " + name +
                         " contains a delimiter");
}

// Chunk c of a balanced k-way partition of m items: the first m%k chunks get
// one extra item.
std::pair<std::size_t, std::size_t> chunk_range(std::size_t m, int k, int c) {
  const std::size_t base = m / k, extra = m % k;
  const std::size_t begin =
      static_cast<std::size_t>(c) * base + std::min<std::size_t>(c, extra);
  const std::size_t size = base + (static_cast<std::size_t>(c) < extra ? 1 : 0);
  return {begin, begin + size};
}

}  // namespace

const char* to_string(Label l) { return l == Label::Live ? "LIVE" : "SPOOF"; }

Label parse_label(const std::string& s) {
  if (s == "LIVE") return Label::Live;
  if (s == "SPOOF") return Label::Spoof;
  raise(Errc::ParseError, "unknown label: " + s);
}

std::string acquisition_key(const SampleRecord& rec) {
  std::string key = rec.label == Label::Live
                        ? "L\x1f" + rec.subject_id
                        : "S\x1f" + rec.material + '\x1f' + rec.spoof_instance_id;
  key += '\x1f' + rec.finger_id + '\x1f' + std::to_string(rec.impression_index);
  return key;
}

std::vector<SampleRecord> load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) raise(Errc::IoError, "cannot open: " + path.string());
  std::string line;
  if (!std::getline(in, line)) return {};
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kHeader)
    raise(Errc::ParseError, path.string() + ":1: expected header '" + kHeader + "'");

  std::vector<SampleRecord> records;
  std::vector<std::string> problems;
  std::set<std::string> seen_ids;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_csv(line);
    const std::string at = "line " + std::to_string(line_no) + ": ";
    if (f.size() != 9) {
      problems.push_back(at + "expected 9 fields, got " + std::to_string(f.size()));
      continue;
    }
    SampleRecord rec;
    rec.id = f[0];
    rec.image_path = f[1];
    rec.material = f[4];
    rec.subject_id = f[5];
    rec.spoof_instance_id = f[6];
    rec.finger_id = f[7];
    try {
      rec.stream = parse_stream(f[2]);
      rec.label = parse_label(f[3]);
      std::size_t used = 0;
      rec.impression_index = std::stoi(f[8], &used);
      if (used != f[8].size()) throw std::invalid_argument(f[8]);
    } catch (const std::exception& e) {
      problems.push_back(at + e.what());
      continue;
    }
    if (rec.id.empty()) problems.push_back(at + "empty id");
    if (!seen_ids.insert(rec.id).second) problems.push_back(at + "duplicate id " + rec.id);
    if (rec.image_path.empty()) problems.push_back(at + "empty image_path");
    if (rec.stream == Stream::Fused)
      problems.push_back(at + "manifest streams are COTS, FTIR or DIRECT");
    if (rec.finger_id.empty()) problems.push_back(at + "empty finger_id");
    if (rec.impression_index < 0) problems.push_back(at + "negative impression_index");
    if (rec.label == Label::Live) {
      if (rec.subject_id.empty()) problems.push_back(at + "LIVE record without subject_id");
      if (!rec.material.empty()) problems.push_back(at + "LIVE record with a material");
    } else if (rec.material.empty()) {
      problems.push_back(at + "SPOOF record without material");
    }
    records.push_back(std::move(rec));
  }
  if (!problems.empty()) {
    std::string msg = path.string() + ": ";
    for (std::size_t i = 0; i < problems.size(); ++i) {
      if (i) msg += "; ";
      msg += problems[i];
    }
    raise(Errc::ParseError, msg);
  }
  return records;
}

void save_manifest(const std::vector<SampleRecord>& records,
                   const std::filesystem::path& path) {
  std::vector<std::string> problems;
  int line_no = 1;
  for (const auto& rec : records) {
    ++line_no;
    check_field(rec.id, "id", problems, line_no);
    check_field(rec.image_path, "image_path", problems, line_no);
    check_field(rec.material, "material", problems, line_no);
    check_field(rec.subject_id, "subject_id", problems, line_no);
    check_field(rec.spoof_instance_id, "spoof_instance_id", problems, line_no);
    check_field(rec.finger_id, "finger_id", problems, line_no);
  }
  if (!problems.empty())
    raise(Errc::InvalidData, "manifest fields not serializable: " + problems.front());

  std::ofstream out(path);
  if (!out) raise(Errc::IoError, "cannot open for writing: " + path.string());
  out << kHeader << '\n';
  for (const auto& rec : records)
    out << rec.id << ',' << rec.image_path << ',' << to_string(rec.stream) << ','
        << to_string(rec.label) << ',' << rec.material << ',' << rec.subject_id << ','
        << rec.spoof_instance_id << ',' << rec.finger_id << ',' << rec.impression_index
        << '\n';
  if (!out) raise(Errc::IoError, "write failed: " + path.string());
}

FoldPlan make_folds(const std::vector<SampleRecord>& records, int k, std::uint64_t seed) {
  if (k < 2) raise(Errc::ProtocolInfeasible, "cross-validation needs k >= 2");

  std::vector<std::string> subjects;
  std::map<std::string, std::vector<std::string>> material_acqs;  // material -> keys
  std::set<std::string> seen_subject, seen_acq;
  for (const auto& rec : records) {
    if (rec.label == Label::Live) {
      if (seen_subject.insert(rec.subject_id).second) subjects.push_back(rec.subject_id);
    } else if (seen_acq.insert(acquisition_key(rec)).second) {
      material_acqs[rec.material].push_back(acquisition_key(rec));
    }
  }
  if (subjects.size() < static_cast<std::size_t>(k))
    raise(Errc::ProtocolInfeasible, "need at least " + std::to_string(k) +
                                        " live subjects, found " +
                                        std::to_string(subjects.size()));

  std::mt19937_64 rng(seed);
  std::sort(subjects.begin(), subjects.end());
  deterministic_shuffle(subjects, rng);
  std::map<std::string, int> subject_fold;
  for (int c = 0; c < k; ++c) {
    const auto [begin, end] = chunk_range(subjects.size(), k, c);
    for (std::size_t i = begin; i < end; ++i) subject_fold[subjects[i]] = c;
  }

  FoldPlan plan;
  // -1 marks train-only acquisitions.
  std::map<std::string, int> acq_fold;
  for (auto& [material, keys] : material_acqs) {
    std::sort(keys.begin(), keys.end());
    deterministic_shuffle(keys, rng);
    if (keys.size() < static_cast<std::size_t>(k)) {
      plan.train_only_materials.push_back(material);
      for (const auto& key : keys) acq_fold[key] = -1;
      continue;
    }
    for (int c = 0; c < k; ++c) {
      const auto [begin, end] = chunk_range(keys.size(), k, c);
      for (std::size_t i = begin; i < end; ++i) acq_fold[keys[i]] = c;
    }
  }

  plan.folds.resize(k);
  for (int f = 0; f < k; ++f) plan.folds[f].fold_index = f;
  for (const auto& rec : records) {
    const int fold = rec.label == Label::Live ? subject_fold.at(rec.subject_id)
                                              : acq_fold.at(acquisition_key(rec));
    for (int f = 0; f < k; ++f)
      (fold == f ? plan.folds[f].test_ids : plan.folds[f].train_ids).push_back(rec.id);
  }
  return plan;
}

}  // namespace fpad
