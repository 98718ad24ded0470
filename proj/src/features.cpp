#include "fpad/features.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace fpad {
namespace {

constexpr char kMagic[8] = {'F', 'P', 'A', 'D', 'F', 'E', 'A', 'T'};
constexpr std::uint32_t kBinaryVersion = 1;

std::string lowered(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::uint8_t descriptor_tag(Descriptor d) { return static_cast<std::uint8_t>(d); }
std::uint8_t stream_tag(Stream s) { return static_cast<std::uint8_t>(s); }

Descriptor descriptor_from_tag(std::uint8_t t) {
  if (t > static_cast<std::uint8_t>(Descriptor::Fusion972))
    raise(Errc::ParseError, "unknown descriptor tag in feature file");
  return static_cast<Descriptor>(t);
}

Stream stream_from_tag(std::uint8_t t) {
  if (t > static_cast<std::uint8_t>(Stream::Fused))
    raise(Errc::ParseError, "unknown stream tag in feature file");
  return static_cast<Stream>(t);
}

void check_record(const FeatureRecord& rec) {
  if (rec.id.empty()) raise(Errc::InvalidArgument, "feature record id is empty");
  for (char c : rec.id)
    if (std::isspace(static_cast<unsigned char>(c)))
      raise(Errc::InvalidArgument, "feature record id contains whitespace: " + rec.id);
  if (rec.feature.values.size() != descriptor_dim(rec.feature.descriptor))
    raise(Errc::DimensionMismatch, "feature dimension does not match descriptor for " + rec.id);
}

void put_u32(std::ostream& out, std::uint32_t v) {
  char b[4] = {static_cast<char>(v), static_cast<char>(v >> 8), static_cast<char>(v >> 16),
               static_cast<char>(v >> 24)};
  out.write(b, 4);
}

void put_u64(std::ostream& out, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>(v >> (8 * i));
  out.write(b, 8);
}

void put_f64(std::ostream& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4))
    raise(Errc::ParseError, "truncated feature file");
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

std::uint64_t get_u64(std::istream& in) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), 8))
    raise(Errc::ParseError, "truncated feature file");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

double get_f64(std::istream& in) { return std::bit_cast<double>(get_u64(in)); }

}  // namespace

int descriptor_dim(Descriptor d) {
  switch (d) {
    case Descriptor::Gray54:
      return 54;
    case Descriptor::Clbp486:
      return 486;
    case Descriptor::Fusion972:
      return 972;
  }
  raise(Errc::InvalidArgument, "unknown descriptor");
}

const char* to_string(Descriptor d) {
  switch (d) {
    case Descriptor::Gray54:
      return "GRAY_LBP_54";
    case Descriptor::Clbp486:
      return "CLBP_486";
    case Descriptor::Fusion972:
      return "FUSED_972";
  }
  return "?";
}

const char* to_string(Stream s) {
  switch (s) {
    case Stream::Cots:
      return "COTS";
    case Stream::Ftir:
      return "FTIR";
    case Stream::Direct:
      return "DIRECT";
    case Stream::Fused:
      return "FUSED";
  }
  return "?";
}

Descriptor parse_descriptor(const std::string& s) {
  const std::string t = lowered(s);
  if (t == "gray_lbp_54" || t == "gray54") return Descriptor::Gray54;
  if (t == "clbp_486" || t == "clbp486") return Descriptor::Clbp486;
  if (t == "fused_972" || t == "fusion972") return Descriptor::Fusion972;
  raise(Errc::ParseError, "unknown descriptor: " + s);
}

Stream parse_stream(const std::string& s) {
  const std::string t = lowered(s);
  if (t == "cots") return Stream::Cots;
  if (t == "ftir") return Stream::Ftir;
  if (t == "direct") return Stream::Direct;
  if (t == "fused") return Stream::Fused;
  raise(Errc::ParseError, "unknown stream: " + s);
}

void save_features_text(const std::vector<FeatureRecord>& records,
                        const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) raise(Errc::IoError, "cannot open for writing: " + path.string());
  char buf[32];
  for (const auto& rec : records) {
    check_record(rec);
    out << to_string(rec.feature.descriptor) << ' ' << to_string(rec.feature.stream) << ' '
        << rec.id;
    for (Eigen::Index i = 0; i < rec.feature.values.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.9f", rec.feature.values(i));
      out << ' ' << buf;
    }
    out << '\n';
  }
  if (!out) raise(Errc::IoError, "write failed: " + path.string());
}

std::vector<FeatureRecord> load_features_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) raise(Errc::IoError, "cannot open: " + path.string());
  std::vector<FeatureRecord> records;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string desc_tag, stream_tag, id;
    if (!(ls >> desc_tag >> stream_tag >> id))
      raise(Errc::ParseError, path.string() + ":" + std::to_string(line_no) + ": short record");
    FeatureRecord rec;
    rec.id = id;
    rec.feature.descriptor = parse_descriptor(desc_tag);
    rec.feature.stream = parse_stream(stream_tag);
    const int dim = descriptor_dim(rec.feature.descriptor);
    rec.feature.values.resize(dim);
    for (int i = 0; i < dim; ++i)
      if (!(ls >> rec.feature.values(i)))
        raise(Errc::ParseError, path.string() + ":" + std::to_string(line_no) +
                                    ": expected " + std::to_string(dim) + " values");
    double extra;
    if (ls >> extra)
      raise(Errc::ParseError,
            path.string() + ":" + std::to_string(line_no) + ": trailing values");
    records.push_back(std::move(rec));
  }
  return records;
}

void save_features_binary(const std::vector<FeatureRecord>& records,
                          const std::filesystem::path& path) {
  if (records.empty()) raise(Errc::EmptyInput, "no feature records to save");
  const Descriptor desc = records.front().feature.descriptor;
  for (const auto& rec : records) {
    check_record(rec);
    if (rec.feature.descriptor != desc)
      raise(Errc::DescriptorMismatch, "mixed descriptors in one binary feature file");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(Errc::IoError, "cannot open for writing: " + path.string());
  out.write(kMagic, sizeof(kMagic));
  put_u32(out, kBinaryVersion);
  out.put(static_cast<char>(descriptor_tag(desc)));
  put_u32(out, static_cast<std::uint32_t>(descriptor_dim(desc)));
  put_u64(out, records.size());
  for (const auto& rec : records) {
    out.put(static_cast<char>(stream_tag(rec.feature.stream)));
    put_u32(out, static_cast<std::uint32_t>(rec.id.size()));
    out.write(rec.id.data(), static_cast<std::streamsize>(rec.id.size()));
    for (Eigen::Index i = 0; i < rec.feature.values.size(); ++i)
      put_f64(out, rec.feature.values(i));
  }
  if (!out) raise(Errc::IoError, "write failed: " + path.string());
}

std::vector<FeatureRecord> load_features_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(Errc::IoError, "cannot open: " + path.string());
  char magic[8];
  if (!in.read(magic, sizeof(magic)) || !std::equal(magic, magic + 8, kMagic))
    raise(Errc::ParseError, "not a feature container: " + path.string());
  if (get_u32(in) != kBinaryVersion)
    raise(Errc::ParseError, "unsupported feature container version");
  const Descriptor desc = descriptor_from_tag(static_cast<std::uint8_t>(in.get()));
  const std::uint32_t dim = get_u32(in);
  if (dim != static_cast<std::uint32_t>(descriptor_dim(desc)))
    raise(Errc::ParseError, "header dimension does not match descriptor");
  const std::uint64_t count = get_u64(in);
  std::vector<FeatureRecord> records;
  records.reserve(count);
  for (std::uint64_t r = 0; r < count; ++r) {
    FeatureRecord rec;
    const int tag = in.get();
    if (tag < 0) raise(Errc::ParseError, "truncated feature file");
    rec.feature.stream = stream_from_tag(static_cast<std::uint8_t>(tag));
    rec.feature.descriptor = desc;
    const std::uint32_t id_len = get_u32(in);
    rec.id.resize(id_len);
    if (!in.read(rec.id.data(), id_len)) raise(Errc::ParseError, "truncated feature file");
    rec.feature.values.resize(dim);
    for (std::uint32_t i = 0; i < dim; ++i) rec.feature.values(i) = get_f64(in);
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<FeatureRecord> load_features(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(Errc::IoError, "cannot open: " + path.string());
  char magic[8] = {};
  in.read(magic, sizeof(magic));
  in.close();
  if (in.gcount() == 8 && std::equal(magic, magic + 8, kMagic))
    return load_features_binary(path);
  return load_features_text(path);
}

}  // namespace fpad
