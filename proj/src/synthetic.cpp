#include "fpad/synthetic.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "fpad/image_io.hpp"
#include "fpad/raster.hpp"
#include "fpad/rng.hpp"

namespace fpad {
namespace {

constexpr double kLiveHue = 22.0;
constexpr double kTau = 2.0 * std::numbers::pi;

struct Rgb {
  double r, g, b;
};

Rgb hsv_to_rgb(double hue_deg, double s, double v) {
  const double h = std::fmod(std::fmod(hue_deg, 360.0) + 360.0, 360.0) / 60.0;
  const int sector = static_cast<int>(h) % 6;
  const double f = h - std::floor(h);
  const double p = v * (1.0 - s);
  const double q = v * (1.0 - s * f);
  const double t = v * (1.0 - s * (1.0 - f));
  switch (sector) {
    case 0:
      return {v, t, p};
    case 1:
      return {q, v, p};
    case 2:
      return {p, v, t};
    case 3:
      return {p, q, v};
    case 4:
      return {t, p, v};
    default:
      return {v, p, q};
  }
}

double circular_distance_deg(double a, double b) {
  const double d = std::fmod(std::abs(a - b), 360.0);
  return std::min(d, 360.0 - d);
}

std::string pad2(int v) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%02d", v);
  return buf;
}

struct Blob {
  double cx, cy, r, amp;
};

// One acquisition's rendering parameters, drawn once so the paired streams
// show the same physical pattern.
struct FieldParams {
  double theta = 0.0, period = 8.0, phase = 0.0, hue = 0.0;
  std::vector<Blob> blobs;                                  // live speculars
  double harmonic_amp = 0.0, harmonic_mult = 2.0, harmonic_phase = 0.0;  // spoof texture
};

FieldParams draw_params(std::mt19937_64& rng, int material_index, double class_hue,
                        int width, int height) {
  FieldParams fp;
  fp.theta = kTau * unit_real(rng);
  fp.period = 6.0 + 4.0 * unit_real(rng);
  fp.phase = kTau * unit_real(rng);
  fp.hue = class_hue + (unit_real(rng) - 0.5) * 8.0;
  if (material_index < 0) {
    const int n_blobs = 3 + static_cast<int>(bounded_rand(rng, 4));
    for (int i = 0; i < n_blobs; ++i) {
      Blob b;
      b.cx = unit_real(rng) * width;
      b.cy = unit_real(rng) * height;
      b.r = 3.0 + 3.0 * unit_real(rng);
      b.amp = 0.3 + 0.15 * unit_real(rng);
      fp.blobs.push_back(b);
    }
  } else {
    fp.harmonic_amp = 0.12 + 0.06 * (material_index % 4);
    fp.harmonic_mult = 2.0 + material_index % 3;
    fp.harmonic_phase = 2.0 * fp.phase + 0.5 * unit_real(rng);
  }
  return fp;
}

double intensity_at(const FieldParams& fp, int x, int y) {
  const double axis = x * std::cos(fp.theta) + y * std::sin(fp.theta);
  double v = 0.5 + 0.5 * std::sin(kTau * axis / fp.period + fp.phase);
  for (const auto& b : fp.blobs) {
    const double dx = x - b.cx, dy = y - b.cy;
    v += b.amp * std::exp(-(dx * dx + dy * dy) / (2.0 * b.r * b.r));
  }
  if (fp.harmonic_amp > 0.0)
    v += fp.harmonic_amp *
         std::sin(fp.harmonic_mult * kTau * axis / fp.period + fp.harmonic_phase);
  return std::clamp(v, 0.0, 1.0);
}

RasterImage render_color(const FieldParams& fp, int width, int height, double v_lo,
                         double v_span, double saturation, std::mt19937_64& rng) {
  RasterImage img = RasterImage::filled(width, height, ColorSpace::Rgb, 0);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      double v = v_lo + v_span * intensity_at(fp, x, y);
      v = std::clamp(v + (unit_real(rng) - 0.5) * 0.02, 0.0, 1.0);
      const Rgb c = hsv_to_rgb(fp.hue, saturation, v);
      img.at(x, y, 0) = round_to_u8(255.0 * c.r);
      img.at(x, y, 1) = round_to_u8(255.0 * c.g);
      img.at(x, y, 2) = round_to_u8(255.0 * c.b);
    }
  }
  return img;
}

RasterImage render_gray(const FieldParams& fp, int width, int height,
                        std::mt19937_64& rng) {
  RasterImage img = RasterImage::filled(width, height, ColorSpace::Gray, 0);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      double v = 0.10 + 0.80 * intensity_at(fp, x, y);
      v = std::clamp(v + (unit_real(rng) - 0.5) * 0.02, 0.0, 1.0);
      img.at(x, y, 0) = round_to_u8(255.0 * v);
    }
  }
  return img;
}

struct AcquisitionInfo {
  std::string id_base;
  Label label = Label::Live;
  int material_index = -1;
  std::string material, subject_id, spoof_instance_id, finger_id;
  int impression_index = 0;
};

}  // namespace

void SyntheticSpec::validate() const {
  if (subjects < 1 || fingers_per_subject < 1 || impressions < 1)
    raise(Errc::InvalidArgument, "live corpus counts must be positive");
  if (materials.empty()) raise(Errc::InvalidArgument, "no spoof materials listed");
  for (const auto& m : materials)
    if (m.empty() || m.find(',') != std::string::npos)
      raise(Errc::InvalidArgument, "material names must be non-empty and comma-free");
  if (instances_per_material < 1 || impressions_per_instance < 1)
    raise(Errc::InvalidArgument, "spoof corpus counts must be positive");
  if (width < 9 || height < 9)
    raise(Errc::InvalidArgument, "images need an interior at the largest LBP scale");
  if (hue_separation < 0.0 || hue_separation > 120.0)
    raise(Errc::InvalidArgument, "hue separation must be within [0, 120] degrees");
  const auto hues = material_hues_degrees(*this);
  for (std::size_t i = 0; i < hues.size(); ++i) {
    if (circular_distance_deg(hues[i], live_hue_degrees()) < hue_separation)
      raise(Errc::InvalidArgument, "material hue too close to the live hue");
    for (std::size_t j = i + 1; j < hues.size(); ++j)
      if (circular_distance_deg(hues[i], hues[j]) < hue_separation)
        raise(Errc::InvalidArgument, "material hues closer than the configured separation");
  }
}

double live_hue_degrees() { return kLiveHue; }

std::vector<double> material_hues_degrees(const SyntheticSpec& spec) {
  const int m = static_cast<int>(spec.materials.size());
  std::vector<double> hues(m);
  const double step = m > 1 ? 240.0 / (m - 1) : 0.0;
  for (int i = 0; i < m; ++i) hues[i] = m > 1 ? 85.0 + i * step : 205.0;
  return hues;
}

std::vector<SampleRecord> generate_synthetic_corpus(const SyntheticSpec& spec,
                                                    std::uint64_t seed,
                                                    const std::filesystem::path& out_dir) {
  spec.validate();
  const auto hues = material_hues_degrees(spec);

  std::vector<AcquisitionInfo> acquisitions;
  for (int s = 0; s < spec.subjects; ++s) {
    for (int f = 0; f < spec.fingers_per_subject; ++f) {
      for (int i = 0; i < spec.impressions; ++i) {
        AcquisitionInfo a;
        a.subject_id = "S" + pad2(s + 1);
        a.finger_id = "F" + pad2(f + 1);
        a.impression_index = i;
        a.id_base = "live-" + a.subject_id + "-" + a.finger_id + "-I" + std::to_string(i);
        acquisitions.push_back(std::move(a));
      }
    }
  }
  for (int m = 0; m < static_cast<int>(spec.materials.size()); ++m) {
    for (int j = 0; j < spec.instances_per_material; ++j) {
      for (int i = 0; i < spec.impressions_per_instance; ++i) {
        AcquisitionInfo a;
        a.label = Label::Spoof;
        a.material_index = m;
        a.material = spec.materials[m];
        a.spoof_instance_id = a.material + "-" + pad2(j + 1);
        a.finger_id = "F" + pad2(j + 1);
        a.impression_index = i;
        a.id_base = "spoof-" + a.spoof_instance_id + "-I" + std::to_string(i);
        acquisitions.push_back(std::move(a));
      }
    }
  }

  std::filesystem::create_directories(out_dir / "images");
  std::vector<SampleRecord> records;
  for (std::size_t ord = 0; ord < acquisitions.size(); ++ord) {
    const AcquisitionInfo& a = acquisitions[ord];
    std::mt19937_64 rng(mix_seed(seed, ord));
    const double class_hue = a.material_index < 0 ? kLiveHue : hues[a.material_index];
    const FieldParams fp =
        draw_params(rng, a.material_index, class_hue, spec.width, spec.height);

    const auto emit = [&](Stream stream, const RasterImage& img) {
      SampleRecord rec;
      rec.id = a.id_base + "-" + std::string(to_string(stream));
      for (auto& c : rec.id) c = static_cast<char>(std::tolower(c));
      rec.image_path = "images/" + rec.id + ".png";
      rec.stream = stream;
      rec.label = a.label;
      rec.material = a.material;
      rec.subject_id = a.subject_id;
      rec.spoof_instance_id = a.spoof_instance_id;
      rec.finger_id = a.finger_id;
      rec.impression_index = a.impression_index;
      save_image(img, out_dir / rec.image_path);
      records.push_back(std::move(rec));
    };

    emit(Stream::Ftir, render_color(fp, spec.width, spec.height, 0.12, 0.78, 0.06, rng));
    emit(Stream::Direct, render_color(fp, spec.width, spec.height, 0.45, 0.25, 0.55, rng));
    if (spec.include_cots) emit(Stream::Cots, render_gray(fp, spec.width, spec.height, rng));
  }

  save_manifest(records, out_dir / "manifest.csv");
  return records;
}

}  // namespace fpad
