#include "silref/io.h"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>

namespace silref {

using nlohmann::json;

std::string FormatDouble(double v) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc()) return "nan";
  return std::string(buf.data(), ptr);
}

json PoseToJson(const Pose& pose) {
  json rot = json::array();
  for (int r = 0; r < 3; ++r) {
    rot.push_back({pose.rotation(r, 0), pose.rotation(r, 1), pose.rotation(r, 2)});
  }
  return {{"rotation", rot},
          {"translation",
           {pose.translation.x(), pose.translation.y(), pose.translation.z()}}};
}

Pose PoseFromJson(const json& j) {
  try {
    Pose pose;
    const json& rot = j.at("rotation");
    const json& tr = j.at("translation");
    if (rot.size() != 3 || tr.size() != 3) {
      throw ParseError("pose needs a 3x3 rotation and a 3-vector", 1);
    }
    for (int r = 0; r < 3; ++r) {
      if (rot[r].size() != 3) throw ParseError("rotation rows need 3 entries", 1);
      for (int c = 0; c < 3; ++c) pose.rotation(r, c) = rot[r][c].get<double>();
      pose.translation[r] = tr[r].get<double>();
    }
    if (!pose.rotation.allFinite() || !pose.translation.allFinite() ||
        OrthonormalityError(pose.rotation) > 1e-6) {
      throw ParseError("pose rotation is not orthonormal", 1);
    }
    return pose;
  } catch (const json::exception& e) {
    throw ParseError(std::string("pose JSON: ") + e.what(), 1);
  }
}

json LoadJson(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(path + ": " + e.what(), 1);
  }
}

void SaveJson(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << j.dump(2) << '\n';
}

Pose LoadPose(const std::string& path) { return PoseFromJson(LoadJson(path)); }

void SavePose(const Pose& pose, const std::string& path) {
  SaveJson(PoseToJson(pose), path);
}

json CameraToJson(const CameraIntrinsics& k) {
  return {{"fx", k.fx},       {"fy", k.fy},         {"cx", k.cx},
          {"cy", k.cy},       {"width", k.width},   {"height", k.height}};
}

CameraIntrinsics CameraFromJson(const json& j) {
  CameraIntrinsics k;
  try {
    k.fx = j.at("fx").get<double>();
    k.fy = j.at("fy").get<double>();
    k.cx = j.at("cx").get<double>();
    k.cy = j.at("cy").get<double>();
    k.width = j.at("width").get<int>();
    k.height = j.at("height").get<int>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("camera JSON: ") + e.what(), 1);
  }
  k.Validate();
  return k;
}

CameraIntrinsics LoadCamera(const std::string& path) {
  return CameraFromJson(LoadJson(path));
}

std::vector<PosePair> ReadPosePairs(std::istream& in) {
  std::vector<PosePair> pairs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json j = json::parse(line);
      PosePair p;
      p.gt = PoseFromJson(j.at("gt"));
      p.pred = PoseFromJson(j.at("pred"));
      p.id = j.contains("id") ? j["id"].get<std::string>()
                              : std::to_string(pairs.size());
      pairs.push_back(std::move(p));
    } catch (const json::exception& e) {
      throw ParseError(e.what(), line_no);
    } catch (const ParseError& e) {
      throw ParseError(e.message(), line_no);
    }
  }
  return pairs;
}

std::vector<PosePair> LoadPosePairs(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  return ReadPosePairs(in);
}

void WriteTraceCsv(const RefineTrace& trace, std::ostream& out) {
  out << "step,loss,grad_norm,tx,ty,tz,r00,r01,r02,r10,r11,r12,r20,r21,r22\n";
  for (const RefineStep& s : trace.steps) {
    out << s.step << ',' << FormatDouble(s.loss) << ','
        << FormatDouble(s.grad_norm);
    for (int i = 0; i < 3; ++i) out << ',' << FormatDouble(s.pose.translation[i]);
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) out << ',' << FormatDouble(s.pose.rotation(r, c));
    }
    out << '\n';
  }
}

void WriteMetricCsv(const MetricReport& r, std::ostream& out) {
  out << "NPE,OE,CPE,Acc5,Acc10,6D Pose-5,6D Pose-10,n\n";
  out << FormatDouble(r.npe) << ',' << FormatDouble(r.oe_radians) << ','
      << FormatDouble(r.cpe) << ',' << FormatDouble(r.acc5) << ','
      << FormatDouble(r.acc10) << ',' << FormatDouble(r.pose6d_5) << ','
      << FormatDouble(r.pose6d_10) << ',' << r.n << '\n';
}

void WriteLerpCsv(const std::vector<LerpRow>& rows,
                  const std::vector<LossKind>& kinds, std::ostream& out) {
  out << "step,lambda,overlaps_gt";
  for (LossKind k : kinds) out << ',' << ToString(k);
  out << '\n';
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out << i << ',' << FormatDouble(rows[i].lambda) << ','
        << (rows[i].overlaps_gt ? 1 : 0);
    for (double v : rows[i].losses) out << ',' << FormatDouble(v);
    out << '\n';
  }
}

void WriteSurfaceCsv(const BinnedLossSurface& s, std::ostream& out) {
  out << "rotation_bin";
  for (int t = 0; t < s.bins_translation; ++t) out << ",t" << t;
  out << '\n';
  for (int r = 0; r < s.bins_rotation; ++r) {
    out << r;
    for (int t = 0; t < s.bins_translation; ++t) out << ',' << FormatDouble(s.Sum(r, t));
    out << '\n';
  }
}

json GridConfigToJson(const LandscapeGridConfig& cfg) {
  return {{"translation_range", cfg.translation.range},
          {"translation_steps", cfg.translation.steps},
          {"rotation_range", cfg.rotation.range},
          {"rotation_steps", cfg.rotation.steps},
          {"bins_translation", cfg.bins_translation},
          {"bins_rotation", cfg.bins_rotation},
          {"sample_budget", cfg.sample_budget},
          {"seed", cfg.seed}};
}

LandscapeGridConfig GridConfigFromJson(const json& j) {
  LandscapeGridConfig cfg;
  try {
    cfg.translation.range = j.value("translation_range", cfg.translation.range);
    cfg.translation.steps = j.value("translation_steps", cfg.translation.steps);
    cfg.rotation.range = j.value("rotation_range", cfg.rotation.range);
    cfg.rotation.steps = j.value("rotation_steps", cfg.rotation.steps);
    cfg.bins_translation = j.value("bins_translation", cfg.bins_translation);
    cfg.bins_rotation = j.value("bins_rotation", cfg.bins_rotation);
    cfg.sample_budget = j.value("sample_budget", cfg.sample_budget);
    cfg.seed = j.value("seed", cfg.seed);
  } catch (const json::exception& e) {
    throw ParseError(std::string("grid config: ") + e.what(), 1);
  }
  return cfg;
}

json SurfaceMetadata(const LandscapeGridConfig& cfg, const LandscapeGrid& grid,
                     const std::vector<BinnedLossSurface>& surfaces) {
  json losses = json::array();
  for (const BinnedLossSurface& s : surfaces) {
    std::size_t total = 0;
    for (std::size_t c : s.count) total += c;
    losses.push_back({{"loss", ToString(s.kind)},
                      {"raw_min", s.raw_min},
                      {"raw_max", s.raw_max},
                      {"degenerate_normalization", s.degenerate},
                      {"samples_binned", total}});
  }
  return {{"grid", GridConfigToJson(cfg)},
          {"samples", grid.samples.size()},
          {"product_size", grid.ProductSize()},
          {"max_translation", grid.max_translation},
          {"max_rotation", grid.max_rotation},
          {"rows", "rotation_bin"},
          {"columns", "translation_bin"},
          {"losses", losses}};
}

SilhouetteImage SurfaceHeatMap(const BinnedLossSurface& s) {
  SilhouetteImage img(s.bins_translation, s.bins_rotation);
  double max_value = 0.0;
  for (double v : s.sum) max_value = std::max(max_value, v);
  for (int r = 0; r < s.bins_rotation; ++r) {
    for (int t = 0; t < s.bins_translation; ++t) {
      img(t, r) = max_value > 0.0 ? s.Sum(r, t) / max_value : 0.0;
    }
  }
  return img;
}

void WriteLossReportHeader(std::ostream& out) {
  out << "name,value,fingerprint\n";
}

void WriteLossReportRow(const std::string& name, double value,
                        const LossConfig& cfg, std::ostream& out) {
  out << name << ',' << FormatDouble(value) << ',' << cfg.Fingerprint() << '\n';
}

}  // namespace silref
