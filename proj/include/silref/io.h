#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "silref/analysis.h"
#include "silref/losses.h"
#include "silref/metrics.h"
#include "silref/refine.h"
#include "silref/so3.h"

namespace silref {

// Pose: {"rotation": [[r00, r01, r02], ...], "translation": [tx, ty, tz]},
// row-major, meters. Rotations are checked for orthonormality (1e-6).
nlohmann::json PoseToJson(const Pose& pose);
Pose PoseFromJson(const nlohmann::json& j);
Pose LoadPose(const std::string& path);
void SavePose(const Pose& pose, const std::string& path);

// Camera: {"fx", "fy", "cx", "cy", "width", "height"}.
nlohmann::json CameraToJson(const CameraIntrinsics& k);
CameraIntrinsics CameraFromJson(const nlohmann::json& j);
CameraIntrinsics LoadCamera(const std::string& path);

nlohmann::json LoadJson(const std::string& path);
void SaveJson(const nlohmann::json& j, const std::string& path);

// One {"id": ..., "gt": Pose, "pred": Pose} object per line; blank lines
// are skipped.
std::vector<PosePair> ReadPosePairs(std::istream& in);
std::vector<PosePair> LoadPosePairs(const std::string& path);

// CSV writers. Every table starts with a header row; doubles are written
// with round-trip precision.
void WriteTraceCsv(const RefineTrace& trace, std::ostream& out);
void WriteMetricCsv(const MetricReport& report, std::ostream& out);
void WriteLerpCsv(const std::vector<LerpRow>& rows,
                  const std::vector<LossKind>& kinds, std::ostream& out);
// Matrix of accumulated values, one row per rotation bin.
void WriteSurfaceCsv(const BinnedLossSurface& surface, std::ostream& out);
nlohmann::json SurfaceMetadata(const LandscapeGridConfig& cfg,
                               const LandscapeGrid& grid,
                               const std::vector<BinnedLossSurface>& surfaces);
// Cells scaled by the surface max into 8-bit, row = rotation bin.
SilhouetteImage SurfaceHeatMap(const BinnedLossSurface& surface);

LandscapeGridConfig GridConfigFromJson(const nlohmann::json& j);
nlohmann::json GridConfigToJson(const LandscapeGridConfig& cfg);

// "name,value,fingerprint" rows.
void WriteLossReportHeader(std::ostream& out);
void WriteLossReportRow(const std::string& name, double value,
                        const LossConfig& cfg, std::ostream& out);

std::string FormatDouble(double v);

}  // namespace silref
