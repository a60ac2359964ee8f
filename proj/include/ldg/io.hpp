// File formats: tensor and loop CSV, little-endian binary arrays, field
// snapshots, and JSON renderings of reports.
#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "ldg/balls.hpp"
#include "ldg/defects.hpp"
#include "ldg/diagnostics.hpp"
#include "ldg/grid.hpp"
#include "ldg/q8.hpp"

namespace ldg {

using json = nlohmann::json;

// Header c1..c5, one tensor per row, full double precision.
void write_tensors_csv(const std::string& path, const std::vector<QTensor>& qs);
std::vector<QTensor> read_tensors_csv(const std::string& path);

// Raw little-endian float64, five per tensor.
void write_tensors_bin(const std::string& path, const std::vector<QTensor>& qs);
std::vector<QTensor> read_tensors_bin(const std::string& path);

// Loop files: either tensor rows (c1..c5) or frame rows (nx,ny,nz,mx,my,mz);
// an optional leading theta column is ignored.
void write_loop_csv(const std::string& path, const NLoop& loop);
NLoop read_loop_csv(const std::string& path, const MaterialParams& p);

// Binary snapshot: magic, version, kind, extents, h, eps, coefficients and
// grid shape, then node-major 5 x float64 for every grid node.
void write_snapshot(const std::string& path, const Field& f);
Field read_snapshot(const std::string& path);
// x,y,z,type,c1..c5,phi0,density for every in-domain node.
void write_field_csv(const std::string& path, const Field& f);

void write_mask_csv(const std::string& path, const DefectMask& m, const Domain& d);
void write_measure_csv(const std::string& path, const MeasureGrid& m);

json to_json(const MaterialParams& p);
MaterialParams params_from_json(const json& j);
json to_json(const HomotopyClass& hc);
json to_json(const EnergyReport& r);
json to_json(const Diagnostics& d);
json to_json(const SliceBound& s);
json to_json(const BallConstruction& b);
json to_json(const DefectMask& m);
json to_json(const ClearingOut& c);
json to_json(const JunctionReport& j);

void write_json(const std::string& path, const json& j);
json read_json(const std::string& path);

}  // namespace ldg
