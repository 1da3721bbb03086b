#pragma once

#include "knotgeo/geodesic.hpp"

#include <iosfwd>
#include <string>

namespace knotgeo {

/// Curve JSON: {"dim": m, "vertices": [[...m floats...], ...]}.
/// Strict parse: rejects ragged rows, non-finite values, wrong types.
Curve parse_curve(std::istream& in);
Curve parse_curve_file(const std::string& path);
std::string curve_to_json(const Curve& c);
void write_curve_file(const Curve& c, const std::string& path);

/// Tangent-field JSON: {"dim": m, "values": [[...m floats...], ...]}.
TangentField parse_field(std::istream& in, const Curve& owner);
TangentField parse_field_file(const std::string& path, const Curve& owner);
std::string field_to_json(const TangentField& u);
void write_field_file(const TangentField& u, const std::string& path);

/// One trajectory frame per line:
/// {"t":..., "vertices":[[...]], "energy":..., "length":..., "speed":..., "min_separation":...}
void write_frames(const Trajectory& traj, std::ostream& out);
void write_frames_file(const Trajectory& traj, const std::string& path);
void write_frames(const DiscretePath& path, double s, std::ostream& out);
void write_frames_file(const DiscretePath& path, double s, const std::string& file);

struct Frame {
    double t = 0.0;
    Mat vertices;
    double energy = 0.0, length = 0.0, speed = 0.0, min_separation = 0.0;
};
/// Strict JSONL read-back (rejects non-finite fields).
std::vector<Frame> read_frames(std::istream& in);

/// One polyline OBJ per frame, written as DIR/frame_000000.obj, ...
void write_obj_frames(const Trajectory& traj, const std::string& dir);
void write_obj_frames(const DiscretePath& path, const std::string& dir);

} // namespace knotgeo
