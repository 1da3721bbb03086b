#include "knotgeo/io.hpp"

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace knotgeo {

using nlohmann::json;

namespace {

Mat parse_rows(const json& rows, int dim, const std::string& what) {
    if (!rows.is_array() || rows.empty())
        throw ParseError(what + ": non-empty array of rows expected");
    Mat out(rows.size(), dim);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (!row.is_array() || static_cast<int>(row.size()) != dim)
            throw ParseError(what + ": row " + std::to_string(r) + " is ragged (expected " +
                             std::to_string(dim) + " entries)");
        for (int c = 0; c < dim; ++c) {
            if (!row[c].is_number())
                throw ParseError(what + ": row " + std::to_string(r) + ", entry " +
                                 std::to_string(c) + " is not a number");
            const double v = row[c].get<double>();
            if (!std::isfinite(v))
                throw ParseError(what + ": non-finite value at row " + std::to_string(r) +
                                 ", entry " + std::to_string(c));
            out(r, c) = v;
        }
    }
    return out;
}

Mat parse_point_rows(const json& j, const char* key, const char* what) {
    if (!j.is_object()) throw ParseError(std::string(what) + ": top-level JSON object expected");
    if (!j.contains("dim") || !j["dim"].is_number_integer())
        throw ParseError(std::string(what) + ": integer field 'dim' missing");
    if (!j.contains(key) || !j[key].is_array())
        throw ParseError(std::string(what) + ": array field '" + key + "' missing");
    const int dim = j["dim"].get<int>();
    if (dim < 2) throw ParseError(std::string(what) + ": dim must be >= 2");
    return parse_rows(j[key], dim, std::string(what) + ": '" + key + "'");
}

json rows_to_json(const Mat& m) {
    json rows = json::array();
    for (int i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (int c = 0; c < m.cols(); ++c) row.push_back(m(i, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

json parse_stream(std::istream& in, const char* what) {
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError(std::string(what) + ": " + e.what());
    }
    return j;
}

} // namespace

Curve parse_curve(std::istream& in) {
    return Curve(parse_point_rows(parse_stream(in, "curve"), "vertices", "curve"));
}

Curve parse_curve_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open curve file " + path);
    return parse_curve(in);
}

std::string curve_to_json(const Curve& c) {
    json j;
    j["dim"] = c.dim();
    j["vertices"] = rows_to_json(c.vertices());
    return j.dump();
}

void write_curve_file(const Curve& c, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open " + path + " for writing");
    out << curve_to_json(c) << '\n';
}

TangentField parse_field(std::istream& in, const Curve& owner) {
    Mat values = parse_point_rows(parse_stream(in, "field"), "values", "field");
    if (values.rows() != owner.n() || values.cols() != owner.dim())
        throw ParseError("field shape (" + std::to_string(values.rows()) + "x" +
                         std::to_string(values.cols()) + ") does not match curve (" +
                         std::to_string(owner.n()) + "x" + std::to_string(owner.dim()) + ")");
    return values;
}

TangentField parse_field_file(const std::string& path, const Curve& owner) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open field file " + path);
    return parse_field(in, owner);
}

std::string field_to_json(const TangentField& u) {
    json j;
    j["dim"] = static_cast<int>(u.cols());
    j["values"] = rows_to_json(u);
    return j.dump();
}

void write_field_file(const TangentField& u, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open " + path + " for writing");
    out << field_to_json(u) << '\n';
}

namespace {

void write_frame_line(std::ostream& out, double t, const Mat& verts, double E, double L,
                      double speed, double sep) {
    json j;
    j["t"] = t;
    j["vertices"] = rows_to_json(verts);
    j["energy"] = E;
    j["length"] = L;
    j["speed"] = speed;
    j["min_separation"] = sep;
    out << j.dump() << '\n';
}

} // namespace

void write_frames(const Trajectory& traj, std::ostream& out) {
    for (std::size_t k = 0; k < traj.states.size(); ++k) {
        const auto& st = traj.states[k];
        const auto& d = traj.diag[k];
        write_frame_line(out, st.t, st.curve.vertices(), d.energy, d.length, d.speed,
                         d.min_separation);
    }
}

void write_frames_file(const Trajectory& traj, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open " + path + " for writing");
    write_frames(traj, out);
}

void write_frames(const DiscretePath& path, double s, std::ostream& out) {
    const int K = path.segments();
    for (int k = 0; k <= K; ++k) {
        const Curve& c = path.curves[k];
        // Segment speed of the incoming segment (0 for the first frame).
        double speed = 0.0;
        if (k > 0) {
            const Mat delta = c.vertices() - path.curves[k - 1].vertices();
            const Curve mid(0.5 * (c.vertices() + path.curves[k - 1].vertices()));
            speed = K * std::sqrt(assemble_gram(mid, s).quadratic(delta, delta));
        }
        write_frame_line(out, static_cast<double>(k) / K, c.vertices(), energy(c, s),
                         arc_length(c), speed, min_separation(c));
    }
}

void write_frames_file(const DiscretePath& path, double s, const std::string& file) {
    std::ofstream out(file);
    if (!out) throw ParseError("cannot open " + file + " for writing");
    write_frames(path, s, out);
}

std::vector<Frame> read_frames(std::istream& in) {
    std::vector<Frame> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw ParseError("frame line " + std::to_string(lineno) + ": " + e.what());
        }
        Frame f;
        const std::string where = "frame line " + std::to_string(lineno);
        if (!j.contains("vertices") || !j["vertices"].is_array() || j["vertices"].empty() ||
            !j["vertices"][0].is_array())
            throw ParseError(where + ": 'vertices' array missing");
        f.vertices = parse_rows(j["vertices"], static_cast<int>(j["vertices"][0].size()), where);
        for (const char* key : {"t", "energy", "length", "speed", "min_separation"}) {
            if (!j.contains(key) || !j[key].is_number())
                throw ParseError("frame line " + std::to_string(lineno) + ": numeric field '" +
                                 std::string(key) + "' missing");
            const double v = j[key].get<double>();
            if (!std::isfinite(v))
                throw ParseError("frame line " + std::to_string(lineno) + ": field '" +
                                 std::string(key) + "' is not finite");
        }
        f.t = j["t"];
        f.energy = j["energy"];
        f.length = j["length"];
        f.speed = j["speed"];
        f.min_separation = j["min_separation"];
        out.push_back(std::move(f));
    }
    return out;
}

namespace {

void write_obj(const Mat& verts, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open " + path + " for writing");
    out << std::setprecision(17);
    const int n = static_cast<int>(verts.rows());
    for (int i = 0; i < n; ++i) {
        out << "v";
        for (int c = 0; c < verts.cols(); ++c) out << ' ' << verts(i, c);
        for (int c = static_cast<int>(verts.cols()); c < 3; ++c) out << " 0";
        out << '\n';
    }
    out << "l";
    for (int i = 1; i <= n; ++i) out << ' ' << i;
    out << " 1\n";
}

std::string frame_name(const std::string& dir, int k) {
    std::ostringstream ss;
    ss << dir << "/frame_" << std::setw(6) << std::setfill('0') << k << ".obj";
    return ss.str();
}

} // namespace

void write_obj_frames(const Trajectory& traj, const std::string& dir) {
    std::filesystem::create_directories(dir);
    for (std::size_t k = 0; k < traj.states.size(); ++k)
        write_obj(traj.states[k].curve.vertices(), frame_name(dir, static_cast<int>(k)));
}

void write_obj_frames(const DiscretePath& path, const std::string& dir) {
    std::filesystem::create_directories(dir);
    for (std::size_t k = 0; k < path.curves.size(); ++k)
        write_obj(path.curves[k].vertices(), frame_name(dir, static_cast<int>(k)));
}

} // namespace knotgeo
