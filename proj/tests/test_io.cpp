#include "knotgeo/io.hpp"

#include "knotgeo/check.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace knotgeo;

TEST_CASE("curve JSON round trip") {
    Mat tri(3, 2);
    tri << 0, 0, 1, 0, 0.5, 1;
    const Curve c(tri);
    std::istringstream in(curve_to_json(c));
    const Curve back = parse_curve(in);
    CHECK(back.dim() == 2);
    CHECK((back.vertices() - tri).cwiseAbs().maxCoeff() == 0.0);

    // Larger fixture with full double precision.
    const Curve tk = make_torus_knot(2, 3, 512);
    std::istringstream in2(curve_to_json(tk));
    const Curve back2 = parse_curve(in2);
    CHECK(back2.n() == 512);
    CHECK(back2.dim() == 3);
    CHECK((back2.vertices() - tk.vertices()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("curve JSON strictness") {
    const auto reject = [](const std::string& text) {
        std::istringstream in(text);
        CHECK_THROWS_AS(parse_curve(in), ParseError);
    };
    reject("[1, 2, 3]");
    reject("{\"vertices\": [[0,0],[1,0],[0,1]]}");                       // missing dim
    reject("{\"dim\": 2, \"vertices\": [[0,0],[1,0],[0,1,5]]}");         // ragged row
    reject("{\"dim\": 2, \"vertices\": [[0,0],[1,\"x\"],[0,1]]}");       // non-numeric
    reject("{\"dim\": 1, \"vertices\": [[0],[1],[2]]}");                 // dim too small
    reject("{\"dim\": 2, \"vertices\": []}");
    {
        std::istringstream in("{\"dim\": 2, \"vertices\": [[0,0],[1e999,0],[0,1]]}");
        CHECK_THROWS(parse_curve(in));  // Inf either fails JSON parse or the finite check
    }
}

TEST_CASE("field JSON shape guard") {
    const Curve c = make_circle(8, 1.0);
    std::istringstream good(R"({"dim":3,"values":[[0,0,1],[0,0,1],[0,0,1],[0,0,1],
                                                  [0,0,1],[0,0,1],[0,0,1],[0,0,1]]})");
    const TangentField u = parse_field(good, c);
    CHECK(u.rows() == 8);
    std::istringstream bad(R"({"dim":3,"values":[[0,0,1],[0,0,1]]})");
    CHECK_THROWS_AS(parse_field(bad, c), ParseError);
}

TEST_CASE("trajectory frames round trip and strictness") {
    const double s = 1.75;
    const Curve c = make_circle(16, 1.0);
    std::mt19937_64 rng(4);
    TangentField v = random_field(16, 3, rng);
    v /= g_norm(c, s, v);
    ShootOptions o;
    o.T = 0.1;
    o.steps = 5;
    const Trajectory traj = shoot(c, v, s, o);

    std::ostringstream out;
    write_frames(traj, out);
    std::istringstream in(out.str());
    const std::vector<Frame> frames = read_frames(in);
    REQUIRE(frames.size() == traj.states.size());
    for (std::size_t k = 0; k < frames.size(); ++k) {
        CHECK(frames[k].t == traj.states[k].t);
        CHECK(frames[k].energy == traj.diag[k].energy);
        CHECK((frames[k].vertices - traj.states[k].curve.vertices()).cwiseAbs().maxCoeff() == 0.0);
    }

    SUBCASE("NaN energy is rejected on read-back") {
        std::istringstream bad(
            R"({"t":0,"vertices":[[0,0,0],[1,0,0],[0,1,0]],"energy":null,"length":1,"speed":1,"min_separation":1})");
        CHECK_THROWS_AS(read_frames(bad), ParseError);
    }
    SUBCASE("missing field is rejected") {
        std::istringstream bad(
            R"({"t":0,"vertices":[[0,0,0],[1,0,0],[0,1,0]],"length":1,"speed":1,"min_separation":1})");
        CHECK_THROWS_AS(read_frames(bad), ParseError);
    }
}

TEST_CASE("obj frames") {
    const Curve c = make_circle(8, 1.0);
    DiscretePath p;
    p.curves.push_back(c);
    p.curves.push_back(c);
    const std::string dir = "io_test_obj_frames";
    write_obj_frames(p, dir);
    std::ifstream f(dir + "/frame_000001.obj");
    REQUIRE(f.good());
    std::string line;
    int vcount = 0, lcount = 0;
    while (std::getline(f, line)) {
        if (line.rfind("v ", 0) == 0) ++vcount;
        if (line.rfind("l ", 0) == 0) ++lcount;
    }
    CHECK(vcount == 8);
    CHECK(lcount == 1);
    std::filesystem::remove_all(dir);
}
