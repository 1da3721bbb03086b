#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace knotgeo {

// Vertex-indexed data: one row per vertex (or per edge), one column per
// ambient coordinate. Covectors use the same layout; the duality pairing is
// the entrywise dot product.
using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using RowVec = Eigen::RowVectorXd;

// A tangent field shares the vertex layout of the curve it varies.
using TangentField = Mat;
using Covector = Mat;

inline double pair_dual(const Covector& c, const TangentField& u) {
    return c.cwiseProduct(u).sum();
}

// Raised when a polyline fails the embeddedness proxy: the minimal distance
// between non-adjacent edge segments dropped to (or below) the threshold.
struct EmbeddingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raised when a constraint's normal system DΦ J⁻¹ DΦᵀ is rank-deficient.
struct ConstraintDegeneracyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Reduction {
    Ordered,   // fixed index order, bitwise reproducible
    Parallel   // unordered parallel reduction, tolerance-tested only
};

// Admissible kernel exponent range.
inline void require_exponent(double s) {
    if (!(s > 1.5 && s < 2.0))
        throw std::invalid_argument("exponent s must lie in (3/2, 2), got " + std::to_string(s));
}

} // namespace knotgeo
