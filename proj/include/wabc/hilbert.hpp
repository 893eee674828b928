#pragma once

#include <cstdint>
#include <vector>

#include "wabc/ground_metric.hpp"
#include "wabc/point_cloud.hpp"
#include "wabc/types.hpp"

namespace wabc {

// 128-bit curve index; supports d * bits <= 128.
using HilbertIndex = unsigned __int128;

// Axis-aligned normalization box used to quantize points to curve cells.
struct HilbertBox {
  Vector lo;
  Vector hi;
};

inline constexpr int kHilbertDefaultBits = 16;
inline constexpr int kHilbertMaxDim = 8;

// Smallest box containing every row of the given clouds, expanded by a 1e-9
// relative margin per axis so boundary points quantize strictly inside.
HilbertBox joint_bounding_box(const std::vector<const PointCloud*>& clouds);

// Curve index of one point.  Coordinates are quantized to 2^bits cells along
// each axis of the box (degenerate axes map to the middle cell); the cell
// vector is then converted with Skilling's transpose algorithm and the bits
// interleaved most-significant first.
HilbertIndex hilbert_index(const Eigen::Ref<const Eigen::RowVectorXd>& point,
                           const HilbertBox& box, int bits = kHilbertDefaultBits);

// Permutation that sorts rows by curve index; ties are broken by
// lexicographic coordinate comparison, then by row number.
std::vector<int> hilbert_sort_order(const PointCloud& c, const HilbertBox& box,
                                    int bits = kHilbertDefaultBits);

// Distance obtained by sorting both clouds along the curve and pairing rank
// for rank: value = (n^-1 sum rho(x_(i), y_(i))^p)^(1/p).  Upper-bounds the
// exact transport distance; a metric on equal-size clouds for a fixed box.
// The two-argument form builds the joint bounding box of x and y.
struct DistanceResult;
DistanceResult hilbert_distance(const PointCloud& x, const PointCloud& y,
                                const GroundMetric& m,
                                int bits = kHilbertDefaultBits);
DistanceResult hilbert_distance(const PointCloud& x, const PointCloud& y,
                                const GroundMetric& m, const HilbertBox& box,
                                int bits = kHilbertDefaultBits);

}  // namespace wabc
