#pragma once

// Fixed quadrature rules. Every integrand in the library is polynomial, and
// each rule's degree covers the worst case at its call sites, so integration
// is exact up to roundoff:
//   - triangle, degree 4, 6 points: products of first-order vector fields
//     and their linear divergences (mass/divergence blocks, residual terms)
//   - edge, degree 5, 3 Gauss points: normal traces (degree <= 2) times
//     first-order moments
//   - triangle degree 6 / edge degree 7: test-side re-evaluation only
// Barycentric coordinates, weights normalized to sum 1; physical integrals
// scale by element area (or edge length).

namespace eigenbound::quad {

inline constexpr int kTri4N = 6;
inline constexpr double kTri4B[kTri4N][3] = {
    {0.10810301816807022736, 0.44594849091596488632, 0.44594849091596488632},
    {0.44594849091596488632, 0.10810301816807022736, 0.44594849091596488632},
    {0.44594849091596488632, 0.44594849091596488632, 0.10810301816807022736},
    {0.81684757298045851308, 0.09157621350977074346, 0.09157621350977074346},
    {0.09157621350977074346, 0.81684757298045851308, 0.09157621350977074346},
    {0.09157621350977074346, 0.09157621350977074346, 0.81684757298045851308},
};
inline constexpr double kTri4W[kTri4N] = {
    0.22338158967801146570, 0.22338158967801146570, 0.22338158967801146570,
    0.10995174365532186764, 0.10995174365532186764, 0.10995174365532186764,
};

inline constexpr int kTri6N = 12;
inline constexpr double kTri6B[kTri6N][3] = {
    {0.87382197101699554332, 0.06308901449150222834, 0.06308901449150222834},
    {0.06308901449150222834, 0.87382197101699554332, 0.06308901449150222834},
    {0.06308901449150222834, 0.06308901449150222834, 0.87382197101699554332},
    {0.50142650965817915742, 0.24928674517091042129, 0.24928674517091042129},
    {0.24928674517091042129, 0.50142650965817915742, 0.24928674517091042129},
    {0.24928674517091042129, 0.24928674517091042129, 0.50142650965817915742},
    {0.05314504984481694735, 0.31035245103378440542, 0.63650249912139864723},
    {0.05314504984481694735, 0.63650249912139864723, 0.31035245103378440542},
    {0.31035245103378440542, 0.05314504984481694735, 0.63650249912139864723},
    {0.31035245103378440542, 0.63650249912139864723, 0.05314504984481694735},
    {0.63650249912139864723, 0.05314504984481694735, 0.31035245103378440542},
    {0.63650249912139864723, 0.31035245103378440542, 0.05314504984481694735},
};
inline constexpr double kTri6W[kTri6N] = {
    0.05084490637020681692, 0.05084490637020681692, 0.05084490637020681692,
    0.11678627572637936603, 0.11678627572637936603, 0.11678627572637936603,
    0.08285107561837357519, 0.08285107561837357519, 0.08285107561837357519,
    0.08285107561837357519, 0.08285107561837357519, 0.08285107561837357519,
};

// Gauss rules on [0, 1].
inline constexpr int kEdge3N = 3;
inline constexpr double kEdge3X[kEdge3N] = {
    0.11270166537925831148, 0.5, 0.88729833462074168852};
inline constexpr double kEdge3W[kEdge3N] = {
    0.27777777777777777778, 0.44444444444444444444, 0.27777777777777777778};

inline constexpr int kEdge4N = 4;
inline constexpr double kEdge4X[kEdge4N] = {
    0.06943184420297371239, 0.33000947820757186760,
    0.66999052179242813240, 0.93056815579702628761};
inline constexpr double kEdge4W[kEdge4N] = {
    0.17392742256872692869, 0.32607257743127307131,
    0.32607257743127307131, 0.17392742256872692869};

}  // namespace eigenbound::quad
