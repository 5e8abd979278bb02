#pragma once

#include <array>
#include <cmath>

namespace islab {

// Flat spacetime, signature (-,+,+,+). Vectors carry their index position by
// convention at the call site; helpers below raise/lower with g = diag(-1,1,1,1).
using Vec4 = std::array<double, 4>;
using Mat4 = std::array<std::array<double, 4>, 4>;

inline constexpr double metric_diag(int mu) { return mu == 0 ? -1.0 : 1.0; }

inline Vec4 flip_time(const Vec4& v) { return {-v[0], v[1], v[2], v[3]}; }
inline Vec4 lower_index(const Vec4& v_upper) { return flip_time(v_upper); }
inline Vec4 raise_index(const Vec4& v_lower) { return flip_time(v_lower); }

// a^mu b^nu g_{mu nu} for two upper-index vectors.
inline double minkowski_dot(const Vec4& a, const Vec4& b) {
    return -a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3];
}

inline Mat4 zero_mat4() {
    Mat4 m{};
    for (auto& row : m) row.fill(0.0);
    return m;
}

}  // namespace islab
