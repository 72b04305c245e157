#pragma once

#include <array>
#include <cmath>
#include <cstdlib>

namespace morphevo {

template <typename T>
struct Vec3 {
  T x{}, y{}, z{};

  friend Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend Vec3 operator*(T s, Vec3 v) { return {s * v.x, s * v.y, s * v.z}; }
  friend bool operator==(Vec3 a, Vec3 b) { return a.x == b.x && a.y == b.y && a.z == b.z; }
  friend bool operator!=(Vec3 a, Vec3 b) { return !(a == b); }
};

using Vec3i = Vec3<int>;
using Vec3d = Vec3<double>;

inline int manhattan(Vec3i a, Vec3i b) {
  return std::abs(a.x - b.x) + std::abs(a.y - b.y) + std::abs(a.z - b.z);
}

inline Vec3d to_vec3d(Vec3i v) {
  return {static_cast<double>(v.x), static_cast<double>(v.y), static_cast<double>(v.z)};
}

// Row-major 3x3 matrix. Integer instantiation carries exact quarter-turn
// rotations through the grid embedding; the double one serves the simulator.
template <typename T>
struct Mat3 {
  std::array<T, 9> m{};

  static Mat3 identity() { return {{T(1), T(0), T(0), T(0), T(1), T(0), T(0), T(0), T(1)}}; }

  friend Mat3 operator*(const Mat3& a, const Mat3& b) {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        T s{};
        for (int k = 0; k < 3; ++k) s += a.m[3 * i + k] * b.m[3 * k + j];
        r.m[3 * i + j] = s;
      }
    return r;
  }

  friend Vec3<T> operator*(const Mat3& a, Vec3<T> v) {
    return {a.m[0] * v.x + a.m[1] * v.y + a.m[2] * v.z,
            a.m[3] * v.x + a.m[4] * v.y + a.m[5] * v.z,
            a.m[6] * v.x + a.m[7] * v.y + a.m[8] * v.z};
  }

  friend bool operator==(const Mat3& a, const Mat3& b) { return a.m == b.m; }
};

using Mat3i = Mat3<int>;
using Mat3d = Mat3<double>;

inline Mat3d to_mat3d(const Mat3i& a) {
  Mat3d r;
  for (int i = 0; i < 9; ++i) r.m[i] = static_cast<double>(a.m[i]);
  return r;
}

// Exact rotation by quarter-turns counterclockwise about each axis.
inline Mat3i rot_z_quarter(int turns) {
  static constexpr std::array<std::array<int, 9>, 4> table{{
      {1, 0, 0, 0, 1, 0, 0, 0, 1},
      {0, -1, 0, 1, 0, 0, 0, 0, 1},
      {-1, 0, 0, 0, -1, 0, 0, 0, 1},
      {0, 1, 0, -1, 0, 0, 0, 0, 1},
  }};
  return {table[static_cast<unsigned>(turns) % 4]};
}

inline Mat3i rot_y_quarter(int turns) {
  static constexpr std::array<std::array<int, 9>, 4> table{{
      {1, 0, 0, 0, 1, 0, 0, 0, 1},
      {0, 0, 1, 0, 1, 0, -1, 0, 0},
      {-1, 0, 0, 0, 1, 0, 0, 0, -1},
      {0, 0, -1, 0, 1, 0, 1, 0, 0},
  }};
  return {table[static_cast<unsigned>(turns) % 4]};
}

inline Mat3d rot_x_rad(double a) {
  const double c = std::cos(a), s = std::sin(a);
  return {{1, 0, 0, 0, c, -s, 0, s, c}};
}

inline Mat3d rot_z_rad(double a) {
  const double c = std::cos(a), s = std::sin(a);
  return {{c, -s, 0, s, c, 0, 0, 0, 1}};
}

}  // namespace morphevo
