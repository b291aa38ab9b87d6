#pragma once

#include <Eigen/Dense>
#include <cmath>

namespace acm {

inline Eigen::Matrix3d rot_x(double a) {
    Eigen::Matrix3d r;
    r << 1, 0, 0, 0, std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a);
    return r;
}

inline Eigen::Matrix3d rot_y(double a) {
    Eigen::Matrix3d r;
    r << std::cos(a), 0, std::sin(a), 0, 1, 0, -std::sin(a), 0, std::cos(a);
    return r;
}

inline Eigen::Matrix3d rot_z(double a) {
    Eigen::Matrix3d r;
    r << std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a), 0, 0, 0, 1;
    return r;
}

inline Eigen::Matrix3d axis_angle(const Eigen::Vector3d& axis, double angle) {
    return Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix();
}

/** Wraps an angle into [-pi, pi]. */
inline double wrap_angle(double a) {
    a = std::remainder(a, 2.0 * M_PI);
    return a;
}

/** Absolute angular difference in [0, pi]. */
inline double angle_dist(double a, double b) { return std::abs(wrap_angle(a - b)); }

}  // namespace acm
