#pragma once

#include "brdflab/math.hpp"
#include "brdflab/mesh.hpp"

namespace brdflab {

/// Pinhole camera; pose maps camera space (x right, y down, z forward) to
/// world space. Primary rays go through pixel centers.
struct Camera {
    double fx = 0.0, fy = 0.0, cx = 0.0, cy = 0.0;
    int width = 0, height = 0;
    Mat3 rotation;  // world-from-camera
    Vec3 position;

    Ray primary_ray(int px, int py) const {
        Vec3 d{(px + 0.5 - cx) / fx, (py + 0.5 - cy) / fy, 1.0};
        return {position, (rotation * d).normalized()};
    }
};

inline Camera look_at(const Vec3 &eye, const Vec3 &target, const Vec3 &up, double fov_y_deg,
                      int width, int height) {
    Camera cam;
    cam.width = width;
    cam.height = height;
    cam.cx = 0.5 * width;
    cam.cy = 0.5 * height;
    cam.fy = 0.5 * height / std::tan(0.5 * fov_y_deg * kPi / 180.0);
    cam.fx = cam.fy;
    cam.position = eye;

    Vec3 fwd = (target - eye).normalized();
    Vec3 right = cross(fwd, up).normalized();
    Vec3 down = cross(fwd, right);
    cam.rotation = Mat3::from_cols(right, down, fwd);
    return cam;
}

/// Ring of cameras around the y axis at fixed elevation, all looking at the
/// target.
inline std::vector<Camera> camera_ring(int count, double radius, double elevation_deg,
                                       const Vec3 &target, double fov_y_deg, int width,
                                       int height) {
    std::vector<Camera> cams;
    double el = elevation_deg * kPi / 180.0;
    for (int i = 0; i < count; ++i) {
        double az = kTwoPi * i / count;
        Vec3 eye = target + radius * Vec3{std::cos(el) * std::cos(az), std::sin(el),
                                          std::cos(el) * std::sin(az)};
        cams.push_back(look_at(eye, target, {0, 1, 0}, fov_y_deg, width, height));
    }
    return cams;
}

/// Directional light: l points from the surface toward the light.
struct DirectionalLight {
    Vec3 direction{0, 0, 1};
    RGB irradiance{1, 1, 1};
};

}  // namespace brdflab
