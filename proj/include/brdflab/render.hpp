#pragma once

#include <functional>
#include <optional>

#include "brdflab/angles.hpp"
#include "brdflab/camera.hpp"
#include "brdflab/image.hpp"
#include "brdflab/lbo.hpp"
#include "brdflab/mesh.hpp"

namespace brdflab {

enum class EncodingKind { LBO, Positional };

/// How surface points are turned into network features: intrinsic LBO
/// eigenfunction blocks, or extrinsic sin/cos encoding of the raw
/// coordinates for meshes beyond the eigensolver budget.
struct SceneEncodingConfig {
    EncodingKind kind = EncodingKind::LBO;
    int eigenfunctions = 128;
    std::vector<std::pair<int, int>> blocks;  // empty = default layout
    PositionalEncodingConfig positional{3, true};
    int lbo_vertex_budget = 3000;
};

/// Immutable render/eval context: geometry, acceleration structure, point
/// encoding basis, cameras and lights. Build once, share freely.
struct Scene {
    TriangleMesh mesh;
    BVH bvh;
    std::optional<LBOBasis> basis;
    SceneEncodingConfig enc;
    std::vector<Camera> cameras;
    std::vector<DirectionalLight> lights;
    double shadow_bias = 0.0;

    int position_feature_dim() const {
        if (enc.kind == EncodingKind::LBO) return basis->feature_dim();
        return encoded_dim(3, enc.positional);
    }

    void encode_point_append(int face, double u, double v, std::vector<double> &out) const {
        if (enc.kind == EncodingKind::LBO) {
            lbo_encode_append(*basis, mesh, face, u, v, out);
        } else {
            Vec3 p = mesh.face_point(face, u, v);
            double xyz[3] = {p.x, p.y, p.z};
            positional_encode_append(std::span<const double>(xyz, 3), enc.positional, out);
        }
    }

    std::vector<double> encode_point(int face, double u, double v) const {
        std::vector<double> out;
        out.reserve(position_feature_dim());
        encode_point_append(face, u, v, out);
        return out;
    }
};

inline Scene make_scene(TriangleMesh mesh, const SceneEncodingConfig &enc,
                        std::vector<Camera> cameras, std::vector<DirectionalLight> lights,
                        double shadow_bias_scale = 1e-4,
                        std::vector<std::string> *warnings = nullptr) {
    Scene scene;
    scene.mesh = std::move(mesh);
    scene.bvh = BVH(scene.mesh);
    scene.enc = enc;
    if (enc.kind == EncodingKind::LBO) {
        scene.basis = lbo_basis(scene.mesh, enc.eigenfunctions, enc.lbo_vertex_budget, warnings);
        scene.basis->blocks =
            enc.blocks.empty() ? default_lbo_blocks(enc.eigenfunctions) : enc.blocks;
    }
    scene.cameras = std::move(cameras);
    scene.lights = std::move(lights);
    scene.shadow_bias = shadow_bias_scale * scene.mesh.bbox_diagonal();
    return scene;
}

/// Everything known about one shaded primary hit.
struct ShadePoint {
    int face = -1;
    double u = 0.0, v = 0.0;
    Vec3 position;
    LocalFrame frame;  // from the interpolated normal
};

/// BRDF evaluated at a surface point for a view/light direction pair.
using ShadeFn = std::function<RGB(const ShadePoint &, const Vec3 &v, const Vec3 &l)>;

struct PixelAux {
    std::uint8_t hit = 0;
    std::uint8_t shadowed = 0;
    std::int32_t face = -1;
    double u = 0.0, v = 0.0;
    Vec3 position;
    Vec3 normal;
};

struct RenderResult {
    Image image;
    std::vector<PixelAux> aux;  // row-major, one per pixel

    const PixelAux &at(int x, int y) const { return aux[std::size_t(y) * image.width + x]; }
};

/// One directional-light rendering: per pixel
///   L_o = f(x, l, v) * L_i * I_s(x, l) * max(0, cos theta_l),
/// background and below-horizon views are black. The shadow indicator casts
/// a bias-offset secondary ray toward the light.
inline RenderResult render_view(const Scene &scene, const Camera &cam,
                                const DirectionalLight &light, const ShadeFn &brdf) {
    RenderResult res;
    res.image = Image(cam.width, cam.height);
    res.aux.assign(std::size_t(cam.width) * cam.height, PixelAux{});

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 4)
#endif
    for (int y = 0; y < cam.height; ++y) {
        for (int x = 0; x < cam.width; ++x) {
            Ray ray = cam.primary_ray(x, y);
            auto hit = scene.bvh.intersect(ray);
            if (!hit) continue;

            PixelAux &aux = res.aux[std::size_t(y) * cam.width + x];
            aux.hit = 1;
            aux.face = hit->face;
            aux.u = hit->u;
            aux.v = hit->v;
            aux.position = hit->position;
            aux.normal = hit->normal;

            int visible =
                shadow_visibility(scene.bvh, hit->position, hit->normal, light.direction,
                                  scene.shadow_bias);
            aux.shadowed = visible ? 0 : 1;

            double cos_l = dot(hit->normal, light.direction);
            Vec3 v = -ray.d;
            double cos_v = dot(hit->normal, v);
            if (!visible || cos_l <= 0.0 || cos_v <= 0.0) continue;  // pixel stays black

            ShadePoint sp{hit->face, hit->u, hit->v, hit->position, make_frame(hit->normal)};
            RGB f = brdf(sp, v, light.direction);
            res.image.set(x, y, f * light.irradiance * cos_l);
        }
    }
    return res;
}

}  // namespace brdflab
