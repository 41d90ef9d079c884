#pragma once

#include <array>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "brdflab/math.hpp"

namespace brdflab {

struct TriangleMesh {
    std::vector<Vec3> positions;
    std::vector<std::array<int, 3>> faces;
    std::vector<Vec3> normals;  // per vertex, unit length

    Vec3 face_point(int face, double u, double v) const {
        const auto &f = faces[face];
        return positions[f[0]] * (1.0 - u - v) + positions[f[1]] * u + positions[f[2]] * v;
    }

    Vec3 face_normal_interp(int face, double u, double v) const {
        const auto &f = faces[face];
        Vec3 n = normals[f[0]] * (1.0 - u - v) + normals[f[1]] * u + normals[f[2]] * v;
        double len = n.norm();
        return len > 0.0 ? n / len : Vec3{0, 0, 1};
    }

    double face_area(int face) const {
        const auto &f = faces[face];
        return 0.5 * cross(positions[f[1]] - positions[f[0]], positions[f[2]] - positions[f[0]])
                         .norm();
    }

    std::pair<Vec3, Vec3> bounds() const {
        Vec3 lo{1e30, 1e30, 1e30}, hi{-1e30, -1e30, -1e30};
        for (const auto &p : positions) {
            lo = min(lo, p);
            hi = max(hi, p);
        }
        return {lo, hi};
    }

    double bbox_diagonal() const {
        auto [lo, hi] = bounds();
        return (hi - lo).norm();
    }

    double total_area() const {
        double a = 0.0;
        for (int f = 0; f < int(faces.size()); ++f) a += face_area(f);
        return a;
    }
};

/// Area-weighted average of incident face normals (the cross product already
/// carries the area weight), normalized per vertex.
inline void compute_vertex_normals(TriangleMesh &mesh) {
    mesh.normals.assign(mesh.positions.size(), Vec3{});
    for (const auto &f : mesh.faces) {
        Vec3 n = cross(mesh.positions[f[1]] - mesh.positions[f[0]],
                       mesh.positions[f[2]] - mesh.positions[f[0]]);
        for (int i = 0; i < 3; ++i) mesh.normals[f[i]] += n;
    }
    for (auto &n : mesh.normals) {
        double len = n.norm();
        n = len > 0.0 ? n / len : Vec3{0, 0, 1};
    }
}

/// Wavefront OBJ subset: v, vn, f (v, v//vn, v/vt/vn forms, negative indices,
/// polygons triangulated fan-wise). Vertex normals are recomputed from the
/// triangles when the file has none. Warnings (degenerate faces) are appended
/// to `warnings` when given.
inline TriangleMesh load_obj(const std::string &path, std::vector<std::string> *warnings = nullptr) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_obj: cannot open " + path);

    TriangleMesh mesh;
    std::vector<Vec3> file_normals;
    std::vector<std::vector<int>> face_normal_ids;
    std::string line;
    int line_no = 0;

    auto fail = [&](const std::string &msg) {
        throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + msg);
    };

    auto resolve = [&](long idx, std::size_t count, const char *what) -> int {
        long r = idx > 0 ? idx - 1 : long(count) + idx;
        if (idx == 0 || r < 0 || r >= long(count))
            fail(std::string("out-of-range ") + what + " index " + std::to_string(idx) +
                 " in face " + std::to_string(mesh.faces.size()));
        return int(r);
    };

    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ss(line);
        std::string tag;
        if (!(ss >> tag) || tag[0] == '#') continue;
        if (tag == "v") {
            Vec3 p;
            if (!(ss >> p.x >> p.y >> p.z)) fail("malformed vertex");
            mesh.positions.push_back(p);
        } else if (tag == "vn") {
            Vec3 n;
            if (!(ss >> n.x >> n.y >> n.z)) fail("malformed normal");
            file_normals.push_back(n);
        } else if (tag == "f") {
            std::vector<int> vi, ni;
            std::string corner;
            while (ss >> corner) {
                long v = 0, n = 0;
                std::size_t s1 = corner.find('/');
                v = std::stol(corner.substr(0, s1));
                if (s1 != std::string::npos) {
                    std::size_t s2 = corner.find('/', s1 + 1);
                    if (s2 != std::string::npos && s2 + 1 < corner.size())
                        n = std::stol(corner.substr(s2 + 1));
                }
                vi.push_back(resolve(v, mesh.positions.size(), "vertex"));
                ni.push_back(n == 0 ? -1 : resolve(n, file_normals.size(), "normal"));
            }
            if (vi.size() < 3) fail("face with fewer than 3 vertices");
            for (std::size_t k = 2; k < vi.size(); ++k) {
                mesh.faces.push_back({vi[0], vi[k - 1], vi[k]});
                face_normal_ids.push_back({ni[0], ni[k - 1], ni[k]});
            }
        }
        // vt, usemtl, o, g, s, mtllib are ignored
    }

    bool have_all_normals = !file_normals.empty();
    for (const auto &ids : face_normal_ids)
        for (int id : ids)
            if (id < 0) have_all_normals = false;

    if (have_all_normals) {
        // re-index normals per vertex; last one wins if the file disagrees
        mesh.normals.assign(mesh.positions.size(), Vec3{0, 0, 1});
        for (std::size_t f = 0; f < mesh.faces.size(); ++f)
            for (int c = 0; c < 3; ++c) {
                Vec3 n = file_normals[face_normal_ids[f][c]];
                double len = n.norm();
                mesh.normals[mesh.faces[f][c]] = len > 0 ? n / len : Vec3{0, 0, 1};
            }
    } else {
        compute_vertex_normals(mesh);
    }

    if (warnings) {
        for (std::size_t f = 0; f < mesh.faces.size(); ++f)
            if (mesh.face_area(int(f)) < 1e-14)
                warnings->push_back("degenerate face " + std::to_string(f));
    }
    return mesh;
}

inline void save_obj(const std::string &path, const TriangleMesh &mesh) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_obj: cannot open " + path);
    out.precision(12);
    for (const auto &p : mesh.positions) out << "v " << p.x << " " << p.y << " " << p.z << "\n";
    for (const auto &n : mesh.normals) out << "vn " << n.x << " " << n.y << " " << n.z << "\n";
    for (const auto &f : mesh.faces)
        out << "f " << f[0] + 1 << "//" << f[0] + 1 << " " << f[1] + 1 << "//" << f[1] + 1 << " "
            << f[2] + 1 << "//" << f[2] + 1 << "\n";
}

/// Unit icosphere by repeated edge-midpoint subdivision of an icosahedron.
/// Vertex counts: 12, 42, 162, 642, 2562 for subdivisions 0..4.
inline TriangleMesh make_icosphere(int subdivisions, double radius = 1.0) {
    TriangleMesh m;
    const double t = (1.0 + std::sqrt(5.0)) / 2.0;
    auto add = [&](double x, double y, double z) {
        m.positions.push_back(Vec3{x, y, z}.normalized());
    };
    add(-1, t, 0); add(1, t, 0); add(-1, -t, 0); add(1, -t, 0);
    add(0, -1, t); add(0, 1, t); add(0, -1, -t); add(0, 1, -t);
    add(t, 0, -1); add(t, 0, 1); add(-t, 0, -1); add(-t, 0, 1);
    m.faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
               {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
               {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
               {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};

    for (int s = 0; s < subdivisions; ++s) {
        std::map<std::pair<int, int>, int> midpoint;
        auto mid = [&](int a, int b) {
            auto key = std::minmax(a, b);
            auto it = midpoint.find(key);
            if (it != midpoint.end()) return it->second;
            Vec3 p = ((m.positions[a] + m.positions[b]) * 0.5).normalized();
            m.positions.push_back(p);
            int id = int(m.positions.size()) - 1;
            midpoint[key] = id;
            return id;
        };
        std::vector<std::array<int, 3>> next;
        next.reserve(m.faces.size() * 4);
        for (const auto &f : m.faces) {
            int ab = mid(f[0], f[1]), bc = mid(f[1], f[2]), ca = mid(f[2], f[0]);
            next.push_back({f[0], ab, ca});
            next.push_back({f[1], bc, ab});
            next.push_back({f[2], ca, bc});
            next.push_back({ab, bc, ca});
        }
        m.faces = std::move(next);
    }
    if (radius != 1.0)
        for (auto &p : m.positions) p = p * radius;
    m.normals.resize(m.positions.size());
    for (std::size_t i = 0; i < m.positions.size(); ++i)
        m.normals[i] = m.positions[i].normalized();
    return m;
}

// ---------------------------------------------------------------------------
// Ray intersection

struct Ray {
    Vec3 o;
    Vec3 d;  // unit
};

struct Hit {
    double t = 0.0;
    int face = -1;
    double u = 0.0, v = 0.0;  // barycentrics of vertices 1 and 2
    Vec3 position;
    Vec3 normal;  // barycentric-interpolated vertex normal, unit
};

/// Moeller-Trumbore; returns t, u, v for hits with t > t_min.
inline bool intersect_triangle(const Ray &ray, const Vec3 &p0, const Vec3 &p1, const Vec3 &p2,
                               double t_min, double &t, double &u, double &v) {
    Vec3 e1 = p1 - p0, e2 = p2 - p0;
    Vec3 pv = cross(ray.d, e2);
    double det = dot(e1, pv);
    if (std::abs(det) < 1e-14) return false;
    double inv = 1.0 / det;
    Vec3 tv = ray.o - p0;
    u = dot(tv, pv) * inv;
    if (u < 0.0 || u > 1.0) return false;
    Vec3 qv = cross(tv, e1);
    v = dot(ray.d, qv) * inv;
    if (v < 0.0 || u + v > 1.0) return false;
    t = dot(e2, qv) * inv;
    return t > t_min;
}

struct AABB {
    Vec3 lo{1e30, 1e30, 1e30};
    Vec3 hi{-1e30, -1e30, -1e30};

    void grow(const Vec3 &p) {
        lo = min(lo, p);
        hi = max(hi, p);
    }
    void grow(const AABB &o) {
        lo = min(lo, o.lo);
        hi = max(hi, o.hi);
    }
    bool contains(const AABB &o) const {
        return o.lo.x >= lo.x - 1e-12 && o.lo.y >= lo.y - 1e-12 && o.lo.z >= lo.z - 1e-12 &&
               o.hi.x <= hi.x + 1e-12 && o.hi.y <= hi.y + 1e-12 && o.hi.z <= hi.z + 1e-12;
    }

    bool hit(const Ray &ray, const Vec3 &inv_d, double t_max) const {
        double t0 = 0.0, t1 = t_max;
        for (int a = 0; a < 3; ++a) {
            double ta = (lo[a] - ray.o[a]) * inv_d[a];
            double tb = (hi[a] - ray.o[a]) * inv_d[a];
            if (ta > tb) std::swap(ta, tb);
            t0 = std::max(t0, ta);
            t1 = std::min(t1, tb);
            if (t0 > t1) return false;
        }
        return true;
    }
};

/// Midpoint-split BVH over the mesh triangles; max 4 triangles per leaf.
class BVH {
  public:
    struct Node {
        AABB bounds;
        int right = -1;   // internal: right child index (left child is id + 1)
        int first = -1;   // leaf: offset into order_
        int count = 0;    // leaf: triangle count; 0 for internal nodes
    };

    BVH() = default;

    explicit BVH(const TriangleMesh &mesh) : mesh_(&mesh) {
        const auto n = mesh.faces.size();
        order_.resize(n);
        for (std::size_t i = 0; i < n; ++i) order_[i] = int(i);
        centroids_.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const auto &f = mesh.faces[i];
            centroids_[i] =
                (mesh.positions[f[0]] + mesh.positions[f[1]] + mesh.positions[f[2]]) / 3.0;
        }
        nodes_.reserve(2 * n);
        if (n > 0) build(0, int(n));
        centroids_.clear();
        centroids_.shrink_to_fit();
    }

    std::optional<Hit> intersect(const Ray &ray, double t_max = 1e30,
                                 double t_min = 1e-12) const {
        if (nodes_.empty()) return std::nullopt;
        Vec3 inv_d{1.0 / ray.d.x, 1.0 / ray.d.y, 1.0 / ray.d.z};
        Hit best;
        best.t = t_max;
        bool found = false;
        int stack[64];
        int sp = 0;
        stack[sp++] = 0;
        while (sp > 0) {
            int id = stack[--sp];
            const Node &node = nodes_[id];
            if (!node.bounds.hit(ray, inv_d, best.t)) continue;
            if (node.count > 0) {
                for (int i = node.first; i < node.first + node.count; ++i) {
                    int face = order_[i];
                    const auto &f = mesh_->faces[face];
                    double t, u, v;
                    if (intersect_triangle(ray, mesh_->positions[f[0]], mesh_->positions[f[1]],
                                           mesh_->positions[f[2]], t_min, t, u, v) &&
                        t < best.t) {
                        best.t = t;
                        best.face = face;
                        best.u = u;
                        best.v = v;
                        found = true;
                    }
                }
            } else {
                stack[sp++] = id + 1;
                stack[sp++] = node.right;
            }
        }
        if (!found) return std::nullopt;
        best.position = ray.o + ray.d * best.t;
        best.normal = mesh_->face_normal_interp(best.face, best.u, best.v);
        return best;
    }

    /// Early-out occlusion query.
    bool any_hit(const Ray &ray, double t_max = 1e30, double t_min = 1e-12) const {
        if (nodes_.empty()) return false;
        Vec3 inv_d{1.0 / ray.d.x, 1.0 / ray.d.y, 1.0 / ray.d.z};
        int stack[64];
        int sp = 0;
        stack[sp++] = 0;
        while (sp > 0) {
            int id = stack[--sp];
            const Node &node = nodes_[id];
            if (!node.bounds.hit(ray, inv_d, t_max)) continue;
            if (node.count > 0) {
                for (int i = node.first; i < node.first + node.count; ++i) {
                    const auto &f = mesh_->faces[order_[i]];
                    double t, u, v;
                    if (intersect_triangle(ray, mesh_->positions[f[0]], mesh_->positions[f[1]],
                                           mesh_->positions[f[2]], t_min, t, u, v) &&
                        t < t_max)
                        return true;
                }
            } else {
                stack[sp++] = id + 1;
                stack[sp++] = node.right;
            }
        }
        return false;
    }

    const std::vector<Node> &nodes() const { return nodes_; }
    const std::vector<int> &triangle_order() const { return order_; }

  private:
    AABB triangle_bounds(int face) const {
        AABB b;
        for (int c = 0; c < 3; ++c) b.grow(mesh_->positions[mesh_->faces[face][c]]);
        return b;
    }

    int build(int first, int count) {
        int id = int(nodes_.size());
        nodes_.emplace_back();
        AABB bounds;
        for (int i = first; i < first + count; ++i) bounds.grow(triangle_bounds(order_[i]));
        nodes_[id].bounds = bounds;

        if (count <= 4) {
            nodes_[id].first = first;
            nodes_[id].count = count;
            return id;
        }

        AABB cb;
        for (int i = first; i < first + count; ++i) cb.grow(centroids_[order_[i]]);
        Vec3 ext = cb.hi - cb.lo;
        int axis = ext.x >= ext.y && ext.x >= ext.z ? 0 : (ext.y >= ext.z ? 1 : 2);
        double split = 0.5 * (cb.lo[axis] + cb.hi[axis]);

        auto begin = order_.begin() + first;
        auto mid = std::partition(begin, begin + count,
                                  [&](int t) { return centroids_[t][axis] < split; });
        int left_count = int(mid - begin);
        if (left_count == 0 || left_count == count) {
            // all centroids coincide along the axis; fall back to a median split
            std::nth_element(begin, begin + count / 2, begin + count, [&](int a, int b) {
                return centroids_[a][axis] < centroids_[b][axis];
            });
            left_count = count / 2;
        }

        build(first, left_count);  // left child lands at id + 1
        nodes_[id].right = build(first + left_count, count - left_count);
        return id;
    }

    const TriangleMesh *mesh_ = nullptr;
    std::vector<Node> nodes_;
    std::vector<int> order_;
    std::vector<Vec3> centroids_;
};

/// Cast-shadow indicator: 1 when the bias-offset ray from x toward the light
/// reaches infinity unobstructed. The query uses t_min = 0 so the normal
/// offset is the only thing keeping numerically-inside hit points from
/// shadowing themselves.
inline int shadow_visibility(const BVH &bvh, const Vec3 &x, const Vec3 &n, const Vec3 &l,
                             double bias) {
    Ray ray{x + n * bias, l};
    return bvh.any_hit(ray, 1e30, 0.0) ? 0 : 1;
}

}  // namespace brdflab
