#pragma once

#include <Eigen/Dense>
#include <map>
#include <span>
#include <vector>

#include "brdflab/mesh.hpp"

namespace brdflab {

/// Low-frequency intrinsic basis: the first k eigenfunctions of the
/// Laplace-Beltrami operator discretized with cotangent weights and a lumped
/// barycentric mass matrix. Eigenfunctions are mass-orthonormal and stored
/// per vertex; `blocks` selects (start, count) index ranges for encodings.
struct LBOBasis {
    Eigen::MatrixXd functions;  // V x k
    Eigen::VectorXd eigenvalues;  // ascending, nonnegative
    std::vector<std::pair<int, int>> blocks;

    int feature_dim() const {
        int n = 0;
        for (auto &[s, c] : blocks) n += c;
        return n;
    }
};

namespace detail {

inline void check_manifold(const TriangleMesh &mesh, std::vector<std::string> *warnings) {
    std::map<std::pair<int, int>, int> edge_count;
    for (const auto &f : mesh.faces)
        for (int c = 0; c < 3; ++c) {
            auto e = std::minmax(f[c], f[(c + 1) % 3]);
            ++edge_count[e];
        }
    bool open = false;
    for (const auto &[e, n] : edge_count) {
        if (n > 2)
            throw std::runtime_error("lbo_basis: non-manifold edge (" + std::to_string(e.first) +
                                     "," + std::to_string(e.second) + ")");
        if (n == 1) open = true;
    }
    if (open && warnings)
        warnings->push_back("mesh is not closed; LBO spectrum assumes a closed surface");
}

}  // namespace detail

/// Generalized eigenproblem S phi = lambda M phi with S the cotangent
/// stiffness and M the lumped mass, solved densely after the M^{-1/2}
/// similarity transform. Meshes must stay within `vertex_budget` (dense
/// solver); larger scenes fall back to extrinsic positional encoding.
/// Signs are fixed so each eigenfunction's largest-magnitude entry is
/// positive (eigenvectors are otherwise sign-ambiguous).
inline LBOBasis lbo_basis(const TriangleMesh &mesh, int k, int vertex_budget = 3000,
                          std::vector<std::string> *warnings = nullptr) {
    const int n = int(mesh.positions.size());
    if (n > vertex_budget)
        throw std::runtime_error("lbo_basis: mesh exceeds the dense eigensolver budget (" +
                                 std::to_string(n) + " > " + std::to_string(vertex_budget) + ")");
    if (k > n) throw std::invalid_argument("lbo_basis: more eigenfunctions than vertices");
    detail::check_manifold(mesh, warnings);

    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd M = Eigen::VectorXd::Zero(n);
    for (const auto &f : mesh.faces) {
        const Vec3 &a = mesh.positions[f[0]];
        const Vec3 &b = mesh.positions[f[1]];
        const Vec3 &c = mesh.positions[f[2]];
        double area = 0.5 * cross(b - a, c - a).norm();
        if (area < 1e-14) continue;  // degenerate face contributes nothing
        for (int i = 0; i < 3; ++i) M(f[i]) += area / 3.0;

        // cot at each corner weights the opposite edge
        auto corner = [&](int i0, int i1, int i2) {
            const Vec3 &p0 = mesh.positions[f[i0]];
            Vec3 e1 = mesh.positions[f[i1]] - p0, e2 = mesh.positions[f[i2]] - p0;
            double cot = dot(e1, e2) / cross(e1, e2).norm();
            double w = 0.5 * cot;
            S(f[i1], f[i2]) -= w;
            S(f[i2], f[i1]) -= w;
            S(f[i1], f[i1]) += w;
            S(f[i2], f[i2]) += w;
        };
        corner(0, 1, 2);
        corner(1, 2, 0);
        corner(2, 0, 1);
    }

    // similarity transform to a standard symmetric problem
    Eigen::VectorXd inv_sqrt_m = M.cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
    Eigen::MatrixXd B = inv_sqrt_m.asDiagonal() * S * inv_sqrt_m.asDiagonal();
    B = 0.5 * (B + B.transpose());  // enforce exact symmetry

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(B);
    if (solver.info() != Eigen::Success) throw std::runtime_error("lbo_basis: eigensolve failed");

    LBOBasis basis;
    basis.eigenvalues = solver.eigenvalues().head(k).cwiseMax(0.0);
    basis.functions = inv_sqrt_m.asDiagonal() * solver.eigenvectors().leftCols(k);
    for (int j = 0; j < k; ++j) {
        int arg = 0;
        basis.functions.col(j).cwiseAbs().maxCoeff(&arg);
        if (basis.functions(arg, j) < 0.0) basis.functions.col(j) = -basis.functions.col(j);
    }
    return basis;
}

/// Default block selection: first half of the spectrum as one block, then
/// four evenly sized follow-up blocks covering the rest (the 64 + 4x16
/// layout at k = 128).
inline std::vector<std::pair<int, int>> default_lbo_blocks(int k) {
    if (k < 8 || k % 8 != 0) return {{0, k}};
    std::vector<std::pair<int, int>> blocks{{0, k / 2}};
    int step = k / 8;
    for (int b = 0; b < 4; ++b) blocks.push_back({k / 2 + b * step, step});
    return blocks;
}

/// Barycentric interpolation of the selected eigenfunction blocks at a point
/// on the mesh.
inline void lbo_encode_append(const LBOBasis &basis, const TriangleMesh &mesh, int face, double u,
                              double v, std::vector<double> &out) {
    const auto &fc = mesh.faces[face];
    double w0 = 1.0 - u - v;
    for (const auto &[start, count] : basis.blocks) {
        if (start < 0 || start + count > basis.functions.cols())
            throw std::out_of_range("lbo_encode: block exceeds basis size");
        for (int j = start; j < start + count; ++j)
            out.push_back(w0 * basis.functions(fc[0], j) + u * basis.functions(fc[1], j) +
                          v * basis.functions(fc[2], j));
    }
}

inline std::vector<double> lbo_encode(const LBOBasis &basis, const TriangleMesh &mesh, int face,
                                      double u, double v) {
    std::vector<double> out;
    out.reserve(basis.feature_dim());
    lbo_encode_append(basis, mesh, face, u, v, out);
    return out;
}

}  // namespace brdflab
