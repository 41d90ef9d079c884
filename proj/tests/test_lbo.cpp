#include <catch2/catch_amalgamated.hpp>

#include "brdflab/lbo.hpp"
#include "brdflab/mesh.hpp"

using namespace brdflab;

TEST_CASE("sphere LBO spectrum matches l(l+1)") {
    auto mesh = make_icosphere(4);  // 2562 vertices, unit radius
    auto basis = lbo_basis(mesh, 16);

    // closed surface: constant kernel
    CHECK(basis.eigenvalues(0) == Catch::Approx(0.0).margin(1e-8));
    double c0 = basis.functions(0, 0);
    for (int i = 0; i < basis.functions.rows(); i += 97)
        REQUIRE(basis.functions(i, 0) == Catch::Approx(c0).margin(1e-6));

    // first spherical-harmonic band: eigenvalue 2 with multiplicity 3
    for (int j = 1; j <= 3; ++j)
        CHECK(basis.eigenvalues(j) == Catch::Approx(2.0).epsilon(0.05));
    // second band: eigenvalue 6
    for (int j = 4; j <= 8; ++j)
        CHECK(basis.eigenvalues(j) == Catch::Approx(6.0).epsilon(0.05));

    // ascending, nonnegative
    for (int j = 0; j < 16; ++j) {
        REQUIRE(basis.eigenvalues(j) >= 0.0);
        if (j > 0) REQUIRE(basis.eigenvalues(j) >= basis.eigenvalues(j - 1));
    }
}

TEST_CASE("eigenfunctions are mass-orthonormal with Dirichlet energy = lambda") {
    auto mesh = make_icosphere(2);
    const int k = 12;
    auto basis = lbo_basis(mesh, k);

    // rebuild mass + stiffness independently (same discretization, scalar loops)
    int n = int(mesh.positions.size());
    Eigen::VectorXd M = Eigen::VectorXd::Zero(n);
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(n, n);
    for (const auto &f : mesh.faces) {
        Vec3 a = mesh.positions[f[0]], b = mesh.positions[f[1]], c = mesh.positions[f[2]];
        double area = 0.5 * cross(b - a, c - a).norm();
        for (int i = 0; i < 3; ++i) M(f[i]) += area / 3.0;
        for (int corner = 0; corner < 3; ++corner) {
            int i0 = f[corner], i1 = f[(corner + 1) % 3], i2 = f[(corner + 2) % 3];
            Vec3 e1 = mesh.positions[i1] - mesh.positions[i0];
            Vec3 e2 = mesh.positions[i2] - mesh.positions[i0];
            double w = 0.5 * dot(e1, e2) / cross(e1, e2).norm();
            S(i1, i2) -= w;
            S(i2, i1) -= w;
            S(i1, i1) += w;
            S(i2, i2) += w;
        }
    }

    for (int a = 0; a < k; ++a) {
        for (int b = a; b < k; ++b) {
            double ip = basis.functions.col(a).dot(M.asDiagonal() * basis.functions.col(b));
            REQUIRE(ip == Catch::Approx(a == b ? 1.0 : 0.0).margin(1e-6));
        }
        double dirichlet = basis.functions.col(a).dot(S * basis.functions.col(a));
        REQUIRE(dirichlet == Catch::Approx(basis.eigenvalues(a)).margin(1e-6));
    }
}

TEST_CASE("sign convention: largest-magnitude entry positive") {
    auto mesh = make_icosphere(2);
    auto basis = lbo_basis(mesh, 8);
    for (int j = 0; j < 8; ++j) {
        int arg = 0;
        basis.functions.col(j).cwiseAbs().maxCoeff(&arg);
        REQUIRE(basis.functions(arg, j) > 0.0);
    }
}

TEST_CASE("vertex budget and manifold errors") {
    auto mesh = make_icosphere(3);  // 642 verts
    CHECK_THROWS_AS(lbo_basis(mesh, 8, 100), std::runtime_error);

    TriangleMesh bad;  // three faces sharing one edge
    bad.positions = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {0, -1, 0}};
    bad.faces = {{0, 1, 2}, {0, 1, 3}, {0, 1, 4}};
    compute_vertex_normals(bad);
    CHECK_THROWS_AS(lbo_basis(bad, 2), std::runtime_error);

    // open mesh warns but solves
    TriangleMesh open_mesh;
    open_mesh.positions = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}};
    open_mesh.faces = {{0, 1, 2}, {1, 3, 2}};
    compute_vertex_normals(open_mesh);
    std::vector<std::string> warnings;
    lbo_basis(open_mesh, 2, 3000, &warnings);
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0].find("not closed") != std::string::npos);

    CHECK_THROWS_AS(lbo_basis(open_mesh, 10), std::invalid_argument);
}

TEST_CASE("lbo_encode interpolates barycentrically") {
    auto mesh = make_icosphere(2);
    auto basis = lbo_basis(mesh, 8);
    basis.blocks = {{0, 4}, {6, 2}};
    REQUIRE(basis.feature_dim() == 6);

    // at a vertex the encoding equals the per-vertex values
    int face = 11;
    auto f = mesh.faces[face];
    auto at_v0 = lbo_encode(basis, mesh, face, 0.0, 0.0);
    REQUIRE(at_v0.size() == 6);
    for (int j = 0; j < 4; ++j) CHECK(at_v0[j] == basis.functions(f[0], j));
    CHECK(at_v0[4] == basis.functions(f[0], 6));

    // generic barycentric point: direct weighted sum
    double u = 0.25, v = 0.35;
    auto mid = lbo_encode(basis, mesh, face, u, v);
    for (int j = 0; j < 4; ++j) {
        double expect = (1 - u - v) * basis.functions(f[0], j) + u * basis.functions(f[1], j) +
                        v * basis.functions(f[2], j);
        CHECK(mid[j] == Catch::Approx(expect).margin(1e-9));
    }

    // the constant eigenfunction contributes a constant feature everywhere
    auto other = lbo_encode(basis, mesh, 42, 0.2, 0.5);
    CHECK(other[0] == Catch::Approx(mid[0]).margin(1e-9));

    basis.blocks = {{0, 20}};
    CHECK_THROWS_AS(lbo_encode(basis, mesh, face, 0.1, 0.1), std::out_of_range);
}

TEST_CASE("default block layout") {
    auto blocks = default_lbo_blocks(128);
    REQUIRE(blocks.size() == 5);
    CHECK(blocks[0] == std::pair<int, int>{0, 64});
    CHECK(blocks[1] == std::pair<int, int>{64, 16});
    CHECK(blocks[4] == std::pair<int, int>{112, 16});
    int total = 0;
    for (auto &[s, c] : blocks) total += c;
    CHECK(total == 128);

    CHECK(default_lbo_blocks(10).size() == 1);  // non-divisible fallback
}
