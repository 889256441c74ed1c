#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>

#include "test_util.hpp"

using namespace ewgeo;
using Catch::Approx;

namespace {

// chain-rule transform of the spherical tensor, used as a cross-check for the
// cartesian closed form
Eigen::MatrixXd cartesian_via_jacobian(const EWPoint& p, VolumeElementCase cse) {
    const SphericalPoint s = to_spherical(p);
    const MetricTensor gs = sd_tensor_spherical(s, cse);
    const double st = std::sin(s.theta), ct = std::cos(s.theta);
    const double sp = std::sin(s.phi), cp = std::cos(s.phi);
    Eigen::Matrix3d fwd; // d(r1,r2,r3)/d(R,theta,phi)
    fwd << ct, -s.radius * st, 0.0,
           st * cp, s.radius * ct * cp, -s.radius * st * sp,
           st * sp, s.radius * ct * sp, s.radius * st * cp;
    const Eigen::Matrix3d inv = fwd.inverse();
    const int off = (cse == VolumeElementCase::Qubit) ? 1 : 2;
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(off + 3, off + 3);
    for (int i = 0; i < off; ++i) jac(i, i) = 1.0;
    jac.block(off, off, 3, 3) = inv;
    return jac.transpose() * gs.g * jac;
}

} // namespace

TEST_CASE("spherical tensor component values") {
    SphericalPoint s;
    s.r_minus = 0.1;
    s.r_plus = 0.2;
    s.radius = 0.3;
    s.theta = 1.0;
    s.phi = 0.5;
    const MetricTensor t = sd_tensor_spherical(s, VolumeElementCase::General);
    REQUIRE(t.labels == std::vector<std::string>{"r_minus", "r_plus", "R", "theta", "phi"});
    CHECK(t.g(0, 1) == Approx(1.75).margin(1e-14));            // r0 / (r0^2 - R^2)
    CHECK(t.g(3, 3) == Approx(0.09 / 0.7).margin(1e-14));      // R^2 / r0
    CHECK(t.g(2, 2) == Approx(1.75).margin(1e-14));
    CHECK(t.g(0, 2) == Approx(0.3 / 0.4).margin(1e-14));       // R / (r0^2 - R^2)
    CHECK(t.g(0, 0) == Approx(1.0 / 0.1 + 1.75).margin(1e-12));
    CHECK(t.g(1, 1) == Approx(1.0 / 0.2 + 1.75).margin(1e-12));
    CHECK(t.g(4, 4) == Approx(0.09 * std::sin(1.0) * std::sin(1.0) / 0.7).margin(1e-14));
    // structural zeros
    CHECK(t.g(0, 3) == 0.0);
    CHECK(t.g(1, 4) == 0.0);
    CHECK(t.g(3, 4) == 0.0);
}

TEST_CASE("cartesian tensor at r = 0: Fisher block plus isotropic ball") {
    SECTION("general") {
        const MetricTensor t = sd_tensor_cartesian({0.2, 0.3, 0, 0, 0},
                                                   VolumeElementCase::General);
        const double r0 = 0.5;
        CHECK(t.g(0, 0) == Approx(1.0 / 0.2 + 1.0 / r0).margin(1e-12));
        CHECK(t.g(1, 1) == Approx(1.0 / 0.3 + 1.0 / r0).margin(1e-12));
        CHECK(t.g(0, 1) == Approx(1.0 / r0).margin(1e-12));
        for (int k = 2; k < 5; ++k) {
            CHECK(t.g(k, k) == Approx(1.0 / r0).margin(1e-12));
            CHECK(t.g(0, k) == 0.0);
            CHECK(t.g(1, k) == 0.0);
        }
    }
    SECTION("qubit example at r_plus = 1/4") {
        const MetricTensor t = sd_tensor_cartesian({0, 0.25, 0, 0, 0},
                                                   VolumeElementCase::Qubit);
        CHECK(t.g(0, 0) == Approx(16.0 / 3.0).margin(1e-12)); // 1/r+ + 1/r0
        for (int k = 1; k < 4; ++k) CHECK(t.g(k, k) == Approx(4.0 / 3.0).margin(1e-12));
    }
}

TEST_CASE("cartesian closed form equals the chain-rule transform") {
    for (auto cse : {VolumeElementCase::General, VolumeElementCase::Qubit}) {
        const auto pts = ewtest::interior_points(cse, 300, 21, 0.03);
        for (const auto& p : pts) {
            if (p.radius() < 1e-3) continue;
            const SphericalPoint s = to_spherical(p);
            if (std::sin(s.theta) < 1e-2) continue;
            const MetricTensor t = sd_tensor_cartesian(p, cse);
            const Eigen::MatrixXd ref = cartesian_via_jacobian(p, cse);
            CHECK((t.g - ref).cwiseAbs().maxCoeff() <
                  1e-9 * std::max(1.0, ref.cwiseAbs().maxCoeff()));
        }
    }
}

TEST_CASE("volume element values and determinant consistency") {
    CHECK(volume_element({0, 0.25, 0, 0, 0}, VolumeElementCase::Qubit) ==
          Approx(32.0 / 9.0).margin(1e-12));
    CHECK(volume_element({0.25, 0.25, 0, 0, 0}, VolumeElementCase::General) ==
          Approx(16.0).margin(1e-12));

    for (auto cse : {VolumeElementCase::General, VolumeElementCase::Qubit}) {
        const auto pts = ewtest::interior_points(cse, 10000, 22, 0.02);
        for (const auto& p : pts) {
            const double ve = volume_element(p, cse);
            const double det = sd_tensor_cartesian(p, cse).g.determinant();
            REQUIRE(det > 0.0);
            CHECK(std::sqrt(det) == Approx(ve).epsilon(1e-10));
        }
    }
}

TEST_CASE("spherical sqrt(det) over the chart jacobian equals the cartesian element") {
    const auto pts = ewtest::interior_points(VolumeElementCase::General, 10000, 23, 0.02);
    for (const auto& p : pts) {
        const SphericalPoint s = to_spherical(p);
        if (s.radius < 1e-2 || std::sin(s.theta) < 1e-2) continue;
        const double det = sd_tensor_spherical(s, VolumeElementCase::General).g.determinant();
        const double jac = s.radius * s.radius * std::sin(s.theta);
        CHECK(std::sqrt(det) / jac ==
              Approx(volume_element(p, VolumeElementCase::General)).epsilon(1e-10));
    }
}

TEST_CASE("the printed volume-element quadratic simplifies to r0^2 - R^2") {
    const auto pts = ewtest::family_points(VolumeElementCase::General, 500, 24);
    for (const auto& p : pts) {
        const double r0 = p.r0();
        const double literal = -p.r1 * p.r1 - p.r2 * p.r2 - (r0 + p.r3) * (-r0 + p.r3);
        const double simplified = r0 * r0 - p.radius2();
        CHECK(literal == Approx(simplified).margin(1e-14));
    }
}

TEST_CASE("qubit tensor is the r_minus-deleted limit of the general tensor") {
    const auto pts = ewtest::interior_points(VolumeElementCase::Qubit, 50, 25, 0.05);
    for (const auto& q : pts) {
        const MetricTensor tq = sd_tensor_cartesian(q, VolumeElementCase::Qubit);
        double prev = 1e9;
        for (double eps : {1e-6, 1e-8, 1e-10}) {
            EWPoint g = q;
            g.r_minus = eps;
            const MetricTensor tg = sd_tensor_cartesian(g, VolumeElementCase::General);
            const double diff = (tg.g.block(1, 1, 4, 4) - tq.g).cwiseAbs().maxCoeff() /
                                tq.g.cwiseAbs().maxCoeff();
            CHECK(diff < prev + 1e-12);
            prev = diff;
        }
        CHECK(prev < 1e-8);
    }
}

TEST_CASE("rotational equivariance of the cartesian tensor") {
    const PhiloxStream ps(99, 5);
    const auto pts = ewtest::interior_points(VolumeElementCase::General, 40, 26, 0.04);
    double draw[6];
    for (std::size_t i = 0; i < pts.size(); ++i) {
        ps.fill(i * 6, draw, 6);
        Eigen::Matrix3d a;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) a(r, c) = 2.0 * draw[(r * 3 + c) % 6] - 1.0 + 0.1 * r;
        Eigen::HouseholderQR<Eigen::Matrix3d> qr(a);
        Eigen::Matrix3d o = qr.householderQ();
        if (i % 2 == 0) o.col(0) *= -1.0; // exercise improper rotations too

        const EWPoint& p = pts[i];
        const Eigen::Vector3d r(p.r1, p.r2, p.r3);
        const Eigen::Vector3d rr = o * r;
        EWPoint pr = p;
        pr.r1 = rr(0);
        pr.r2 = rr(1);
        pr.r3 = rr(2);

        Eigen::MatrixXd oext = Eigen::MatrixXd::Identity(5, 5);
        oext.block(2, 2, 3, 3) = o;
        const Eigen::MatrixXd lhs = sd_tensor_cartesian(pr, VolumeElementCase::General).g;
        const Eigen::MatrixXd rhs =
            oext * sd_tensor_cartesian(p, VolumeElementCase::General).g * oext.transpose();
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-11 * rhs.cwiseAbs().maxCoeff());
    }
}

TEST_CASE("abelian restriction: r -> 0 simplex block is the Fisher metric") {
    const PhiloxStream ps(7, 6);
    double u[2];
    for (int i = 0; i < 200; ++i) {
        ps.fill(i * 2, u, 2);
        const double rm = 0.02 + 0.6 * u[0];
        const double rp = 0.02 + 0.6 * u[1];
        if (1.0 - rm - rp < 0.02) continue;
        const double r0 = 1.0 - rm - rp;
        const MetricTensor t = sd_tensor_cartesian({rm, rp, 0, 0, 0},
                                                   VolumeElementCase::General);
        CHECK(t.g(0, 0) == Approx(1.0 / rm + 1.0 / r0).margin(1e-10));
        CHECK(t.g(0, 1) == Approx(1.0 / r0).margin(1e-10));
        CHECK(t.g(1, 1) == Approx(1.0 / rp + 1.0 / r0).margin(1e-10));
    }
}

TEST_CASE("boundary subtensor and h") {
    SECTION("qubit at the ball center") {
        const auto [sub, h] = boundary_subtensor({0, 0.25, 0, 0, 0}, VolumeElementCase::Qubit);
        REQUIRE(sub.labels == std::vector<std::string>{"r1", "r2", "r3"});
        for (int k = 0; k < 3; ++k) CHECK(sub.g(k, k) == Approx(4.0 / 3.0).margin(1e-12));
        CHECK(h == Approx(std::pow(4.0 / 3.0, 1.5)).margin(1e-12));
        CHECK(h == Approx(1.539601).margin(1e-6));
    }
    SECTION("general labels include r_plus") {
        const auto [sub, h] =
            boundary_subtensor({0.2, 0.3, 0.1, 0.05, -0.1}, VolumeElementCase::General);
        REQUIRE(sub.labels == std::vector<std::string>{"r_plus", "r1", "r2", "r3"});
        CHECK(h > 0.0);
    }
    SECTION("h positive at interior points and matches the extracted block") {
        const auto pts = ewtest::interior_points(VolumeElementCase::Qubit, 200, 27, 0.03);
        for (const auto& p : pts) {
            const auto [sub, h] = boundary_subtensor(p, VolumeElementCase::Qubit);
            CHECK(h > 0.0);
            const Eigen::MatrixXd blk =
                sd_tensor_cartesian(p, VolumeElementCase::Qubit).g.block(1, 1, 3, 3);
            CHECK(h == Approx(std::sqrt(blk.determinant())).epsilon(1e-12));
        }
    }
    SECTION("cross-check at a specific point") {
        const EWPoint p{0, 0.25, 0.1, 0.1, 0.1};
        const auto [sub, h] = boundary_subtensor(p, VolumeElementCase::Qubit);
        const double det =
            sd_tensor_cartesian(p, VolumeElementCase::Qubit).g.block(1, 1, 3, 3).determinant();
        CHECK(h == Approx(std::sqrt(det)).epsilon(1e-12));
    }
}

TEST_CASE("boundary and case errors") {
    CHECK_THROWS_AS(volume_element({0.1, 0.2, 0.7, 0, 0}, VolumeElementCase::General),
                    BoundarySingularity); // R = r0
    CHECK_THROWS_AS(volume_element({0, 0, 0, 0, 0}, VolumeElementCase::Qubit),
                    BoundarySingularity); // r_plus = 0
    CHECK_THROWS_AS(sd_tensor_cartesian({0.0, 0.2, 0, 0, 0}, VolumeElementCase::General),
                    BoundarySingularity); // r_minus = 0 in the general case
    CHECK_THROWS_AS(sd_tensor_cartesian({0.3, 0.7, 0, 0, 0}, VolumeElementCase::General),
                    BoundarySingularity); // r0 = 0
    CHECK_THROWS_AS(sd_tensor_cartesian({0.1, 0.2, 0.1, 0, 0}, VolumeElementCase::Qubit),
                    InvalidParameters); // qubit case needs r_minus == 0
    SphericalPoint s;
    s.r_minus = 0.1;
    s.r_plus = 0.2;
    s.radius = 0.3;
    s.theta = 0.0; // chart degenerate on the polar axis
    CHECK_THROWS_AS(sd_tensor_spherical(s, VolumeElementCase::General), BoundarySingularity);
}

TEST_CASE("positive definiteness at interior points") {
    for (auto cse : {VolumeElementCase::General, VolumeElementCase::Qubit}) {
        const auto pts = ewtest::interior_points(cse, 300, 28, 0.02);
        for (const auto& p : pts) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sd_tensor_cartesian(p, cse).g);
            CHECK(es.eigenvalues().minCoeff() > 0.0);
        }
    }
}

TEST_CASE("tensor JSON form") {
    const MetricTensor t = sd_tensor_cartesian({0, 0.25, 0, 0, 0}, VolumeElementCase::Qubit);
    const auto j = to_json(t);
    CHECK(j["labels"].size() == 4);
    CHECK(j["matrix"].size() == 4);
    CHECK(j["matrix"][0].size() == 4);
}
