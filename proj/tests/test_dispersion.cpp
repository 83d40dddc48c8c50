#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "lattice/dispersion.hpp"

using namespace lattice;

namespace {
constexpr double PI = 3.141592653589793238462643383279502884;
const double SQ3 = std::sqrt(3.0);
} // namespace

TEST_CASE("chain dispersion and band") {
    const LatticeSpec ch = make_msl1d();
    CHECK(omega(ch, {PI, 0.0}) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(omega(ch, {PI / 2.0, 0.0}) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
    CHECK(band_edges(ch).hi == doctest::Approx(2.0));

    CHECK(group_velocity(ch, {1e-6, 0.0}).cg.x == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(group_velocity(ch, {PI / 2.0, 0.0}).cg.x ==
          doctest::Approx(std::cos(PI / 4.0)).epsilon(1e-14));
    CHECK(group_velocity(ch, {-PI / 2.0, 0.0}).cg.x ==
          doctest::Approx(-std::cos(PI / 4.0)).epsilon(1e-14));
    CHECK_FALSE(group_velocity(ch, {0.0, 0.0}).smooth);
    CHECK_FALSE(group_velocity(ch, {PI, 0.0}).smooth); // stationary band maximum

    CHECK_THROWS_AS(omega(ch, {1.0, 0.0}, Branch::AcousticI), domain_error);
}

TEST_CASE("square lattice dispersion") {
    const LatticeSpec sq = make_scl();
    CHECK(omega(sq, {PI, PI}) == doctest::Approx(std::sqrt(8.0)).epsilon(1e-14));
    CHECK(omega(sq, {PI, 0.0}) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(omega(sq, {0.0, PI}) == doctest::Approx(2.0).epsilon(1e-14));

    std::mt19937 rng(3);
    std::uniform_real_distribution<double> un(-PI, PI);
    for (int i = 0; i < 200; ++i) {
        const double kx = un(rng), ky = un(rng);
        CHECK(omega(sq, {kx, ky}) == doctest::Approx(omega(sq, {ky, kx})).epsilon(1e-14));
    }

    const GroupVelocity gv = group_velocity(sq, {PI / 2.0, PI / 2.0});
    CHECK(gv.cg.x == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(gv.cg.y == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(gv.beta == doctest::Approx(PI / 4.0).epsilon(1e-14));
    CHECK(gv.smooth);
    CHECK_FALSE(group_velocity(sq, {PI, 0.0}).smooth); // angular point of the flat contour
}

TEST_CASE("stretched and rectangular lattices") {
    const LatticeSpec sr = make_srcl(1.5);
    CHECK(omega(sr, {PI, 0.0}) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(omega(sr, {0.0, PI / 1.5}) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(omega(sr, {PI, PI / 1.5}) == doctest::Approx(std::sqrt(8.0)).epsilon(1e-14));
    // the flat contour |kx| + 1.5 |ky| = pi carries the same frequency...
    CHECK(omega(sr, {PI / 2.0, PI / 3.0}) == doctest::Approx(2.0).epsilon(1e-14));
    // ...and a constant ray direction atan(1.5)
    const GroupVelocity g1 = group_velocity(sr, {PI / 2.0, PI / 3.0});
    const GroupVelocity g2 = group_velocity(sr, {PI / 4.0, PI / 2.0});
    CHECK(g1.beta == doctest::Approx(std::atan(1.5)).epsilon(1e-12));
    CHECK(g2.beta == doctest::Approx(std::atan(1.5)).epsilon(1e-12));

    const LatticeSpec rc = make_rcl(1.5); // gy = 2/3
    CHECK(omega(rc, {PI, 0.0}) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(omega(rc, {0.0, 2.0 * PI / 3.0}) ==
          doctest::Approx(1.632993161855452).epsilon(1e-14));
    CHECK(band_edges(rc).hi == doctest::Approx(2.581988897471611).epsilon(1e-14));
}

TEST_CASE("honeycomb branches") {
    const LatticeSpec hc = make_hcl();
    const double hx = 2.0 * PI / SQ3;

    CHECK(omega(hc, {0.0, 0.0}, Branch::AcousticI) == doctest::Approx(0.0));
    CHECK(omega(hc, {0.0, 0.0}, Branch::OpticalII) ==
          doctest::Approx(std::sqrt(6.0)).epsilon(1e-14));

    // conical point: both sheets meet at sqrt(3)
    const WaveVector cp{hx, 2.0 * PI / 3.0};
    CHECK(omega(hc, cp, Branch::AcousticI) == doctest::Approx(SQ3).epsilon(1e-12));
    CHECK(omega(hc, cp, Branch::OpticalII) == doctest::Approx(SQ3).epsilon(1e-12));
    CHECK_FALSE(group_velocity(hc, cp, Branch::AcousticI).smooth);

    // the straight contour lines ky = +-pi carry sqrt(2) on branch I and 2 on
    // branch II for every kx
    for (double kx : {0.0, 0.3, 1.0, 1.7, hx}) {
        CHECK(omega(hc, {kx, PI}, Branch::AcousticI) ==
              doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
        CHECK(omega(hc, {kx, -PI}, Branch::AcousticI) ==
              doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
        CHECK(omega(hc, {kx, PI}, Branch::OpticalII) ==
              doctest::Approx(2.0).epsilon(1e-12));
    }

    std::mt19937 rng(5);
    std::uniform_real_distribution<double> ux(-hx, hx), uy(-PI, PI);
    for (int i = 0; i < 300; ++i) {
        const WaveVector k{ux(rng), uy(rng)};
        CHECK(omega(hc, k, Branch::AcousticI) <= omega(hc, k, Branch::OpticalII) + 1e-14);
    }

    // long-wave speeds: acoustic sound speed 1/2
    CHECK(group_velocity(hc, {1e-5, 0.0}, Branch::AcousticI).cg.x ==
          doctest::Approx(0.5).epsilon(1e-6));

    CHECK_THROWS_AS(omega(hc, {0.1, 0.1}), domain_error);
}

TEST_CASE("triangular lattice") {
    const LatticeSpec tr = make_etl();
    const double hy = 2.0 * PI / SQ3;
    CHECK(omega(tr, {PI, hy / 2.0}) == doctest::Approx(std::sqrt(8.0)).epsilon(1e-12));
    CHECK(omega(tr, {0.0, hy}) == doctest::Approx(std::sqrt(8.0)).epsilon(1e-12));
    CHECK(omega(tr, {2.0 * PI / 3.0, hy}) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(band_edges(tr).hi == doctest::Approx(3.0));

    // six-fold symmetry of the frequency surface (rotation by 60 degrees)
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> un(-2.0, 2.0);
    const double c60 = 0.5, s60 = SQ3 / 2.0;
    for (int i = 0; i < 200; ++i) {
        const double kx = un(rng), ky = un(rng);
        const double rx = c60 * kx - s60 * ky, ry = s60 * kx + c60 * ky;
        CHECK(omega(tr, {kx, ky}) == doctest::Approx(omega(tr, {rx, ry})).epsilon(1e-12));
    }
}

TEST_CASE("sheared lattice with diagonal bonds") {
    SUBCASE("gamma = 1") {
        const LatticeSpec rt = make_rtl(1.0);
        CHECK(omega(rt, {PI, 0.0}) == doctest::Approx(std::sqrt(8.0)).epsilon(1e-14));
        CHECK(omega(rt, {0.0, PI}) == doctest::Approx(std::sqrt(8.0)).epsilon(1e-14));
        CHECK(band_edges(rt).hi == doctest::Approx(3.0).epsilon(1e-14));
        const double th = 2.0 * PI / 3.0;
        CHECK(omega(rt, {th, th}) == doctest::Approx(3.0).epsilon(1e-12));
        // the line ky = -kx + pi is flat at 2*sqrt(1+gamma)
        for (double kx : {0.2, 1.0, 2.0})
            CHECK(omega(rt, {kx, PI - kx}) == doctest::Approx(std::sqrt(8.0)).epsilon(1e-12));
        // so are the zone boundary lines when gamma matches the axis stiffness
        for (double kx : {0.2, 1.0, 2.0})
            CHECK(omega(rt, {kx, PI}) == doctest::Approx(std::sqrt(8.0)).epsilon(1e-12));
    }
    SUBCASE("gamma = 2.0625") {
        const LatticeSpec rt = make_rtl(2.0625);
        CHECK(band_edges(rt).hi == doctest::Approx(3.5685919470918055).epsilon(1e-14));
        const double th = std::acos(-1.0 / (2.0 * 2.0625));
        CHECK(th == doctest::Approx(1.815660181000518).epsilon(1e-14));
        CHECK(omega(rt, {th, th}) == doctest::Approx(band_edges(rt).hi).epsilon(1e-13));
        for (double kx : {0.2, 1.0, 2.0})
            CHECK(omega(rt, {kx, PI - kx}) == doctest::Approx(3.5).epsilon(1e-12));
    }
    SUBCASE("gamma below the corner threshold") {
        const LatticeSpec rt = make_rtl(0.44);
        CHECK(band_edges(rt).hi == doctest::Approx(std::sqrt(8.0)).epsilon(1e-14));
        CHECK(omega(rt, {PI, PI}) == doctest::Approx(std::sqrt(8.0)).epsilon(1e-12));
    }
}

TEST_CASE("resonance catalogs") {
    SUBCASE("chain") {
        const auto cat = resonance_catalog(make_msl1d());
        REQUIRE(cat.size() == 1);
        CHECK(cat[0].omega == doctest::Approx(2.0));
        CHECK(cat[0].kind == ResonanceKind::BandEdge);
        CHECK(cat[0].kpoints.size() == 2);
    }
    SUBCASE("square") {
        const auto cat = resonance_catalog(make_scl());
        REQUIRE(cat.size() == 2);
        CHECK(cat[0].omega == doctest::Approx(2.0));
        CHECK(cat[0].kind == ResonanceKind::InteriorLPW);
        CHECK(cat[0].kpoints.size() == 4);
        REQUIRE(cat[0].beaming.size() == 4);
        CHECK(cat[0].beaming[0] == doctest::Approx(PI / 4.0));
        CHECK(cat[0].beaming[1] == doctest::Approx(3.0 * PI / 4.0));
        CHECK(cat[1].omega == doctest::Approx(std::sqrt(8.0)));
        CHECK(cat[1].kind == ResonanceKind::BandEdge);
    }
    SUBCASE("stretched square keeps one interior frequency, tilts the star") {
        const auto cat = resonance_catalog(make_srcl(1.5));
        REQUIRE(cat.size() == 2);
        CHECK(cat[0].omega == doctest::Approx(2.0));
        REQUIRE(cat[0].beaming.size() == 4);
        CHECK(cat[0].beaming[0] == doctest::Approx(std::atan(1.5)).epsilon(1e-14));
        CHECK(cat[0].beaming[0] == doctest::Approx(0.982793723247329).epsilon(1e-14));
    }
    SUBCASE("rectangular splits the interior resonance") {
        const auto cat = resonance_catalog(make_rcl(1.5));
        REQUIRE(cat.size() == 3);
        CHECK(cat[0].omega == doctest::Approx(1.632993161855452).epsilon(1e-14));
        CHECK(cat[0].kind == ResonanceKind::InteriorLPW);
        CHECK(cat[0].kpoints.size() == 2);
        CHECK(cat[1].omega == doctest::Approx(2.0));
        CHECK(cat[2].omega == doctest::Approx(2.581988897471611).epsilon(1e-14));
        CHECK(cat[2].kind == ResonanceKind::BandEdge);
        // both interior stars sit at atan(sqrt(1.5)) off the x axis
        for (int i : {0, 1}) {
            REQUIRE(cat[i].beaming.size() == 4);
            CHECK(cat[i].beaming[0] == doctest::Approx(0.8860771237926136).epsilon(1e-14));
        }
    }
    SUBCASE("honeycomb") {
        const auto cat = resonance_catalog(make_hcl());
        REQUIRE(cat.size() == 4);
        CHECK(cat[0].omega == doctest::Approx(std::sqrt(2.0)));
        CHECK(cat[0].kind == ResonanceKind::InteriorLPW);
        CHECK(cat[0].kpoints.size() == 6);
        REQUIRE(cat[0].beaming.size() == 6);
        CHECK(cat[0].beaming[0] == doctest::Approx(PI / 6.0));
        CHECK(cat[1].omega == doctest::Approx(SQ3));
        CHECK(cat[1].kind == ResonanceKind::ConicalPoint);
        CHECK(cat[1].kpoints.size() == 4);
        CHECK(cat[1].beaming.empty());
        CHECK(cat[2].omega == doctest::Approx(2.0));
        CHECK(cat[2].kind == ResonanceKind::InteriorLPW);
        CHECK(cat[3].omega == doctest::Approx(std::sqrt(6.0)));
        CHECK(cat[3].kind == ResonanceKind::BandEdge);
        // entries sorted
        for (std::size_t i = 1; i < cat.size(); ++i) CHECK(cat[i - 1].omega < cat[i].omega);
    }
    SUBCASE("triangular") {
        const auto cat = resonance_catalog(make_etl());
        REQUIRE(cat.size() == 2);
        CHECK(cat[0].omega == doctest::Approx(std::sqrt(8.0)));
        CHECK(cat[0].kpoints.size() == 6);
        REQUIRE(cat[0].beaming.size() == 6);
        CHECK(cat[0].beaming[0] == doctest::Approx(0.0));
        CHECK(cat[0].beaming[1] == doctest::Approx(PI / 3.0));
        CHECK(cat[1].omega == doctest::Approx(3.0));
    }
    SUBCASE("sheared, gamma = 1: six rays") {
        const auto cat = resonance_catalog(make_rtl(1.0));
        REQUIRE(cat.size() == 2);
        CHECK(cat[0].omega == doctest::Approx(std::sqrt(8.0)));
        REQUIRE(cat[0].beaming.size() == 6);
        CHECK(cat[0].beaming[0] == doctest::Approx(0.0));
        CHECK(cat[0].beaming[1] == doctest::Approx(PI / 4.0));
        CHECK(cat[0].beaming[2] == doctest::Approx(PI / 2.0));
        CHECK(cat[1].omega == doctest::Approx(3.0));
        CHECK(cat[1].kpoints.size() == 2);
    }
    SUBCASE("sheared, gamma away from 1: only the main diagonal") {
        const auto cat = resonance_catalog(make_rtl(2.0625));
        CHECK(cat[0].omega == doctest::Approx(3.5));
        REQUIRE(cat[0].beaming.size() == 2);
        CHECK(cat[0].beaming[0] == doctest::Approx(PI / 4.0));
        CHECK(cat[0].beaming[1] == doctest::Approx(5.0 * PI / 4.0));
        const auto cat2 = resonance_catalog(make_rtl(0.44));
        REQUIRE(cat2[0].beaming.size() == 2);
        CHECK(cat2[1].kpoints.size() == 4); // corner edge points survive below the threshold
    }
}

TEST_CASE("beaming direction lookup") {
    CHECK(beaming_directions(make_scl(), 2.0).size() == 4);
    CHECK(beaming_directions(make_hcl(), std::sqrt(2.0)).size() == 6);
    CHECK(beaming_directions(make_hcl(), 2.0).size() == 6);
    CHECK(beaming_directions(make_rtl(1.0), std::sqrt(8.0)).size() == 6);
    CHECK(beaming_directions(make_rtl(2.0625), 3.5).size() == 2);
    CHECK_THROWS_AS(beaming_directions(make_scl(), 1.7), domain_error);
    CHECK_THROWS_AS(beaming_directions(make_hcl(), std::sqrt(3.0)), domain_error);
    CHECK_THROWS_AS(beaming_directions(make_scl(), std::sqrt(8.0)), domain_error);
}

TEST_CASE("equifrequency contours") {
    SUBCASE("square lattice ring") {
        const auto cs = equifrequency_contour(make_scl(), 1.0, Branch::Single, 128);
        REQUIRE(cs.size() == 1);
        CHECK(cs[0].closed);
        CHECK(cs[0].vertices.size() > 100);
        for (const auto& v : cs[0].vertices)
            CHECK(omega(make_scl(), v) == doctest::Approx(1.0).epsilon(1e-6));
    }
    SUBCASE("stretched square rhombus at the resonance") {
        const LatticeSpec sr = make_srcl(1.5);
        const auto cs = equifrequency_contour(sr, 2.0, Branch::Single, 128);
        REQUIRE(cs.size() == 4); // four straight sides, split at the angular points
        std::size_t nv = 0;
        for (const auto& p : cs) {
            nv += p.vertices.size();
            for (const auto& v : p.vertices) {
                CHECK(std::abs(std::abs(v.kx) + 1.5 * std::abs(v.ky) - PI) < 2e-5);
                CHECK(omega(sr, v) == doctest::Approx(2.0).epsilon(1e-6));
            }
        }
        CHECK(nv > 100);
    }
    SUBCASE("band edge degenerates to points") {
        const auto cs = equifrequency_contour(make_scl(), std::sqrt(8.0), Branch::Single, 64);
        REQUIRE(cs.size() == 4);
        for (const auto& p : cs) {
            CHECK(p.vertices.size() == 1);
            CHECK(std::abs(p.vertices[0].kx) == doctest::Approx(PI));
            CHECK(std::abs(p.vertices[0].ky) == doctest::Approx(PI));
        }
    }
    SUBCASE("above the band nothing is left") {
        CHECK(equifrequency_contour(make_scl(), 3.0, Branch::Single, 64).empty());
        CHECK(equifrequency_contour(make_hcl(), 2.6, Branch::OpticalII, 64).empty());
    }
    SUBCASE("honeycomb hexagon carries both branches") {
        const LatticeSpec hc = make_hcl();
        for (auto [br, w] : {std::pair{Branch::AcousticI, std::sqrt(2.0)},
                             {Branch::OpticalII, 2.0}}) {
            const auto cs = equifrequency_contour(hc, w, br, 128);
            REQUIRE(!cs.empty());
            std::size_t nv = 0;
            for (const auto& p : cs)
                for (const auto& v : p.vertices) {
                    ++nv;
                    const double on_line = std::min(
                        std::abs(std::abs(v.ky) - PI),
                        std::abs(SQ3 * std::abs(v.kx) + std::abs(v.ky) - 2.0 * PI));
                    CHECK(on_line < 2e-5);
                    CHECK(omega(hc, v, br) == doctest::Approx(w).epsilon(1e-6));
                }
            CHECK(nv > 100);
        }
    }
    SUBCASE("conical frequency degenerates to the apices") {
        const auto cs = equifrequency_contour(make_hcl(), std::sqrt(3.0), Branch::AcousticI, 64);
        REQUIRE(cs.size() == 4);
        for (const auto& p : cs) CHECK(p.vertices.size() == 1);
    }
    SUBCASE("chain level set is a point pair") {
        const auto cs = equifrequency_contour(make_msl1d(), std::sqrt(2.0), Branch::Single, 64);
        REQUIRE(cs.size() == 2);
        CHECK(cs[0].vertices[0].kx == doctest::Approx(PI / 2.0).epsilon(1e-12));
        CHECK(cs[1].vertices[0].kx == doctest::Approx(-PI / 2.0).epsilon(1e-12));
    }
    SUBCASE("triangular hexagon at the interior resonance") {
        const LatticeSpec tr = make_etl();
        const auto cs = equifrequency_contour(tr, std::sqrt(8.0), Branch::Single, 128);
        REQUIRE(!cs.empty());
        for (const auto& p : cs)
            for (const auto& v : p.vertices) {
                const double on_line = std::min(std::abs(std::abs(v.kx) - PI),
                                                std::abs(std::abs(v.kx) + SQ3 * std::abs(v.ky) -
                                                         2.0 * PI));
                CHECK(on_line < 2e-5);
                CHECK(omega(tr, v) == doctest::Approx(std::sqrt(8.0)).epsilon(1e-6));
            }
    }
}

TEST_CASE("group velocity field sampling") {
    const auto fld = group_velocity_field(make_scl(), Branch::Single, 21);
    CHECK(fld.size() == 21 * 21);
    // corner sample sits at the band edge
    bool found_corner = false;
    for (const auto& s : fld)
        if (std::abs(s.k.kx - PI) < 1e-12 && std::abs(s.k.ky - PI) < 1e-12) {
            found_corner = true;
            CHECK(s.omega == doctest::Approx(std::sqrt(8.0)));
            CHECK_FALSE(s.smooth);
        }
    CHECK(found_corner);

    const auto one = group_velocity_field(make_msl1d(), Branch::Single, 33);
    CHECK(one.size() == 33);

    CHECK_THROWS_AS(group_velocity_field(make_scl(), Branch::Single, 1), domain_error);
}
