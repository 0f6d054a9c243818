#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "cradon/fields.hpp"
#include "cradon/spectral.hpp"

using namespace cradon;
using Catch::Approx;

TEST_CASE("disc_indicator") {
    SECTION("inside and outside values") {
        const GridField f =
            disc_indicator(0.5, {0, 0}, {-1, -1}, 0.01, 201, 201);
        CHECK(f.sample({0, 0}) == Approx(1.0));
        CHECK(f.sample({1.0, 0}) == Approx(0.0).margin(1e-12));
    }

    SECTION("integral approximates the disc area") {
        const GridField f =
            disc_indicator(0.5, {0, 0}, {-0.8, -0.8}, 0.005, 321, 321);
        CHECK(f.integral() == Approx(M_PI / 4).epsilon(0.01));
    }

    SECTION("radial symmetry up to the one-cell transition band") {
        const GridField f =
            disc_indicator(0.5, {0, 0}, {-1, -1}, 0.01, 201, 201, true);
        for (double rho : {0.2, 0.4, 0.6}) {
            const double va = f.sample({rho, 0.0});
            for (double ang : {0.7, 1.9, 3.8, 5.1}) {
                const double vb =
                    f.sample({rho * std::cos(ang), rho * std::sin(ang)});
                CHECK(std::abs(va - vb) <= 1.0);  // never exceeds a full jump
                if (std::abs(rho - 0.5) > 0.02) CHECK(std::abs(va - vb) < 0.02);
            }
        }
    }

    SECTION("unresolved radius is rejected") {
        CHECK_THROWS_AS(disc_indicator(0.015, {0, 0}, {-1, -1}, 0.01, 201, 201),
                        resolution_error);
    }
}

TEST_CASE("wavepacket_field") {
    const WavePacket p{{0.1, -0.05}, {40.0, 0.0}, 0.08};
    const GridField f = wavepacket_field(p, {-1, -1}, 0.005, 401, 401);

    SECTION("center value and envelope decay") {
        CHECK(f.sample(p.x0) == Approx(1.0).margin(1e-6));
        const Vec2 far = p.x0 + 4.0 * p.sigma * p.k.unit();
        CHECK(std::abs(f.sample(far)) <= std::exp(-8.0) + 1e-9);
    }

    SECTION("spectral peak sits at the packet wavevector") {
        const auto power = power_spectrum_2d(f.values, f.ny, f.nx);
        // locate the maximum over positive-x frequencies
        double best = -1.0;
        int bi = 0, bj = 0;
        for (int j = 0; j < f.ny; ++j)
            for (int i = 1; i < f.nx / 2; ++i) {
                const double v = power[static_cast<std::size_t>(j) * f.nx + i];
                if (v > best) {
                    best = v;
                    bi = i;
                    bj = j;
                }
            }
        const double dk = 2.0 * M_PI / (f.nx * f.spacing);
        const int jsigned = (bj <= f.ny / 2) ? bj : bj - f.ny;
        CHECK(std::abs(bi * dk - p.k.x) <= dk + 1e-12);
        CHECK(std::abs(jsigned * dk - p.k.y) <= dk + 1e-12);
    }

    SECTION("margin and wavelength validation") {
        CHECK_THROWS_AS(
            wavepacket_field({{0.9, 0.9}, {40, 0}, 0.08}, {-1, -1}, 0.005, 401, 401),
            resolution_error);
        CHECK_THROWS_AS(
            wavepacket_field({{0, 0}, {400, 0}, 0.08}, {-1, -1}, 0.005, 401, 401),
            resolution_error);
    }
}

TEST_CASE("bilinear sampling reproduces affine functions") {
    GridField f({-1, -1}, 0.07, 31, 31);
    f.fill([](Vec2 p) { return 0.3 - 1.7 * p.x + 0.9 * p.y; });
    for (double x : {-0.93, -0.2, 0.11, 0.77})
        for (double y : {-0.81, 0.05, 0.66}) {
            const double want = 0.3 - 1.7 * x + 0.9 * y;
            CHECK(f.sample({x, y}) == Approx(want).margin(1e-12));
        }
}

TEST_CASE("radial profiles") {
    SECTION("jump series of the worked radial ghost") {
        const RadialProfile g = RadialProfile::jump_series(
            2.25, {std::sqrt(3.0) / 3.0, -5.0 / 16.0, 83.0 / 5184.0});
        const double t = 0.01;
        const double expect = std::sqrt(3.0) / 3.0 - 5.0 / 16.0 * t +
                              83.0 / 5184.0 * t * t;
        CHECK(eval_radial(g, 2.25 + t) == Approx(expect).margin(1e-15));
        CHECK(eval_radial(g, 2.25 + t) == Approx(0.574229).margin(1e-5));
        CHECK(eval_radial(g, 2.25 - 0.01) == 0.0);
    }

    SECTION("smooth background only") {
        const RadialProfile g = RadialProfile::jump_series(
            2.25, {1.0}, [](double rho2) { return 0.25 * rho2; });
        CHECK(eval_radial(g, 1.0) == Approx(0.25));
        CHECK(eval_radial(g, 2.26) == Approx(0.25 * 2.26 + 1.0));
    }

    SECTION("disc profile") {
        const RadialProfile d = RadialProfile::disc(0.5);
        CHECK(eval_radial(d, 0.2) == 1.0);
        CHECK(eval_radial(d, 0.26) == 0.0);
        CHECK(d.jumps().size() == 1);
    }
}

TEST_CASE("grid field file round trip") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "cradon_fields_test";
    fs::create_directories(dir);

    GridField f({-0.25, 0.5}, 0.025, 17, 23);
    f.fill([](Vec2 p) { return std::sin(3 * p.x) * p.y; });
    const std::string bin = (dir / "f.field").string();
    save_grid_field(f, bin);

    const GridField g = load_grid_field(bin);
    CHECK(g.nx == f.nx);
    CHECK(g.ny == f.ny);
    CHECK(g.spacing == Approx(f.spacing).margin(0));
    CHECK(g.origin.x == Approx(f.origin.x).margin(0));
    REQUIRE(g.values.size() == f.values.size());
    for (std::size_t k = 0; k < f.values.size(); ++k)
        CHECK(g.values[k] == f.values[k]);

    // header is exactly 80 bytes of text
    CHECK(fs::file_size(bin) == 80 + f.values.size() * sizeof(double));

    const std::string pgm = (dir / "f.pgm").string();
    save_pgm(f, pgm);
    CHECK(fs::file_size(pgm) > static_cast<std::size_t>(f.nx) * f.ny);

    CHECK_THROWS_AS(load_grid_field((dir / "missing.field").string()), io_error);
    fs::remove_all(dir);
}
