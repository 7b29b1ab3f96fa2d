/**********
 *   Copyright 2026 The polarsep Authors
 *
 *   Licensed under the Apache License, Version 2.0 (the "License");
 *   you may not use this file except in compliance with the License.
 *   You may obtain a copy of the License at
 *
 *       http://www.apache.org/licenses/LICENSE-2.0
 *
 *   Unless required by applicable law or agreed to in writing, software
 *   distributed under the License is distributed on an "AS IS" BASIS,
 *   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 *   See the License for the specific language governing permissions and
 *   limitations under the License.
\**********/
#include <doctest.h>

#include "polarsep/errors.hpp"
#include "polarsep/image_io.hpp"
#include "polarsep/metrics.hpp"
#include "polarsep/patterns.hpp"
#include "polarsep/serialization.hpp"
#include "test_support.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

using namespace polarsep;
using namespace polarsep::testing;

namespace {

Image float_image(std::size_t h, std::size_t w, std::size_t ch, std::mt19937_64& rng) {
    Image img = random_image(h, w, ch, rng, -2.0, 5.0);
    for (double& v : img.data())
        v = static_cast<float>(v);
    return img;
}

IoError::Kind read_failure(const std::string& bytes) {
    std::istringstream in(bytes);
    try {
        read_pfm(in);
    } catch (const IoError& e) {
        return e.kind();
    }
    FAIL("read_pfm accepted malformed input");
    return IoError::Kind::Open;
}

std::string le_floats(std::initializer_list<float> values) {
    std::string out;
    for (float f : values) {
        auto bits = std::bit_cast<std::uint32_t>(f);
        for (int i = 0; i < 4; ++i)
            out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
    }
    return out;
}

} // namespace

TEST_CASE("psnr") {
    std::mt19937_64 rng(51);
    const Image a = random_image(9, 11, 3, rng);
    const auto same = psnr(a, a);
    CHECK(same.identical);
    CHECK(std::isinf(same.db));
    CHECK(format_psnr(same) == "inf");

    Image b = a;
    for (double& v : b.data())
        v += 0.1;
    CHECK(psnr(a, b).db == doctest::Approx(20.0).epsilon(1e-12));

    const Image c = random_image(9, 11, 3, rng);
    double mse = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        mse += (a.data()[i] - c.data()[i]) * (a.data()[i] - c.data()[i]);
    mse /= static_cast<double>(a.size());
    CHECK(psnr(a, c).db == doctest::Approx(10.0 * std::log10(1.0 / mse)).epsilon(1e-12));
    CHECK(psnr(a, c, 2.0).db == doctest::Approx(10.0 * std::log10(4.0 / mse)).epsilon(1e-12));
    CHECK(psnr(a, c).db == psnr(c, a).db);

    // identical permutation of both images
    std::vector<std::size_t> perm(a.size());
    for (std::size_t i = 0; i < perm.size(); ++i)
        perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    Image pa = a, pc = c;
    for (std::size_t i = 0; i < perm.size(); ++i) {
        pa.data()[i] = a.data()[perm[i]];
        pc.data()[i] = c.data()[perm[i]];
    }
    CHECK(psnr(pa, pc).db == doctest::Approx(psnr(a, c).db).epsilon(1e-12));
    CHECK_THROWS_AS(psnr(a, Image(9, 11, 1)), ShapeError);
}

TEST_CASE("srgb transfer curve") {
    CHECK(linear_to_srgb(0.0) == 0.0);
    CHECK(linear_to_srgb(1.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(linear_to_srgb(0.0031308) - 0.04045) < 1e-6);
    CHECK(linear_to_srgb(-0.5) == 0.0);
    CHECK(linear_to_srgb(2.0) == doctest::Approx(1.0));
    double worst = 0.0, prev = -1.0;
    bool monotone = true;
    for (int i = 0; i < 1024; ++i) {
        const double x = i / 1023.0;
        const double e = linear_to_srgb(x);
        worst = std::max({worst, std::abs(srgb_to_linear(e) - x), std::abs(linear_to_srgb(srgb_to_linear(x)) - x)});
        monotone = monotone && e > prev;
        prev = e;
    }
    CHECK(worst < 1e-6);
    CHECK(monotone);
    Image img(2, 2, 1, 0.5);
    CHECK(linear_to_srgb(img)(1, 1, 0) == doctest::Approx(linear_to_srgb(0.5)));
}

TEST_CASE("metric report and csv") {
    std::mt19937_64 rng(53);
    const Image d = random_image(8, 8, 1, rng), s = random_image(8, 8, 1, rng);
    auto r = evaluate_separation(d, s, d, s);
    CHECK(r.psnr_diffuse.identical);
    CHECK(r.psnr_sum.identical);
    r.scene = "sphere-1";
    r.pattern = "random";
    r.k = 8;
    r.solver = "l2";
    r.gamma_d = 0.01;
    r.gamma_s = 0.002;
    CHECK(csv_header() == "scene,pattern,k,solver,gamma_d,gamma_s,psnr_diffuse,psnr_specular,psnr_sum");
    CHECK(csv_row(r) == "sphere-1,random,8,l2,0.01,0.002,inf,inf,inf");
    const Image d2 = d + Image(8, 8, 1, 0.1);
    const auto r2 = evaluate_separation(d2, s, d, s);
    CHECK(r2.psnr_diffuse.db == doctest::Approx(20.0));
    CHECK(r2.psnr_specular.identical);
    CHECK(r2.psnr_sum.db == doctest::Approx(20.0));
    CHECK(format_psnr(r2.psnr_diffuse) == "20.000000");
}

TEST_CASE("pfm round trip is bit exact") {
    std::mt19937_64 rng(55);
    const auto dir = scratch_dir("pfm");
    for (std::size_t ch : {1u, 3u}) {
        const Image img = float_image(7, 5, ch, rng);
        std::stringstream buf;
        write_pfm(buf, img);
        CHECK(read_pfm(buf) == img);
        const auto path = dir / ("img" + std::to_string(ch) + ".pfm");
        write_pfm(path, img);
        CHECK(read_pfm(path) == img);
    }
    CHECK_THROWS_AS(write_pfm(dir / "missing" / "x.pfm", Image(2, 2)), IoError);
}

TEST_CASE("pfm header parsing") {
    std::string payload;
    for (int i = 0; i < 48; ++i)
        payload += le_floats({static_cast<float>(i)});
    std::istringstream in("PF\n4 4\n-1.0\n" + payload);
    const Image img = read_pfm(in);
    CHECK(img.height() == 4);
    CHECK(img.width() == 4);
    CHECK(img.channels() == 3);
    // first stored row is the bottom image row, channels interleaved
    CHECK(img(3, 0, 0) == 0.0);
    CHECK(img(3, 0, 1) == 1.0);
    CHECK(img(3, 1, 0) == 3.0);
    CHECK(img(0, 0, 0) == 36.0);

    // big-endian payload (positive scale)
    std::string be;
    for (float f : {1.5f, -2.0f}) {
        auto bits = std::bit_cast<std::uint32_t>(f);
        for (int i = 3; i >= 0; --i)
            be.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
    }
    std::istringstream bin("Pf\n2 1\n1.0\n" + be);
    const Image g = read_pfm(bin);
    CHECK(g(0, 0, 0) == 1.5);
    CHECK(g(0, 1, 0) == -2.0);

    CHECK(read_failure("P6\n4 4\n-1.0\n") == IoError::Kind::MalformedHeader);
    CHECK(read_failure("PF\nfour 4\n-1.0\n") == IoError::Kind::MalformedHeader);
    CHECK(read_failure("Pf\n2 2\n0.0\n") == IoError::Kind::MalformedHeader);
    CHECK(read_failure("Pf\n0 2\n-1.0\n") == IoError::Kind::MalformedHeader);
    CHECK(read_failure("Pf\n100000 100000\n-1.0\n") == IoError::Kind::DimensionOverflow);
    CHECK(read_failure("Pf\n99999999999999999999 2\n-1.0\n") != IoError::Kind::TruncatedPayload);
    CHECK(read_failure("Pf\n2 2\n-1.0\n" + le_floats({1, 2, 3})) == IoError::Kind::TruncatedPayload);
    CHECK_THROWS_AS(read_pfm(std::filesystem::path("/nonexistent/file.pfm")), IoError);
}

TEST_CASE("png round trip is within one code value") {
    std::mt19937_64 rng(57);
    const auto dir = scratch_dir("png");
    for (std::size_t ch : {1u, 3u}) {
        const Image img = random_image(13, 17, ch, rng);
        const auto path = dir / ("img" + std::to_string(ch) + ".png");
        write_png(path, img);
        const Image back = read_png(path);
        REQUIRE(back.same_shape(img));
        double worst = 0.0;
        for (std::size_t i = 0; i < img.size(); ++i)
            worst = std::max(worst, std::abs(linear_to_srgb(back.data()[i]) - linear_to_srgb(img.data()[i])));
        CHECK(worst <= 1.0 / 255.0);
    }
    std::ofstream(dir / "junk.png") << "not a png";
    CHECK_THROWS_AS(read_png(dir / "junk.png"), IoError);
}

TEST_CASE("filter array json round trip") {
    const auto a = generate_pattern({PatternKind::Random, 8, 3, 6, 9});
    const Json j = to_json(a);
    CHECK(j.at("angles_deg").at(1).get<double>() == doctest::Approx(22.5));
    const FilterArray back = filter_array_from_json(j);
    CHECK(back.indices() == a.indices());
    for (std::size_t k = 0; k < 8; ++k)
        CHECK(back.orientations()[k] == doctest::Approx(a.orientations()[k]).epsilon(1e-15));
    const auto dir = scratch_dir("json");
    save_json(dir / "a.json", j);
    CHECK(filter_array_from_json(load_json(dir / "a.json")).indices() == a.indices());

    Json bad = j;
    bad["orientation_index"][0] = 8;
    CHECK_THROWS_AS(filter_array_from_json(bad), ValidationError);
    bad = j;
    bad["height"] = 7;
    CHECK_THROWS_AS(filter_array_from_json(bad), ValidationError);
    CHECK_THROWS_AS(filter_array_from_json(Json{{"height", 1}}), ValidationError);
    std::ofstream(dir / "broken.json") << "{ nope";
    CHECK_THROWS_AS(load_json(dir / "broken.json"), IoError);
}
