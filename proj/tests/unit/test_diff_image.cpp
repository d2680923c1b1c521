#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "sfcd/diff_image.hpp"
#include "sfcd/errors.hpp"

using namespace sfcd;

TEST_CASE("difference_image hand-evaluated pixels") {
  const Image a(3, 1, std::vector<double>{100, 0, 7});
  const Image b(3, 1, std::vector<double>{50, 0, 7});
  const Image s = difference_image(a, b);
  CHECK(s[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(s[1] == 0.0);
  CHECK(s[2] == 0.0);
}

TEST_CASE("difference_image of identical inputs is zero") {
  const Image a = testing::random_image(10, 10, 3, 0.0, 255.0);
  const Image d = difference_image(a, a);
  for (double v : d.data()) CHECK(v == 0.0);
}

TEST_CASE("difference_image shape mismatch names both shapes") {
  try {
    difference_image(Image(3, 2, 1.0), Image(2, 3, 1.0));
    FAIL("expected an error");
  } catch (const InputError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("3x2") != std::string::npos);
    CHECK(msg.find("2x3") != std::string::npos);
  }
}

TEST_CASE("difference_image symmetry, scale invariance and codomain") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> scale(1e-3, 1e3);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Image a = testing::random_integer_image(8, 8, seed, 3);  // many zeros and ties
    const Image b = testing::random_integer_image(8, 8, seed + 1000, 3);
    const Image ab = difference_image(a, b);
    CHECK(ab == difference_image(b, a));
    const double k = scale(rng);
    std::vector<double> ka, kb;
    for (double v : a.data()) ka.push_back(k * v);
    for (double v : b.data()) kb.push_back(k * v);
    const Image scaled = difference_image(Image(8, 8, ka), Image(8, 8, kb));
    for (std::size_t j = 0; j < ab.size(); ++j) {
      CHECK(std::abs(scaled[j] - ab[j]) <= 1e-12);
      CHECK(ab[j] >= 0.0);
      CHECK(ab[j] <= 1.0);
      if (a[j] == 0.0 && b[j] == 0.0) CHECK(ab[j] == 0.0);
    }
  }
}

TEST_CASE("quantize endpoints, midpoint and scalar oracle") {
  CHECK(quantize(Image(1, 1, 1.0), 256)[0] == 255.0);
  CHECK(quantize(Image(1, 1, 0.5), 3)[0] == 1.0);
  CHECK_THROWS_AS(quantize(Image(1, 1, 0.5), 1), InputError);

  const Image s = testing::random_image(13, 11, 9);
  for (int levels : {2, 16, 256, 65536}) {
    const Image q = quantize(s, levels);
    for (std::size_t j = 0; j < s.size(); ++j) {
      REQUIRE(q[j] == std::round(s[j] * (levels - 1)));
    }
  }
}

TEST_CASE("image_stats") {
  const auto st = image_stats(Image(4, 1, std::vector<double>{0.5, 0.0, 1.0, 0.5}));
  CHECK(st.min == 0.0);
  CHECK(st.max == 1.0);
  CHECK(st.mean == 0.5);
}
