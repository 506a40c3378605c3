#include <catch2/catch.hpp>

#include <cmath>
#include <cstdint>

#include "sweeping/rng.hpp"

using namespace sweeping;

TEST_CASE("keyed normals are deterministic") {
    for (std::uint64_t seed : {0ULL, 42ULL, 0xdeadbeefULL}) {
        REQUIRE(rng::normal(seed, 3, 17) == rng::normal(seed, 3, 17));
        REQUIRE(rng::normal(seed, 3, 17) != rng::normal(seed, 3, 18));
        REQUIRE(rng::normal(seed, 3, 17) != rng::normal(seed, 4, 17));
    }
}

TEST_CASE("keyed normals have standard moments") {
    const std::size_t n = 200000;
    double sum = 0.0, sum2 = 0.0, sum4 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double z = rng::normal(7, 0, i);
        sum += z;
        sum2 += z * z;
        sum4 += z * z * z * z;
    }
    const double mean = sum / n;
    const double var = sum2 / n - mean * mean;
    const double kurt = sum4 / n;
    REQUIRE(std::fabs(mean) < 4.0 / std::sqrt(static_cast<double>(n)));
    REQUIRE(var == Approx(1.0).margin(0.02));
    REQUIRE(kurt == Approx(3.0).margin(0.1));
}

TEST_CASE("uniform01 stays inside the open interval") {
    for (std::uint64_t k = 0; k < 10000; ++k) {
        const double u = rng::uniform01(rng::key(11, 2, k));
        REQUIRE(u > 0.0);
        REQUIRE(u < 1.0);
    }
}

TEST_CASE("derived sub-seeds decorrelate streams") {
    const std::uint64_t a = rng::derive_seed(123, 0);
    const std::uint64_t b = rng::derive_seed(123, 1);
    REQUIRE(a != b);
    // empirical correlation between the two streams
    const std::size_t n = 50000;
    double sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) sxy += rng::normal(a, 0, i) * rng::normal(b, 0, i);
    REQUIRE(std::fabs(sxy / n) < 4.0 / std::sqrt(static_cast<double>(n)));
}
