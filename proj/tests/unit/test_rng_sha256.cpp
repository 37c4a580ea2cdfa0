#include <doctest.h>

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "biaslens/errors.hpp"
#include "biaslens/rng.hpp"
#include "biaslens/sha256.hpp"

using namespace biaslens;

TEST_CASE("sha256 known vectors") {
    // FIPS 180-4 example vectors.
    CHECK(sha256_hex("") ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(sha256_hex("abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq") ==
          "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1");
    // Message that crosses a block boundary (padding spills into a second block).
    CHECK(sha256_hex(std::string(64, 'a')) ==
          "ffe054fe7ae0cb6dc65c3af9b61d5209f439851db43d0ba5997337df154668eb");
    CHECK(sha256_hex(std::string(1000000, 'a')) ==
          "cdc76e5c9914fb9281a1c7e284d73e67f1809a48a497200e046d39ccc7112cd0");
}

TEST_CASE("sha256 incremental equals one shot") {
    std::string msg = "the quick brown fox jumps over the lazy dog";
    Sha256 h;
    for (char c : msg) h.update(&c, 1);
    CHECK(h.hex_digest() == sha256_hex(msg));
}

TEST_CASE("sha256 file digest") {
    std::string path = "/tmp/biaslens_sha_test.bin";
    {
        std::ofstream out(path, std::ios::binary);
        out << "abc";
    }
    CHECK(sha256_file_hex(path) == sha256_hex("abc"));
    CHECK_THROWS_AS(sha256_file_hex("/nonexistent/biaslens/x"), IoError);
}

TEST_CASE("splitmix64 determinism") {
    SplitMix64 a(1234), b(1234);
    for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
}

TEST_CASE("splitmix64 reference stream") {
    // First outputs for seed 0; standard SplitMix64 test values.
    SplitMix64 g(0);
    CHECK(g.next() == 0xE220A8397B1DCDAFULL);
    CHECK(g.next() == 0x6E789E6AA1B965F4ULL);
    CHECK(g.next() == 0x06C45D188009454FULL);
}

TEST_CASE("uniform in unit interval") {
    SplitMix64 g(99);
    double lo = 1.0, hi = 0.0, sum = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        double u = g.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        lo = std::min(lo, u);
        hi = std::max(hi, u);
        sum += u;
    }
    CHECK(sum / n == doctest::Approx(0.5).epsilon(0.02));
    CHECK(lo < 0.01);
    CHECK(hi > 0.99);
}

TEST_CASE("gaussian moments") {
    SplitMix64 g(7);
    const int n = 200000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
        double x = g.gaussian();
        sum += x;
        sumsq += x * x;
    }
    double m = sum / n;
    double var = sumsq / n - m * m;
    CHECK(m == doctest::Approx(0.0).epsilon(1).scale(0.02));
    CHECK(var == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("stream derivation decorrelates keys") {
    // Streams for adjacent keys must not share a prefix.
    std::uint64_t s0 = derive_stream_seed(42, 0);
    std::uint64_t s1 = derive_stream_seed(42, 1);
    CHECK(s0 != s1);
    SplitMix64 a(s0), b(s1);
    int collisions = 0;
    for (int i = 0; i < 64; ++i) {
        if (a.next() == b.next()) ++collisions;
    }
    CHECK(collisions == 0);
    // Same key reproduces the same stream.
    CHECK(derive_stream_seed(42, 17) == derive_stream_seed(42, 17));
    // Different masters diverge for the same key.
    CHECK(derive_stream_seed(42, 17) != derive_stream_seed(43, 17));
}

TEST_CASE("bernoulli frequency") {
    SplitMix64 g(5);
    int hits = 0;
    const int n = 50000;
    for (int i = 0; i < n; ++i) hits += g.bernoulli(0.3) ? 1 : 0;
    CHECK(static_cast<double>(hits) / n == doctest::Approx(0.3).epsilon(0.03));
}
