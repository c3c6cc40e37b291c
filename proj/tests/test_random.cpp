#include <catch2/catch_amalgamated.hpp>

#include "rbmroll/random.hpp"

using rbmroll::Rng;

TEST_CASE("identical seeds produce identical streams") {
    Rng a(1234), b(1234);
    for (int i = 0; i < 100; ++i) REQUIRE(a.next_u64() == b.next_u64());
}

TEST_CASE("different seeds diverge") {
    Rng a(1), b(2);
    int equal = 0;
    for (int i = 0; i < 64; ++i) equal += a.next_u64() == b.next_u64();
    REQUIRE(equal == 0);
}

TEST_CASE("split streams are reproducible and distinct from the parent") {
    Rng parent(99);
    Rng child = parent.split();
    Rng parent2(99);
    Rng child2 = parent2.split();
    for (int i = 0; i < 32; ++i) REQUIRE(child.next_u64() == child2.next_u64());
    // Parent continues from after the split point, same in both replicas.
    for (int i = 0; i < 32; ++i) REQUIRE(parent.next_u64() == parent2.next_u64());
}

TEST_CASE("uniform doubles live in [0,1) with a sane mean") {
    Rng rng(7);
    double sum = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const double u = rng.next_double();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        sum += u;
    }
    REQUIRE(sum / n == Catch::Approx(0.5).margin(0.01));
}

TEST_CASE("normal draws have unit variance") {
    Rng rng(21);
    double sum = 0.0, sum2 = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const double x = rng.next_normal();
        sum += x;
        sum2 += x * x;
    }
    const double mean = sum / n;
    const double var = sum2 / n - mean * mean;
    REQUIRE(mean == Catch::Approx(0.0).margin(0.03));
    REQUIRE(var == Catch::Approx(1.0).margin(0.05));
}

TEST_CASE("next_below covers its range uniformly") {
    Rng rng(5);
    int counts[10] = {};
    for (int i = 0; i < 10000; ++i) {
        const auto v = rng.next_below(10);
        REQUIRE(v < 10);
        ++counts[v];
    }
    for (int c : counts) REQUIRE(c > 800);
}

TEST_CASE("shuffle is deterministic per seed") {
    std::vector<int> a{1, 2, 3, 4, 5, 6, 7, 8};
    std::vector<int> b = a;
    Rng ra(42), rb(42);
    ra.shuffle(a);
    rb.shuffle(b);
    REQUIRE(a == b);
}
