#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "cmlab/bounds.hpp"

using namespace cmlab;

TEST_CASE("generic polynomial bound") {
    SECTION("Delta = 0 collapses to m h1 log2 K") {
        auto r = cm_generic_poly(8, 4, 0.0, 2.0, 1 << 20);
        CHECK(r.value == Catch::Approx(32.0));
    }
    SECTION("quadratic-height instance") {
        double n = 64;
        auto r = cm_generic_poly(n, n, 0.5, 2.0, n * n);
        CHECK(r.value == Catch::Approx(n * n)); // (n^2)^2 / n^2
    }
    SECTION("guard reported when T log T dominates") {
        auto r = cm_generic_poly(4, 4, 0.5, 2.0, 1e9);
        CHECK_FALSE(r.precondition_ok);
    }
    CHECK_THROWS_AS(cm_generic_poly(4, 4, 1.0, 2.0, 16), std::invalid_argument);
}

TEST_CASE("full general bound") {
    SECTION("constant h0 with unit parameters collapses to the fixed-height form") {
        GeneralBoundParams P;
        P.n = 1024;
        P.domain_bits = 1;
        P.m = 256;
        P.m_prime = 256;
        P.K = 4;
        P.C = 1;
        P.alpha = 1;
        P.c_exponent = 0;
        P.T = 1 << 16;
        P.h0 = constant_one_function();
        P.h1 = 64;
        auto r = cm_general(P);
        // (1/6) * m * h1 * log2 K with loss = 1 and the m-branch minimum
        CHECK(r.value == Catch::Approx(256.0 * 64.0 * 2.0 / 6.0));
        CHECK(r.precondition_ok);
    }
    SECTION("m' at most log2 n is flagged") {
        GeneralBoundParams P;
        P.n = 1024;
        P.m = 64;
        P.m_prime = 10; // == log2(1024)
        P.K = 2;
        P.T = 4096;
        P.h0 = constant_one_function();
        P.h1 = 16;
        auto r = cm_general(P);
        CHECK_FALSE(r.precondition_ok);
    }
    SECTION("consistency: general bound dominates the specialized unique-elements value") {
        // unique-elements instantiation: h'(k,n) = n/4, m' = n/4, m = n/(2e),
        // K = e^(1/2), C = 1, alpha = 1/(2e-1)
        double n = 4096;
        GeneralBoundParams P;
        P.n = n;
        P.domain_bits = std::log2(n);
        P.m = n / (2 * std::exp(1.0));
        P.m_prime = n / 4;
        P.K = std::exp(0.5);
        P.C = 1;
        P.alpha = 1 / (2 * std::exp(1.0) - 1);
        P.c_exponent = 0;
        P.T = n * n; // large enough that the CM branch value is the statement's
        P.h0 = constant_one_function();
        P.h1 = n / 4;
        auto general = cm_general(P);

        double matching_constant = std::log2(std::exp(0.5)) / (6.0 * 8.0 * std::exp(1.0));
        auto specialized = cm_applications("unique", {{"n", n}, {"constant", matching_constant}});
        CHECK(general.value >= specialized.value * (1 - 1e-9));
    }
}

TEST_CASE("application bound exact instances") {
    SECTION("quantum sorting proof constant") {
        auto r = cm_applications("qsort", {{"n", 256}, {"T", 4096}, {"beta", 1}});
        CHECK(r.value == Catch::Approx(16.0)); // 2^24 / (256 * 2^12)
    }
    SECTION("matrix multiplication with unit constants") {
        auto r = cm_applications("matmul", {{"n", 4}, {"d", 2}, {"T", 64}});
        CHECK(r.value == Catch::Approx(64.0)); // 4^6 / 64
    }
    SECTION("k-collision precondition flag") {
        auto r = cm_applications("kcollision", {{"n", 1024}, {"T", 4096}, {"k", 10}});
        CHECK_FALSE(r.precondition_ok); // k == log2(n)
        r = cm_applications("kcollision", {{"n", 1024}, {"T", 4096}, {"k", 64}});
        CHECK(r.precondition_ok);
        CHECK(r.value == Catch::Approx(64.0 * 64 * 64 * 1024 / (4096.0 * 4096.0)));
    }
    SECTION("remaining tags evaluate") {
        CHECK(cm_applications("sort-classical", {{"n", 256}}).value ==
              Catch::Approx(256.0 * 256.0 / 8.0));
        CHECK(cm_applications("unique", {{"n", 256}}).value == Catch::Approx(65536.0));
        CHECK(cm_applications("matvec", {{"g", 64}, {"h", 64}, {"d", 4}}).value ==
              Catch::Approx(64.0 * 64.0 * 2.0));
        CHECK(cm_applications("qboolmm", {{"n", 4}, {"T", 16}}).value == Catch::Approx(64.0));
        CHECK(cm_applications("qsort-delta", {{"n", 16}, {"T", 256}, {"delta", 0.5}}).value ==
              Catch::Approx(0.5 * 4096 / 256));
        CHECK(cm_applications("ham", {{"n", 256}, {"T", 1024}}).value ==
              Catch::Approx(256.0 * 256.0 * 8.0 / 16.0));
        auto ed = cm_applications("ed", {{"n", 256}, {"T", 512}});
        CHECK(ed.value == Catch::Approx(65536.0 / 16.0)); // (T/n)^(T2/n2 log) = 2^(4*1)
    }
    SECTION("explicit-constant modes evaluate without overflow") {
        auto ham = cm_applications("ham", {{"n", 65536}, {"T", 65536.0 * 4}, {"N", 1ll << 40},
                                           {"explicit", 1}});
        CHECK(ham.value >= 0);
        auto ed = cm_applications("ed", {{"n", 65536}, {"T", 65536.0 * 6}, {"explicit", 1}});
        CHECK(ed.log2_value <= 0); // astronomically small but finite in log space
    }
    CHECK_THROWS_AS(cm_applications("nope", {}), std::invalid_argument);
    CHECK_THROWS_AS(cm_applications("qsort", {{"n", 16}}), std::invalid_argument);
    CHECK_THROWS_AS(cm_applications("qsort", {{"n", -4}, {"T", 64}, {"beta", 1}}),
                    std::invalid_argument);
}

TEST_CASE("bounds are monotone in T and n") {
    for (std::string tag : {"qsort", "matmul", "qboolmm", "kcollision", "ham", "ed"}) {
        double prev = 1e300;
        for (double T : {1024.0, 2048.0, 4096.0, 8192.0}) {
            std::map<std::string, double> p{{"n", 512}, {"T", T}, {"d", 2}, {"beta", 1}, {"k", 8}};
            double v = cm_applications(tag, p).log2_value;
            INFO(tag << " T=" << T);
            CHECK(v <= prev + 1e-9);
            prev = v;
        }
        double prev_n = -1e300;
        for (double n : {64.0, 128.0, 256.0}) {
            std::map<std::string, double> p{{"n", n}, {"T", 65536}, {"d", 2}, {"beta", 1}, {"k", 8}};
            double v = cm_applications(tag, p).log2_value;
            INFO(tag << " n=" << n);
            CHECK(v >= prev_n - 1e-9);
            prev_n = v;
        }
    }
    // T-independent tags are trivially non-increasing in T and grow with n
    for (std::string tag : {"sort-classical", "unique"}) {
        double a = cm_applications(tag, {{"n", 64}}).value;
        double b = cm_applications(tag, {{"n", 256}}).value;
        CHECK(b >= a);
    }
}

TEST_CASE("sigma bound and alpha threshold") {
    SECTION("threshold formula") {
        double thr = alpha_threshold(0.0, 0, 0, 1.0);
        CHECK(thr == Catch::Approx(std::min(1.0 / (16 * std::sqrt(std::exp(1.0) + 1)),
                                            std::sqrt(1.0 / 8.0))));
    }
    SECTION("side condition violation") {
        CHECK_THROWS_AS(sigma_bound(0.01, 1.0, 10, 20, 1, 1), std::invalid_argument);
    }
    SECTION("consistency sweep: alpha under threshold forces sigma <= a e^(-gamma k)") {
        std::mt19937_64 rng(97);
        std::uniform_real_distribution<double> gam(0.0, 3.0);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        int done = 0;
        while (done < 1000) {
            double gamma = gam(rng);
            double k = 1 + static_cast<double>(rng() % 64);
            double thr = alpha_threshold(gamma, 0, 0, 1.0);
            // n large enough for a non-empty admissible window and the side condition
            double n_min = std::max(k * (std::exp(gamma + 1.0) + 1.0) + 1.0,
                                    k / (thr * thr) * 1.1);
            double n = n_min * (1.0 + 2.0 * unif(rng));
            double lo = std::sqrt(k / n);
            if (lo >= thr) continue;
            double alpha = lo + (thr - lo) * unif(rng) * 0.999;
            double sigma = sigma_bound(alpha, gamma, k, n, 1.0, 1.0);
            REQUIRE(sigma <= std::exp(-gamma * k) * (1 + 1e-9));
            ++done;
        }
    }
}
