#include <catch2/catch_amalgamated.hpp>

#include <singosc/transitions.hpp>

#include "oracle_helpers.hpp"

using namespace singosc;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("weight from coupling") {
    CHECK(weight_from_coupling(3.0).j == 1.0);
    CHECK_THAT(weight_from_coupling(0.0).j, WithinAbs(0.75, 1e-15));
    // Casimir invariant j(j-1) = (g-3)/16
    for (double g : {-0.5, 0.0, 1.0, 3.0, 10.0}) {
        const double j = weight_from_coupling(g).j;
        CHECK_THAT(j * (j - 1.0), WithinAbs((g - 3.0) / 16.0, 1e-14));
    }
    CHECK_THROWS_AS(weight_from_coupling(-1.0), validation_error);
    CHECK_THROWS_AS(weight_from_coupling(-2.0), validation_error);
}

TEST_CASE("ladder coefficients") {
    const auto w = weight_from_coupling(0.0); // j = 3/4
    CHECK_THAT(ladder_coefficient(w, 0), WithinAbs(1.2247448713915890491, 1e-15));
    const RepresentationWeight w15{3.0 + 16.0 * 1.5 * 0.5, 1.5};
    CHECK_THAT(ladder_coefficient(w15, 3), WithinRel(std::sqrt(24.0), 1e-15));
}

TEST_CASE("energy levels are equally spaced above 2 omega j") {
    const RepresentationWeight w{3.0, 1.0};
    CHECK(energy_level(0, 3.0, w) == 6.0);
    CHECK(energy_level(2, 3.0, w) == 18.0);
    CHECK_THAT(energy_level(5, 1.25, weight_from_coupling(0.0)),
               WithinRel(2.0 * 1.25 * 5.75, 1e-15));
    CHECK_THROWS_AS(energy_level(-1, 1.0, w), validation_error);
    CHECK_THROWS_AS(energy_level(0, 0.0, w), validation_error);
}

TEST_CASE("terminating 2f1 small cases by hand") {
    CHECK(terminating_2f1(0, 4, 1.5, 0.7) == 1.0);
    // S=1, L=1: 1 - (2j+1) rho = 1 - 2.5 * 0.5
    CHECK_THAT(terminating_2f1(1, 1, 1.5, 0.5), WithinAbs(-0.25, 1e-16));
    // S=2, L=3, 2j=1.5, rho=1/4: 1 - 9/8 + 33/128 = 17/128
    CHECK_THAT(terminating_2f1(2, 3, 1.5, 0.25), WithinAbs(17.0 / 128.0, 1e-16));
    CHECK_THROWS_AS(terminating_2f1(2, 1, 1.5, 0.5), validation_error);
    CHECK_THROWS_AS(terminating_2f1(-1, 1, 1.5, 0.5), validation_error);
}

TEST_CASE("jacobi recurrence matches the explicit series expansion") {
    for (int k = 0; k <= 8; ++k)
        for (double alpha : {0.0, 1.0, 2.5})
            for (double beta : {0.5, 1.2})
                for (double x : {-0.9, -0.3, 0.2, 0.8}) {
                    const double ref = oracle::jacobi_series(k, alpha, beta, x);
                    const double got = jacobi_polynomial(k, alpha, beta, x);
                    CHECK_THAT(got, WithinAbs(ref, 1e-12 * (1.0 + std::abs(ref))));
                }
}

TEST_CASE("transition probabilities match frozen reference values") {
    const RepresentationWeight j075{0.0, 0.75};
    const RepresentationWeight j150{0.0, 1.5};
    const RepresentationWeight j055{0.0, 0.55};
    struct Case {
        int m, n;
        RepresentationWeight w;
        double rho, expected;
    };
    const Case cases[] = {
        {0, 0, j075, 0.5, 0.3535533905932737622},
        {0, 1, j075, 0.5, 0.26516504294495532165},
        {2, 5, j075, 0.5, 0.00155774752096264341485},
        {2, 5, j150, 0.3, 0.0498389976},
        {3, 7, j055, 0.6, 0.0496136643209248462077},
        {30, 30, j055, 0.95, 0.00222854662759823457351},
    };
    for (const auto& c : cases) {
        for (auto method :
             {ProbabilityMethod::hypergeometric, ProbabilityMethod::jacobi}) {
            const double v =
                transition_probability({c.m, c.n, c.w, c.rho}, method);
            CHECK_THAT(v, WithinRel(c.expected, 1e-14));
        }
    }
}

TEST_CASE("the two evaluation routes agree") {
    for (double rho : {0.05, 0.35, 0.75, 0.95})
        for (double j : {0.55, 1.0, 2.25})
            for (int m : {0, 3, 17, 30})
                for (int n : {0, 5, 30}) {
                    const RepresentationWeight w{0.0, j};
                    const double a = transition_probability(
                        {m, n, w, rho}, ProbabilityMethod::hypergeometric);
                    const double b = transition_probability(
                        {m, n, w, rho}, ProbabilityMethod::jacobi);
                    CHECK_THAT(a, WithinAbs(b, 1e-11 * (1.0 + std::abs(b))));
                }
}

TEST_CASE("symmetry under index exchange") {
    const RepresentationWeight w{0.0, 1.25};
    for (auto [m, n] : {std::pair{0, 4}, {2, 7}, {5, 12}}) {
        const double a = transition_probability({m, n, w, 0.45});
        const double b = transition_probability({n, m, w, 0.45});
        CHECK_THAT(a, WithinRel(b, 1e-13));
    }
}

TEST_CASE("rho = 0 is the identity channel") {
    const RepresentationWeight w{0.0, 0.75};
    CHECK(transition_probability({4, 4, w, 0.0}) == 1.0);
    CHECK(transition_probability({4, 5, w, 0.0}) == 0.0);
    const auto table = build_table(w, 0.0, 3);
    for (int m = 0; m <= 3; ++m) {
        CHECK(table.w[m][m] == 1.0);
        CHECK(table.row_sums[m] == 1.0);
    }
}

TEST_CASE("tiny rho underflows to zero without error") {
    const RepresentationWeight w{0.0, 0.75};
    CHECK(transition_probability({0, 2, w, 1e-300}) == 0.0);
    CHECK_THAT(transition_probability({0, 0, w, 1e-300}), WithinAbs(1.0, 1e-15));
}

TEST_CASE("table rows are normalized after tail compensation") {
    const auto t1 = build_table(weight_from_coupling(0.0), 0.5, 5);
    for (double r : t1.row_residuals) CHECK(r < 1e-10);
    for (double e : t1.tail_estimates) CHECK(e < 1e-10);

    const auto t2 = build_table(RepresentationWeight{0.0, 3.0}, 0.9, 8);
    for (double r : t2.row_residuals) CHECK(r < 1e-10);

    // fixed-extent variant reproduces the same entries
    const auto f = build_table_fixed(weight_from_coupling(0.0), 0.5, 3, 10);
    for (int m = 0; m <= 3; ++m)
        for (int n = 0; n <= 10; ++n)
            CHECK_THAT(f.w[m][n], WithinAbs(t1.w[m][n], 1e-15));
}

TEST_CASE("first moment reproduces the closed-form mean") {
    // (m+j)(1+rho)/(1-rho); 26 exactly for m=5, j=3/2, rho=3/5
    CHECK_THAT(first_moment(RepresentationWeight{0.0, 1.5}, 0.6, 5),
               WithinRel(26.0, 1e-9));
    CHECK_THAT(first_moment(weight_from_coupling(0.0), 0.25, 2),
               WithinRel(55.0 / 12.0, 1e-9));
}

TEST_CASE("input validation") {
    const RepresentationWeight w{0.0, 0.75};
    CHECK_THROWS_AS(transition_probability({0, 0, w, 1.0}), validation_error);
    CHECK_THROWS_AS(transition_probability({0, 0, w, -0.1}), validation_error);
    CHECK_THROWS_AS(transition_probability({-1, 0, w, 0.5}), validation_error);
    CHECK_THROWS_AS(build_table(w, 0.5, -1), validation_error);
    CHECK_THROWS_AS(build_table(w, 0.5, 2, {0.0, 0}), validation_error);
    CHECK_THROWS_AS(jacobi_polynomial(-1, 0.0, 0.0, 0.5), validation_error);
}

TEST_CASE("a binding row cap raises a numerical error") {
    // mean extent at rho=0.9 is far past n=3, so the cap must bind
    CHECK_THROWS_AS(build_table(weight_from_coupling(0.0), 0.9, 0, {1e-10, 3}),
                    numerical_error);
}
