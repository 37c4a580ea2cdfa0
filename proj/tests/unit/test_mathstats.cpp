#include <doctest.h>

#include <cmath>
#include <vector>

#include "biaslens/errors.hpp"
#include "biaslens/mathstats.hpp"

using namespace biaslens;

// Reference values in this file were cross-checked against numpy/scipy
// (np.quantile method="linear", np.std, scipy.stats.norm.sf,
// scipy.special.betainc, scipy.stats.t.sf).

TEST_CASE("mean basic") {
    CHECK(mean({2.0}) == doctest::Approx(2.0));
    CHECK(mean({1.0, 2.0, 3.0, 4.0}) == doctest::Approx(2.5));
    CHECK_THROWS_AS(mean({}), EmptyInputError);
}

TEST_CASE("population stddev divides by n") {
    // Two-point distribution: sd is half the gap, not (n-1)-normalized.
    CHECK(population_stddev({1.19, 2.83}) == doctest::Approx(0.82).epsilon(1e-12));
    CHECK(population_stddev({0.67, 1.73}) == doctest::Approx(0.53).epsilon(1e-12));
    CHECK(population_stddev({2, 4, 4, 4, 5, 5, 7, 9}) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(population_stddev({3.0}) == doctest::Approx(0.0));
}

TEST_CASE("quantile linear interpolation") {
    std::vector<double> v{3, 1, 4, 1, 5, 9, 2, 6};
    CHECK(quantile(v, 0.0) == doctest::Approx(1.0));
    CHECK(quantile(v, 0.25) == doctest::Approx(1.75));
    CHECK(quantile(v, 0.5) == doctest::Approx(3.5));
    CHECK(quantile(v, 0.75) == doctest::Approx(5.25));
    CHECK(quantile(v, 1.0) == doctest::Approx(9.0));
    // h = (n-1)p = 2.1 lands between sorted[2]=2 and sorted[3]=3.
    CHECK(quantile(v, 0.3) == doctest::Approx(2.1));
    CHECK(median(v) == doctest::Approx(3.5));
    CHECK(median({5.0, 1.0, 3.0}) == doctest::Approx(3.0));
    CHECK_THROWS_AS(quantile({}, 0.5), EmptyInputError);
    CHECK_THROWS_AS(quantile({1.0}, -0.1), DomainError);
    CHECK_THROWS_AS(quantile({1.0}, 1.1), DomainError);
}

TEST_CASE("normal upper tail") {
    CHECK(normal_sf(0.0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(normal_sf(1.0) == doctest::Approx(0.15865525393145707).epsilon(1e-12));
    CHECK(normal_sf(-1.0) == doctest::Approx(0.8413447460685429).epsilon(1e-12));
    CHECK(normal_sf(1.959963984540054) == doctest::Approx(0.025).epsilon(1e-10));
    CHECK(normal_sf(6.0) == doctest::Approx(9.865876450376946e-10).epsilon(1e-9));
    // Symmetry: sf(z) + sf(-z) == 1.
    for (double z : {0.3, 1.7, 2.9}) {
        CHECK(normal_sf(z) + normal_sf(-z) == doctest::Approx(1.0).epsilon(1e-13));
    }
}

TEST_CASE("regularized incomplete beta") {
    CHECK(incomplete_beta(0.5, 0.5, 0.3) == doctest::Approx(0.36901011956554536).epsilon(1e-12));
    CHECK(incomplete_beta(2.0, 3.0, 0.4) == doctest::Approx(0.5248).epsilon(1e-12));
    CHECK(incomplete_beta(5.0, 1.5, 0.9) == doctest::Approx(0.7761721343162159).epsilon(1e-12));
    // I_x(1,1) is the identity.
    CHECK(incomplete_beta(1.0, 1.0, 0.25) == doctest::Approx(0.25).epsilon(1e-13));
    CHECK(incomplete_beta(2.0, 3.0, 0.0) == doctest::Approx(0.0));
    CHECK(incomplete_beta(2.0, 3.0, 1.0) == doctest::Approx(1.0));
    // Complement identity I_x(a,b) = 1 - I_{1-x}(b,a).
    CHECK(incomplete_beta(2.0, 3.0, 0.4) ==
          doctest::Approx(1.0 - incomplete_beta(3.0, 2.0, 0.6)).epsilon(1e-12));
    CHECK_THROWS_AS(incomplete_beta(0.0, 1.0, 0.5), DomainError);
    CHECK_THROWS_AS(incomplete_beta(1.0, 1.0, 1.5), DomainError);
}

TEST_CASE("student t two sided p") {
    CHECK(student_t_two_sided_p(2.0, 10.0) == doctest::Approx(0.07338803477074039).epsilon(1e-12));
    CHECK(student_t_two_sided_p(-1.5, 3.0) == doctest::Approx(0.23058386524482283).epsilon(1e-12));
    CHECK(student_t_two_sided_p(0.0, 5.0) == doctest::Approx(1.0));
    CHECK(student_t_two_sided_p(2.5, 3300.0) == doctest::Approx(0.012467502666193812).epsilon(1e-12));
    // Sign of t must not matter.
    CHECK(student_t_two_sided_p(2.0, 10.0) == doctest::Approx(student_t_two_sided_p(-2.0, 10.0)));
}
