#include "oracles.hpp"

#include "dialnorm/error.hpp"
#include "dialnorm/rating_io.hpp"
#include "dialnorm/reliability.hpp"
#include "dialnorm/special_functions.hpp"

#include <doctest.h>

#include <cmath>

using namespace dialnorm;
using testing::Gen;
using testing::likert;
using testing::naive_icc2k;

TEST_CASE("icc2k agrees with a naive ANOVA on random 27x3 matrices") {
    Gen g(1234);
    for (int trial = 0; trial < 100; ++trial) {
        const Eigen::MatrixXd m = trial % 2 ? likert(g, 27, 3) : g.matrix(27, 3);
        const auto r = icc2k(m);
        const auto o = naive_icc2k(m);
        CHECK(r.df1 == 26);
        CHECK(r.df2 == 52);
        CHECK(std::abs(r.icc - o.icc) <= 1e-9);
        CHECK(std::abs(r.f - o.f) <= 1e-9 * std::max(1.0, std::abs(o.f)));
        CHECK(r.ci_low <= r.icc);
        CHECK(r.icc <= r.ci_high);
        CHECK(r.p >= 0.0);
        CHECK(r.p <= 1.0);
    }
}

TEST_CASE("icc2k matches a frozen fixture including the interval") {
    Eigen::MatrixXd m(27, 3);
    m << 5, 5, 5, 4, 4, 4, 5, 5, 5, 5, 5, 5, 4, 3, 2, 5, 3, 5, 5, 4, 4, 2, 1, 1, 1, 2, 1, 3, 3, 3, 2, 2, 2, 4, 5, 5, 4,
        5, 4, 1, 1, 2, 4, 4, 2, 5, 5, 5, 1, 1, 2, 4, 3, 4, 1, 2, 2, 2, 3, 4, 5, 5, 5, 1, 3, 2, 1, 1, 2, 3, 2, 2, 5, 5, 4,
        2, 2, 1, 4, 5, 5;
    const auto r = icc2k(m);
    CHECK(r.icc == doctest::Approx(0.9374126417145519).epsilon(1e-12));
    CHECK(r.f == doctest::Approx(15.440191387559793).epsilon(1e-12));
    CHECK(r.p == doctest::Approx(2.3431242221648296e-16).epsilon(1e-6));
    CHECK(r.ci_low == doctest::Approx(0.8811864752799622).epsilon(1e-6));
    CHECK(r.ci_high == doctest::Approx(0.9694522593672988).epsilon(1e-6));
}

TEST_CASE("F survival function: frozen values and the reported magnitude") {
    const double p = special::f_sf(14.700, 26, 52);
    CHECK(p >= 5e-16);
    CHECK(p <= 9e-16);
    CHECK(p == doctest::Approx(6.773457939372229e-16).epsilon(1e-8));
    CHECK(special::f_sf(2.5, 3, 10) == doctest::Approx(0.11903956265827816).epsilon(1e-10));
    CHECK(special::f_sf(0.5, 1, 1) == doctest::Approx(0.6081734479693929).epsilon(1e-10));
    CHECK(special::f_sf(1.0, 5, 2) == doctest::Approx(0.5687988496283078).epsilon(1e-10));
    CHECK(special::f_sf(3.2, 26, 52) == doctest::Approx(0.00017693575873328323).epsilon(1e-9));
    CHECK(special::f_sf(10, 2, 7.5) == doctest::Approx(0.007655651157277734).epsilon(1e-10));
    CHECK(special::f_sf(0.0, 4, 9) == 1.0);
    CHECK_THROWS_AS(special::f_sf(-1.0, 4, 9), DomainError);
    CHECK(special::incomplete_beta(0.5, 0.5, 0.3) == doctest::Approx(0.36901011956554536).epsilon(1e-11));
    CHECK(special::incomplete_beta(2, 3, 0.4) == doctest::Approx(0.5248).epsilon(1e-12));
    CHECK(special::incomplete_beta(10, 20, 0.35) == doctest::Approx(0.5923866636639051).epsilon(1e-11));
    CHECK(special::incomplete_beta(1, 1, 0.77) == doctest::Approx(0.77).epsilon(1e-12));
    CHECK(special::f_isf(0.025, 26, 52) == doctest::Approx(1.895044553294679).epsilon(1e-8));
    CHECK(special::f_isf(0.025, 52, 26) == doctest::Approx(2.046744308189503).epsilon(1e-8));
    CHECK(special::t_two_sided_p(2.1, 9) == doctest::Approx(0.06511828241215198).epsilon(1e-10));
}

TEST_CASE("property: f_isf inverts f_sf") {
    Gen g(31);
    for (int trial = 0; trial < 200; ++trial) {
        const double d1 = g.uniform(1, 60), d2 = g.uniform(1, 60), p = g.uniform(0.001, 0.999);
        const double x = special::f_isf(p, d1, d2);
        CHECK(special::f_sf(x, d1, d2) == doctest::Approx(p).epsilon(1e-6));
    }
}

TEST_CASE("property: icc is invariant under global affine shifts of the cells") {
    Gen g(99);
    for (int trial = 0; trial < 100; ++trial) {
        const Eigen::MatrixXd m = likert(g, g.integer(3, 30), g.integer(2, 6));
        const double a = g.uniform(0.1, 10.0) * (g.coin() ? 1 : -1);
        const double b = g.uniform(-50, 50);
        const Eigen::MatrixXd shifted = (m.array() + b).matrix();
        const Eigen::MatrixXd scaled = (a * m.array() + b).matrix();
        const double base = icc2k(m).icc;
        CHECK(std::abs(icc2k(shifted).icc - base) <= 1e-9);
        CHECK(std::abs(icc2k(scaled).icc - base) <= 1e-9);
    }
}

TEST_CASE("icc edge cases") {
    Eigen::MatrixXd same(4, 3);
    same.setConstant(3);
    CHECK_THROWS_AS(icc2k(same), DegenerateError);
    Eigen::MatrixXd perfect(4, 3);
    perfect << 1, 1, 1, 2, 2, 2, 3, 3, 3, 5, 5, 5;
    const auto r = icc2k(perfect);
    CHECK(r.icc == doctest::Approx(1.0));
    CHECK(std::isinf(r.f));
    CHECK(r.p == 0.0);
    CHECK_THROWS_AS(icc2k(Eigen::MatrixXd::Ones(1, 3)), ValidationError);
    Eigen::MatrixXd nan = perfect;
    nan(0, 0) = std::nan("");
    CHECK_THROWS_AS(icc2k(nan), ValidationError);
    Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic> ints = perfect.cast<int>();
    CHECK(icc2k(ints).icc == doctest::Approx(1.0));
}

TEST_CASE("property: pairwise Pearson") {
    Gen g(5);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = g.integer(3, 30);
        Eigen::VectorXd col = g.matrix(n, 1);
        if (col.maxCoeff() - col.minCoeff() < 1e-9) continue;
        Eigen::MatrixXd m(n, 3);
        m << col, col, col;
        CHECK(pearson_pairwise_avg(m) == doctest::Approx(1.0).epsilon(1e-12));
        m.col(2) = -col;
        CHECK(pearson_pairwise_avg(m) == doctest::Approx(-1.0 / 3.0).epsilon(1e-12));
        const Eigen::MatrixXd r = g.matrix(n, 4);
        const double avg = pearson_pairwise_avg(r);
        CHECK(avg >= -1.0);
        CHECK(avg <= 1.0);
    }
    Eigen::MatrixXd flat(3, 2);
    flat << 1, 2, 1, 3, 1, 4;
    CHECK_THROWS_AS(pearson_pairwise_avg(flat), DegenerateError);
}

TEST_CASE("property: paired t-test antisymmetry and degenerate input") {
    Gen g(17);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = g.integer(2, 40);
        const Eigen::MatrixXd a = g.matrix(n, 1), b = g.matrix(n, 1);
        const auto ab = paired_ttest(a, b);
        const auto ba = paired_ttest(b, a);
        CHECK(ab.t == doctest::Approx(-ba.t).epsilon(1e-12));
        CHECK(ab.p == doctest::Approx(ba.p).epsilon(1e-12));
        CHECK(ab.df == n - 1);
        const Eigen::MatrixXd shifted = (a.array() + 1.0).matrix();
        CHECK_THROWS_AS(paired_ttest(shifted, a), DegenerateError);
        CHECK_THROWS_AS(paired_ttest(a, a), DegenerateError);
    }
    Eigen::VectorXd a(4), b(3);
    a << 1, 2, 3, 4;
    b << 1, 2, 3;
    CHECK_THROWS_AS(paired_ttest(a, b), ValidationError);
    Eigen::VectorXd x(5), y(5);
    x << 1, 2, 3, 4, 5;
    y << 2, 2, 5, 4, 9;
    const auto r = paired_ttest(x, y);
    CHECK(r.t == doctest::Approx(-1.8708286933869707).epsilon(1e-12));
    CHECK(r.df == 4);
}

TEST_CASE("rating matrix files") {
    auto m = parse_rating_matrix("record_id,A1,A2\n4,1,2\n9,3,5\n");
    CHECK(m.raters == std::vector<std::string>{"A1", "A2"});
    CHECK(m.values(1, 1) == 5);
    m = parse_rating_matrix("A,B,C\n1,2,3\n4,5,6\n");
    CHECK(m.values.cols() == 3);
    m = parse_rating_matrix("1,2\n3,4\n");
    CHECK(m.values.rows() == 2);
    CHECK(m.raters.empty());
    CHECK_THROWS_AS(parse_rating_matrix(""), SchemaError);
    CHECK_THROWS_AS(parse_rating_matrix("A,B\n1,2\n3\n"), RowError);
    CHECK_THROWS_AS(parse_rating_matrix("A,B\n1,x\n"), RowError);
}
