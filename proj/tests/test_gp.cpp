// SPDX-License-Identifier: Apache-2.0
//
// fdrelay: analysis and simulation of multi-pair two-way full-duplex
// amplify-and-forward relaying with large antenna arrays.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------


#include "fdrelay/gp.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace fdrelay;

namespace {

Monomial x(int id, double p = 1.0) { return Monomial::variable(id, p); }

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("monomial and posynomial algebra") {
    const Monomial m = 3.0 * x(0, 2.0) * x(1, -1.0);
    CHECK(m.coefficient() == doctest::Approx(3.0));
    CHECK(m.exponent(0) == 2.0);
    CHECK(m.exponent(1) == -1.0);
    CHECK(m.exponent(7) == 0.0);
    const Eigen::Vector2d at(2.0, 4.0);
    CHECK(m.eval(at) == doctest::Approx(3.0 * 4.0 / 4.0));
    CHECK(m.inverse().eval(at) == doctest::Approx(1.0 / 3.0));
    CHECK(m.pow(0.5).eval(at) == doctest::Approx(std::sqrt(3.0)));
    CHECK((m * m.inverse()).eval(at) == doctest::Approx(1.0));
    CHECK((m * m.inverse()).exponents().empty());
    CHECK(Monomial::from_log(std::log(5.0)).coefficient() == doctest::Approx(5.0));

    Posynomial p = m;
    p += Posynomial(x(1));
    p += Posynomial(Monomial(2.0));
    CHECK(p.terms().size() == 3);
    CHECK(p.eval(at) == doctest::Approx(3.0 + 4.0 + 2.0));
    const Posynomial q = p * x(0);
    CHECK(q.eval(at) == doctest::Approx(18.0));
    CHECK((p + q).eval(at) == doctest::Approx(27.0));
    CHECK((x(1) * p).eval(at) == doctest::Approx(36.0));
    const Eigen::Vector2d y = at.array().log();
    CHECK(p.log_eval(y) == doctest::Approx(std::log(9.0)));

    // stable far outside double range
    Posynomial huge = Monomial::from_log(800.0);
    huge += Posynomial(Monomial::from_log(799.0));
    CHECK(huge.log_eval(Eigen::Vector2d::Zero()) == doctest::Approx(800.0 + std::log1p(std::exp(-1.0))));
}

TEST_CASE("algebra and program validation errors") {
    CHECK_THROWS_AS(Monomial(0.0), std::invalid_argument);
    CHECK_THROWS_AS(Monomial(-1.0), std::invalid_argument);
    CHECK_THROWS_AS(Monomial{HUGE_VAL}, std::invalid_argument);
    CHECK_THROWS_AS(Monomial::variable(-1), std::invalid_argument);
    CHECK_THROWS_AS(Monomial::from_log(NAN), std::invalid_argument);
    CHECK_THROWS_AS(x(3).eval(Eigen::Vector2d(1.0, 1.0)), std::out_of_range);

    GeometricProgram gp;
    CHECK_THROWS_AS(gp.add_variable(0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(gp.add_variable(2.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(gp.add_variable(1.0, INFINITY), std::invalid_argument);
    const int v = gp.add_variable(0.5, 2.0, "v");
    CHECK(gp.name(v) == "v");
    CHECK_THROWS_AS(gp.validate(), std::invalid_argument);  // no objective
    gp.minimize(x(v));
    CHECK_NOTHROW(gp.validate());
    CHECK_THROWS_AS(gp.add_constraint(Posynomial()), std::invalid_argument);
    gp.add_constraint(x(1));
    CHECK_THROWS_AS(gp.validate(), std::invalid_argument);  // unknown variable
    CHECK_THROWS_AS(solve_gp(gp), std::invalid_argument);

    GeometricProgram ok;
    ok.add_variable(0.5, 2.0);
    ok.minimize(x(0));
    CHECK_THROWS_AS(solve_gp(ok, 0.0), std::invalid_argument);
}

TEST_CASE("hand-checkable programs") {
    SUBCASE("binding lower constraint") {
        GeometricProgram gp;
        gp.add_variable(1e-3, 1e3);
        gp.minimize(x(0));
        gp.add_constraint(x(0, -1.0));
        const auto s = solve_gp(gp);
        CHECK(s.status == GpStatus::Optimal);
        CHECK(std::abs(s.values(0) - 1.0) < 1e-6);
        CHECK(std::abs(s.objective_value - 1.0) < 1e-6);
    }
    SUBCASE("x + 1/x") {
        GeometricProgram gp;
        gp.add_variable(1e-3, 1e3);
        gp.minimize(Posynomial(x(0)) + Posynomial(x(0, -1.0)));
        const auto s = solve_gp(gp);
        CHECK(s.status == GpStatus::Optimal);
        CHECK(std::abs(s.objective_value - 2.0) < 1e-6 * 2.0);
        // flat minimum: objective error is quadratic in the argument error
        CHECK(std::abs(s.values(0) - 1.0) < 2e-3);
    }
    SUBCASE("product with two binding constraints") {
        GeometricProgram gp;
        gp.add_variable(1e-3, 1e3);
        gp.add_variable(1e-3, 1e3);
        gp.minimize(x(0) * x(1));
        gp.add_constraint(2.0 * x(0, -1.0));
        gp.add_constraint(3.0 * x(1, -1.0));
        const auto s = solve_gp(gp);
        CHECK(s.status == GpStatus::Optimal);
        CHECK(rel(s.values(0), 2.0) < 1e-6);
        CHECK(rel(s.values(1), 3.0) < 1e-6);
        CHECK(rel(s.objective_value, 6.0) < 1e-6);
        // brute-force confirmation on a 1e-3 log10 grid
        CHECK(rel(oracle::grid_minimum(gp, 1.0, 10.0, 1e-3), 6.0) < 1e-2);
    }
    SUBCASE("maximising a monomial") {
        GeometricProgram gp;
        gp.add_variable(0.1, 10.0);
        gp.add_variable(0.1, 10.0);
        gp.maximize(x(0) * x(1));
        gp.add_constraint(Posynomial(0.5 * x(0)) + Posynomial(0.25 * x(1)));
        // x/2 + y/4 <= 1 with xy maximal: x = 1, y = 2
        const auto s = solve_gp(gp);
        CHECK(s.status == GpStatus::Optimal);
        CHECK(rel(s.values(0), 1.0) < 1e-5);
        CHECK(rel(s.values(1), 2.0) < 1e-5);
        CHECK(gp.max_violation(s.values) <= 1.0 + 1e-6);
    }
}

TEST_CASE("feasibility") {
    SUBCASE("constant constraint above one") {
        GeometricProgram gp;
        gp.add_variable(0.1, 10.0);
        gp.minimize(x(0));
        gp.add_constraint(Monomial(2.0));
        const auto f = gp_feasible(gp);
        CHECK_FALSE(f.feasible);
        CHECK(f.min_slack == doctest::Approx(2.0));
        CHECK(solve_gp(gp).status == GpStatus::Infeasible);
    }
    SUBCASE("no constraints") {
        GeometricProgram gp;
        gp.add_variable(0.01, 100.0);
        gp.add_variable(2.0, 8.0);
        gp.minimize(x(0));
        const auto f = gp_feasible(gp);
        CHECK(f.feasible);
        CHECK(f.witness(0) == doctest::Approx(1.0));
        CHECK(f.witness(1) == doctest::Approx(4.0));
    }
    SUBCASE("constraints outside the box") {
        GeometricProgram gp;
        gp.add_variable(0.1, 1.0);
        gp.minimize(x(0));
        gp.add_constraint(2.0 * x(0, -1.0));  // needs x >= 2
        CHECK_FALSE(gp_feasible(gp).feasible);
        CHECK(solve_gp(gp).status == GpStatus::Infeasible);
    }
    SUBCASE("a thin but nonempty set") {
        GeometricProgram gp;
        gp.add_variable(0.1, 10.0);
        gp.minimize(x(0, -1.0));
        gp.add_constraint(0.5 * x(0));
        gp.add_constraint(1.5 * x(0, -1.0));
        const auto f = gp_feasible(gp);
        CHECK(f.feasible);
        CHECK(f.witness(0) >= 1.5 - 1e-9);
        CHECK(f.witness(0) <= 2.0 + 1e-9);
        const auto s = solve_gp(gp);
        CHECK(s.status == GpStatus::Optimal);
        CHECK(rel(s.values(0), 2.0) < 1e-6);
    }
}

TEST_CASE("barrier objective never increases across centering steps") {
    std::mt19937_64 rng(314);
    for (int t = 0; t < 50; ++t) {
        const auto r = oracle::random_gp(rng);
        const auto s = solve_gp(r.gp);
        REQUIRE(s.status == GpStatus::Optimal);
        REQUIRE_FALSE(s.history.empty());
        for (std::size_t i = 1; i < s.history.size(); ++i)
            CHECK(s.history[i] <= s.history[i - 1] * (1.0 + 1e-12));
    }
}

TEST_CASE("log-space convexity of generated posynomials") {
    std::mt19937_64 rng(55);
    std::uniform_real_distribution<double> u(-3.0, 3.0), w(0.0, 1.0);
    for (int t = 0; t < 500; ++t) {
        const int n = 1 + t % 3;
        const Posynomial p = oracle::random_posynomial(n, 1 + t % 4, rng);
        Eigen::VectorXd a(n), b(n);
        for (int v = 0; v < n; ++v) {
            a(v) = u(rng);
            b(v) = u(rng);
        }
        const double lam = w(rng);
        const Eigen::VectorXd mid = lam * a + (1.0 - lam) * b;
        CHECK(p.log_eval(mid) <= lam * p.log_eval(a) + (1.0 - lam) * p.log_eval(b) + 1e-12);
    }
}

TEST_CASE("random programs agree with exhaustive grid search") {
    std::mt19937_64 rng(2718);
    int compared = 0;
    for (int t = 0; t < 100; ++t) {
        const auto r = oracle::random_gp(rng);
        const auto s = solve_gp(r.gp);
        const double grid = oracle::grid_search(r);
        CAPTURE(t);
        CAPTURE(r.n);
        REQUIRE(std::isfinite(grid));
        REQUIRE(s.status == GpStatus::Optimal);
        CHECK(r.gp.max_violation(s.values) <= 1.0 + 1e-6);
        CHECK(rel(s.objective_value, grid) <= 1e-2);
        // the grid only visits feasible points, so it cannot beat the optimum
        CHECK(s.objective_value <= grid * (1.0 + 1e-6));
        ++compared;
    }
    CHECK(compared == 100);
}
