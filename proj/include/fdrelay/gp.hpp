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

#ifndef FDRELAY_GP_HPP
#define FDRELAY_GP_HPP

#include <Eigen/Dense>

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace fdrelay {

/// c * prod_i x_i^{a_i} with c > 0. The coefficient is held as its
/// logarithm so products of badly scaled constants stay representable.
class Monomial {
public:
    Monomial() = default;
    explicit Monomial(double coefficient);

    static Monomial variable(int id, double power = 1.0);
    static Monomial from_log(double log_coefficient);

    double coefficient() const { return std::exp(log_coeff_); }
    double log_coefficient() const { return log_coeff_; }
    const std::map<int, double>& exponents() const { return exponents_; }
    double exponent(int id) const;

    Monomial operator*(const Monomial& o) const;
    Monomial& operator*=(const Monomial& o);
    Monomial pow(double p) const;
    Monomial inverse() const { return pow(-1.0); }

    double eval(const Eigen::Ref<const Eigen::VectorXd>& x) const;

private:
    double log_coeff_ = 0.0;
    std::map<int, double> exponents_;
};

Monomial operator*(double c, const Monomial& m);

/// Sum of monomials.
class Posynomial {
public:
    Posynomial() = default;
    Posynomial(Monomial m);  // NOLINT(google-explicit-constructor)

    const std::vector<Monomial>& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }

    Posynomial& operator+=(const Posynomial& o);
    Posynomial& operator*=(const Monomial& m);

    double eval(const Eigen::Ref<const Eigen::VectorXd>& x) const;
    /// log(p(exp(y))), evaluated stably.
    double log_eval(const Eigen::Ref<const Eigen::VectorXd>& y) const;

private:
    std::vector<Monomial> terms_;
};

Posynomial operator+(Posynomial a, const Posynomial& b);
Posynomial operator*(Posynomial p, const Monomial& m);
Posynomial operator*(const Monomial& m, Posynomial p);

/// minimize objective(x) s.t. constraint_i(x) <= 1, lower <= x <= upper.
/// Bounds must be finite, positive and leave an interior.
class GeometricProgram {
public:
    int add_variable(double lower, double upper, std::string name = {});
    void minimize(Posynomial objective) { objective_ = std::move(objective); }
    /// Maximise a monomial by minimising its reciprocal.
    void maximize(const Monomial& m) { objective_ = Posynomial(m.inverse()); }
    void add_constraint(Posynomial p);

    int variables() const { return static_cast<int>(lower_.size()); }
    const Posynomial& objective() const { return objective_; }
    const std::vector<Posynomial>& constraints() const { return constraints_; }
    double lower(int id) const { return lower_.at(static_cast<std::size_t>(id)); }
    double upper(int id) const { return upper_.at(static_cast<std::size_t>(id)); }
    const std::string& name(int id) const { return names_.at(static_cast<std::size_t>(id)); }

    /// Throws std::invalid_argument if a variable id is out of range, the
    /// objective or a constraint is empty, or a bound is not finite and
    /// positive.
    void validate() const;

    /// Largest constraint value, bounds included, as a multiplicative
    /// violation: max(constraint_i(x), x/upper, lower/x).
    double max_violation(const Eigen::Ref<const Eigen::VectorXd>& x) const;

private:
    Posynomial objective_;
    std::vector<Posynomial> constraints_;
    std::vector<double> lower_, upper_;
    std::vector<std::string> names_;
};

enum class GpStatus { Optimal, Infeasible, IterLimit };

inline const char* to_string(GpStatus s) {
    switch (s) {
        case GpStatus::Optimal: return "optimal";
        case GpStatus::Infeasible: return "infeasible";
        case GpStatus::IterLimit: return "iteration-limit";
    }
    return "?";
}

struct GpSolution {
    Eigen::VectorXd values;  // indexed by variable id
    double objective_value = 0.0;
    GpStatus status = GpStatus::IterLimit;
    /// Objective value after each centering step of the barrier method.
    std::vector<double> history;
    int newton_steps = 0;
};

/// Barrier method on the log-sum-exp form with Newton centering and
/// backtracking, started from a phase-I point. `tol` bounds the relative
/// objective gap; `max_iters` caps the barrier (centering) steps.
GpSolution solve_gp(const GeometricProgram& gp, double tol = 1e-6, int max_iters = 200);

struct GpFeasibility {
    bool feasible = false;
    /// min over x in the box of max_i constraint_i(x); feasible iff <= 1.
    double min_slack = 0.0;
    Eigen::VectorXd witness;
};

GpFeasibility gp_feasible(const GeometricProgram& gp);

}  // namespace fdrelay

#endif  // FDRELAY_GP_HPP
