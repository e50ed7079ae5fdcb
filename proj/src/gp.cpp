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

#include <algorithm>
#include <cmath>
#include <limits>

namespace fdrelay {

// ---------------------------------------------------------------- algebra

Monomial::Monomial(double coefficient) {
    if (!(coefficient > 0.0) || !std::isfinite(coefficient))
        throw std::invalid_argument("monomial coefficient must be positive and finite");
    log_coeff_ = std::log(coefficient);
}

Monomial Monomial::variable(int id, double power) {
    if (id < 0) throw std::invalid_argument("variable id must be nonnegative");
    Monomial m;
    if (power != 0.0) m.exponents_[id] = power;
    return m;
}

Monomial Monomial::from_log(double log_coefficient) {
    if (!std::isfinite(log_coefficient)) throw std::invalid_argument("log coefficient must be finite");
    Monomial m;
    m.log_coeff_ = log_coefficient;
    return m;
}

double Monomial::exponent(int id) const {
    const auto it = exponents_.find(id);
    return it == exponents_.end() ? 0.0 : it->second;
}

Monomial& Monomial::operator*=(const Monomial& o) {
    log_coeff_ += o.log_coeff_;
    for (const auto& [id, a] : o.exponents_) {
        const double e = (exponents_[id] += a);
        if (e == 0.0) exponents_.erase(id);
    }
    return *this;
}

Monomial Monomial::operator*(const Monomial& o) const {
    Monomial r = *this;
    r *= o;
    return r;
}

Monomial Monomial::pow(double p) const {
    Monomial r;
    r.log_coeff_ = log_coeff_ * p;
    if (p != 0.0)
        for (const auto& [id, a] : exponents_) r.exponents_[id] = a * p;
    return r;
}

double Monomial::eval(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    double lv = log_coeff_;
    for (const auto& [id, a] : exponents_) {
        if (id >= x.size()) throw std::out_of_range("monomial refers to an unknown variable");
        lv += a * std::log(x(id));
    }
    return std::exp(lv);
}

Monomial operator*(double c, const Monomial& m) { return Monomial(c) * m; }

Posynomial::Posynomial(Monomial m) { terms_.push_back(std::move(m)); }

Posynomial& Posynomial::operator+=(const Posynomial& o) {
    terms_.insert(terms_.end(), o.terms_.begin(), o.terms_.end());
    return *this;
}

Posynomial& Posynomial::operator*=(const Monomial& m) {
    for (auto& t : terms_) t *= m;
    return *this;
}

double Posynomial::eval(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    double s = 0.0;
    for (const auto& t : terms_) s += t.eval(x);
    return s;
}

double Posynomial::log_eval(const Eigen::Ref<const Eigen::VectorXd>& y) const {
    if (terms_.empty()) return -std::numeric_limits<double>::infinity();
    std::vector<double> v;
    v.reserve(terms_.size());
    for (const auto& t : terms_) {
        double lv = t.log_coefficient();
        for (const auto& [id, a] : t.exponents()) lv += a * y(id);
        v.push_back(lv);
    }
    const double mx = *std::max_element(v.begin(), v.end());
    double s = 0.0;
    for (double lv : v) s += std::exp(lv - mx);
    return mx + std::log(s);
}

Posynomial operator+(Posynomial a, const Posynomial& b) { return a += b; }
Posynomial operator*(Posynomial p, const Monomial& m) { return p *= m; }
Posynomial operator*(const Monomial& m, Posynomial p) { return p *= m; }

int GeometricProgram::add_variable(double lower, double upper, std::string name) {
    if (!(lower > 0.0) || !std::isfinite(upper) || !(upper > lower))
        throw std::invalid_argument("variable bounds must satisfy 0 < lower < upper < inf");
    lower_.push_back(lower);
    upper_.push_back(upper);
    if (name.empty()) name = "x" + std::to_string(lower_.size() - 1);
    names_.push_back(std::move(name));
    return static_cast<int>(lower_.size()) - 1;
}

void GeometricProgram::add_constraint(Posynomial p) {
    if (p.empty()) throw std::invalid_argument("constraint posynomial has no terms");
    constraints_.push_back(std::move(p));
}

void GeometricProgram::validate() const {
    if (objective_.empty()) throw std::invalid_argument("geometric program has no objective");
    auto check = [&](const Posynomial& p) {
        for (const auto& t : p.terms())
            for (const auto& [id, a] : t.exponents())
                if (id < 0 || id >= variables() || !std::isfinite(a))
                    throw std::invalid_argument("posynomial refers to an unknown variable");
    };
    check(objective_);
    for (const auto& c : constraints_) check(c);
}

double GeometricProgram::max_violation(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    double v = 0.0;
    for (const auto& c : constraints_) v = std::max(v, c.eval(x));
    for (int i = 0; i < variables(); ++i)
        v = std::max({v, x(i) / upper(i), lower(i) / x(i)});
    return v;
}

// ---------------------------------------------------------------- solver

namespace {

/// f(z) = log sum_j exp(A_j z + b_j) + lin . z; with no exponential terms
/// f is the linear part alone.
struct LseFn {
    Eigen::MatrixXd A;
    Eigen::VectorXd b;
    Eigen::VectorXd lin;

    double value(const Eigen::VectorXd& z) const {
        double v = lin.size() ? lin.dot(z) : 0.0;
        if (A.rows() == 0) return v;
        const Eigen::VectorXd e = A * z + b;
        const double mx = e.maxCoeff();
        return v + mx + std::log((e.array() - mx).exp().sum());
    }

    // Adds w * grad and w * hess; returns the value.
    double accumulate(const Eigen::VectorXd& z, Eigen::VectorXd& g, Eigen::MatrixXd* H, double w_grad,
                      double w_hess, const Eigen::VectorXd** grad_out, Eigen::VectorXd& scratch) const {
        scratch = lin.size() ? lin : Eigen::VectorXd::Zero(z.size());
        double v = lin.size() ? lin.dot(z) : 0.0;
        Eigen::VectorXd p;
        if (A.rows() > 0) {
            const Eigen::VectorXd e = A * z + b;
            const double mx = e.maxCoeff();
            p = (e.array() - mx).exp();
            const double s = p.sum();
            p /= s;
            v += mx + std::log(s);
            scratch.noalias() += A.transpose() * p;
        }
        g.noalias() += w_grad * scratch;
        if (H && A.rows() > 0 && w_hess != 0.0) {
            const Eigen::VectorXd Ap = A.transpose() * p;
            H->noalias() += w_hess * (A.transpose() * p.asDiagonal() * A);
            H->noalias() -= w_hess * (Ap * Ap.transpose());
        }
        if (grad_out) *grad_out = &scratch;
        return v;
    }
};

LseFn compile(const Posynomial& p, int n, int total) {
    LseFn f;
    f.A = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(p.terms().size()), total);
    f.b.resize(f.A.rows());
    for (std::size_t r = 0; r < p.terms().size(); ++r) {
        const auto& t = p.terms()[r];
        f.b(static_cast<Eigen::Index>(r)) = t.log_coefficient();
        for (const auto& [id, a] : t.exponents()) {
            if (id >= n) throw std::invalid_argument("posynomial refers to an unknown variable");
            f.A(static_cast<Eigen::Index>(r), id) = a;
        }
    }
    return f;
}

LseFn linear(int total, int index, double coef, double offset) {
    LseFn f;
    f.lin = Eigen::VectorXd::Zero(total);
    f.lin(index) = coef;
    f.A.resize(1, total);
    f.A.setZero();
    f.b = Eigen::VectorXd::Constant(1, offset);
    return f;
}

struct BarrierProblem {
    LseFn objective;
    std::vector<LseFn> cons;
};

struct BarrierState {
    Eigen::VectorXd z;
    double t = 1.0;
    int newton = 0;
    bool failed = false;
};

bool strictly_feasible(const BarrierProblem& bp, const Eigen::VectorXd& z) {
    for (const auto& c : bp.cons) {
        const double v = c.value(z);
        if (!(v < 0.0)) return false;
    }
    return true;
}

double barrier_value(const BarrierProblem& bp, const Eigen::VectorXd& z, double t) {
    double phi = t * bp.objective.value(z);
    for (const auto& c : bp.cons) {
        const double v = c.value(z);
        if (!(v < 0.0)) return std::numeric_limits<double>::infinity();
        phi -= std::log(-v);
    }
    return std::isfinite(phi) ? phi : std::numeric_limits<double>::infinity();
}

// Newton centering of t f0 - sum log(-f_i) from a strictly feasible z.
void center(const BarrierProblem& bp, BarrierState& st, int max_newton = 100) {
    const Eigen::Index n = st.z.size();
    Eigen::VectorXd scratch;
    for (int it = 0; it < max_newton; ++it) {
        Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
        Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n, n);
        bp.objective.accumulate(st.z, g, &H, st.t, st.t, nullptr, scratch);
        for (const auto& c : bp.cons) {
            const double v = c.value(st.z);
            const Eigen::VectorXd* gi = nullptr;
            c.accumulate(st.z, g, &H, -1.0 / v, -1.0 / v, &gi, scratch);
            H.noalias() += (*gi) * gi->transpose() / (v * v);
        }
        Eigen::VectorXd dz;
        Eigen::LDLT<Eigen::MatrixXd> ldlt(H);
        bool ok = ldlt.info() == Eigen::Success && ldlt.isPositive();
        if (ok) {
            dz = -ldlt.solve(g);
            ok = dz.allFinite() && g.dot(dz) < 0.0;
        }
        double reg = 1e-12 * (1.0 + H.diagonal().cwiseAbs().maxCoeff());
        while (!ok && reg < 1e12) {
            Eigen::MatrixXd Hr = H;
            Hr.diagonal().array() += reg;
            Eigen::LDLT<Eigen::MatrixXd> l2(Hr);
            dz = -l2.solve(g);
            ok = l2.info() == Eigen::Success && dz.allFinite() && g.dot(dz) < 0.0;
            reg *= 100.0;
        }
        if (!ok) {
            if (g.norm() < 1e-12) return;
            st.failed = true;
            return;
        }
        const double lambda2 = -g.dot(dz);
        ++st.newton;
        if (lambda2 / 2.0 <= 1e-10) return;

        const double phi0 = barrier_value(bp, st.z, st.t);
        double step = 1.0;
        bool accepted = false;
        for (int ls = 0; ls < 80; ++ls) {
            const Eigen::VectorXd trial = st.z + step * dz;
            const double phi = barrier_value(bp, trial, st.t);
            if (phi <= phi0 - 0.25 * step * lambda2) {
                st.z = trial;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        // no progress possible at machine precision: the point is centred
        if (!accepted) return;
    }
}

constexpr double kGrowth = 20.0;

}  // namespace

namespace {

struct PhaseOne {
    bool feasible = false;
    bool strict = false;
    double slack = 0.0;  // log of the multiplicative min-slack
    Eigen::VectorXd y;
};

// minimize s subject to h_i(y) <= s for all constraints and bounds.
PhaseOne phase_one(const GeometricProgram& gp, const Eigen::VectorXd& y0, double tol, int max_outer, bool early) {
    const int n = gp.variables();
    const int total = n + 1;
    BarrierProblem bp;
    bp.objective.lin = Eigen::VectorXd::Zero(total);
    bp.objective.lin(n) = 1.0;
    auto add = [&](LseFn f) {
        if (f.lin.size() == 0) f.lin = Eigen::VectorXd::Zero(total);
        f.lin(n) -= 1.0;
        bp.cons.push_back(std::move(f));
    };
    for (const auto& c : gp.constraints()) add(compile(c, n, total));
    for (int i = 0; i < n; ++i) {
        add(linear(total, i, 1.0, -std::log(gp.upper(i))));
        add(linear(total, i, -1.0, std::log(gp.lower(i))));
    }
    Eigen::VectorXd z(total);
    z.head(n) = y0;
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& c : bp.cons) {
        Eigen::VectorXd zz = z;
        zz(n) = 0.0;
        worst = std::max(worst, c.value(zz));
    }
    z(n) = worst + 1.0;

    BarrierState st{z, 1.0, 0, false};
    const double m = static_cast<double>(bp.cons.size());
    PhaseOne r;
    for (int outer = 0; outer < max_outer; ++outer) {
        center(bp, st);
        const double s = st.z(n);
        if (early && s < 0.0) {
            r.feasible = r.strict = true;
            break;
        }
        if (early && s - m / st.t > 0.0) break;  // certified infeasible
        if (m / st.t < tol || st.failed) {
            r.feasible = s <= 0.0;
            r.strict = s < 0.0;
            break;
        }
        st.t *= kGrowth;
    }
    r.slack = st.z(n);
    r.y = st.z.head(n);
    return r;
}

Eigen::VectorXd log_midpoint(const GeometricProgram& gp) {
    Eigen::VectorXd y(gp.variables());
    for (int i = 0; i < gp.variables(); ++i) y(i) = 0.5 * (std::log(gp.lower(i)) + std::log(gp.upper(i)));
    return y;
}

}  // namespace

GpFeasibility gp_feasible(const GeometricProgram& gp) {
    gp.validate();
    const PhaseOne p1 = phase_one(gp, log_midpoint(gp), 1e-9, 200, false);
    GpFeasibility f;
    f.feasible = p1.slack <= 0.0;
    f.min_slack = std::exp(p1.slack);
    f.witness = p1.y.array().exp();
    return f;
}

GpSolution solve_gp(const GeometricProgram& gp, double tol, int max_iters) {
    gp.validate();
    if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
    const int n = gp.variables();
    GpSolution sol;

    Eigen::VectorXd y = log_midpoint(gp);
    BarrierProblem bp;
    bp.objective = compile(gp.objective(), n, n);
    for (const auto& c : gp.constraints()) bp.cons.push_back(compile(c, n, n));
    for (int i = 0; i < n; ++i) {
        bp.cons.push_back(linear(n, i, 1.0, -std::log(gp.upper(i))));
        bp.cons.push_back(linear(n, i, -1.0, std::log(gp.lower(i))));
    }
    if (!strictly_feasible(bp, y)) {
        const PhaseOne p1 = phase_one(gp, y, tol, max_iters, true);
        if (!p1.feasible) {
            sol.status = GpStatus::Infeasible;
            sol.values = p1.y.array().exp();
            sol.objective_value = gp.objective().eval(sol.values);
            return sol;
        }
        y = p1.y;
        if (!p1.strict) {
            // the feasible set has no interior at this precision
            sol.status = GpStatus::Optimal;
            sol.values = y.array().exp();
            sol.objective_value = gp.objective().eval(sol.values);
            return sol;
        }
    }

    const double m = static_cast<double>(bp.cons.size());
    BarrierState st{y, 1.0, 0, false};
    sol.status = GpStatus::IterLimit;
    for (int outer = 0; outer < max_iters; ++outer) {
        center(bp, st);
        sol.history.push_back(gp.objective().eval(st.z.array().exp().matrix()));
        if (m / st.t < tol) {
            sol.status = GpStatus::Optimal;
            break;
        }
        st.t *= kGrowth;
    }
    sol.newton_steps = st.newton;
    sol.values = st.z.array().exp();
    sol.objective_value = gp.objective().eval(sol.values);
    return sol;
}

}  // namespace fdrelay
