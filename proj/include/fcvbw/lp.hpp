#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "fcvbw/errors.hpp"

namespace fcvbw {

// One inequality  a . v - gamma * delta <= beta  of the minimax LP
//   minimize delta over free (v, delta).
// Facet rows carry gamma = 1, auxiliary box rows gamma = 0.
struct LpRow {
    std::vector<double> a;
    double gamma = 1.0;
    double beta = 0.0;
};

struct LpSolution {
    std::vector<double> v;
    double delta = 0.0;
    std::vector<double> lambda;    // dual weight per row
    std::vector<int> tight_rows;   // rows in the optimal basis
    int iterations = 0;
};

// Deterministic solver for the minimax LP above. Works on the dual
//   min beta . y   s.t.  sum_i y_i a_i = 0,  sum_i y_i gamma_i = 1,  y >= 0,
// whose basis is a dense (num_vars+1)^2 block, with a two-phase revised
// simplex. Pricing is Dantzig's rule with a Bland fallback whenever the
// objective stalls, so the solver cannot cycle; all ties break toward the
// lowest index, which makes repeated solves bit-identical. The primal
// (v, delta) is read off the simplex multipliers of the optimal basis, so
// the termination test itself guarantees primal feasibility within the
// pricing tolerance.
class ChebyshevLpSolver {
  public:
    explicit ChebyshevLpSolver(int num_vars) : nv_(num_vars), m_(num_vars + 1) {}

    LpSolution solve(const std::vector<LpRow>& rows) const {
        const int cols = static_cast<int>(rows.size());
        if (cols == 0) throw LpError("lp: empty constraint set");
        for (const auto& r : rows) {
            if (static_cast<int>(r.a.size()) != nv_) throw LpError("lp: row arity mismatch");
        }

        std::vector<int> basis(m_);
        std::vector<double> binv(static_cast<std::size_t>(m_) * m_, 0.0);
        std::vector<double> xb(static_cast<std::size_t>(m_), 0.0);
        for (int i = 0; i < m_; ++i) {
            basis[i] = cols + i;  // artificial columns
            binv[static_cast<std::size_t>(i) * m_ + i] = 1.0;
        }
        xb[m_ - 1] = 1.0;  // rhs of the dual equalities is (0, ..., 0, 1)

        int iterations = 0;
        run_phase(rows, basis, binv, xb, /*phase1=*/true, iterations);
        {
            double infeas = 0.0;
            for (int i = 0; i < m_; ++i)
                if (basis[i] >= cols) infeas += xb[i];
            if (infeas > 1e-9)
                throw LpError("lp: dual infeasible (primal unbounded); constraint set too thin");
        }
        run_phase(rows, basis, binv, xb, /*phase1=*/false, iterations);

        LpSolution sol;
        sol.iterations = iterations;
        sol.lambda.assign(static_cast<std::size_t>(cols), 0.0);
        for (int i = 0; i < m_; ++i) {
            if (basis[i] < cols) {
                sol.lambda[basis[i]] = xb[i];
                sol.tight_rows.push_back(basis[i]);
            }
        }
        std::sort(sol.tight_rows.begin(), sol.tight_rows.end());

        // Simplex multipliers of the dual are the primal variables: the
        // termination condition beta_j - y . D_j >= -tol is exactly primal
        // feasibility of (v, delta) = (y_0.., -y_last).
        std::vector<double> y(static_cast<std::size_t>(m_));
        multipliers(rows, basis, binv, /*phase1=*/false, y);
        sol.v.assign(y.begin(), y.begin() + nv_);
        sol.delta = -y[m_ - 1];

        double scale = 1.0 + std::abs(sol.delta);
        for (const auto& row : rows) scale = std::max(scale, std::abs(row.beta));
        for (const auto& row : rows) {
            double lhs = -row.gamma * sol.delta;
            for (int j = 0; j < nv_; ++j) lhs += row.a[j] * sol.v[j];
            if (lhs > row.beta + 1e-7 * scale)
                throw LpError("lp: recovered primal violates a constraint");
        }
        return sol;
    }

  private:
    void multipliers(const std::vector<LpRow>& rows, const std::vector<int>& basis,
                     const std::vector<double>& binv, bool phase1, std::vector<double>& y) const {
        for (int j = 0; j < m_; ++j) {
            double acc = 0.0;
            for (int i = 0; i < m_; ++i)
                acc += cost(rows, basis[i], phase1) * binv[static_cast<std::size_t>(i) * m_ + j];
            y[j] = acc;
        }
    }

    void run_phase(const std::vector<LpRow>& rows, std::vector<int>& basis,
                   std::vector<double>& binv, std::vector<double>& xb, bool phase1,
                   int& iterations) const {
        const int cols = static_cast<int>(rows.size());
        const long cap = 50000 + 256L * (cols + m_);
        std::vector<double> y(static_cast<std::size_t>(m_));
        std::vector<double> u(static_cast<std::size_t>(m_));
        std::vector<double> column(static_cast<std::size_t>(m_));

        auto objective = [&] {
            double acc = 0.0;
            for (int i = 0; i < m_; ++i) acc += cost(rows, basis[i], phase1) * xb[i];
            return acc;
        };
        double last_objective = objective();
        int stall = 0;

        for (long iter = 0;; ++iter) {
            if (iter > cap) throw LpError("lp: iteration cap exceeded");
            ++iterations;
            multipliers(rows, basis, binv, phase1, y);

            const bool bland = stall > 64;  // anti-cycling fallback
            int entering = -1;
            double most_negative = -1e-10;
            for (int j = 0; j < cols; ++j) {
                double rc = cost(rows, j, phase1);
                const auto& row = rows[j];
                for (int i = 0; i < nv_; ++i) rc -= y[i] * row.a[i];
                rc -= y[m_ - 1] * row.gamma;
                if (rc < most_negative) {
                    entering = j;
                    if (bland) break;  // lowest index with negative reduced cost
                    most_negative = rc;
                }
            }
            if (entering < 0) return;

            fill_column(rows[entering], column);
            for (int i = 0; i < m_; ++i) {
                double acc = 0.0;
                for (int j = 0; j < m_; ++j)
                    acc += binv[static_cast<std::size_t>(i) * m_ + j] * column[j];
                u[i] = acc;
            }
            int leaving = -1;
            double best_ratio = std::numeric_limits<double>::infinity();
            for (int i = 0; i < m_; ++i) {
                if (u[i] > 1e-11) {
                    const double ratio = xb[i] / u[i];
                    if (ratio < best_ratio ||
                        (ratio == best_ratio && (leaving < 0 || basis[i] < basis[leaving]))) {
                        best_ratio = ratio;
                        leaving = i;
                    }
                }
            }
            if (leaving < 0) throw LpError("lp: dual unbounded (primal infeasible)");

            const double pivot = u[leaving];
            for (int j = 0; j < m_; ++j) binv[static_cast<std::size_t>(leaving) * m_ + j] /= pivot;
            xb[leaving] /= pivot;
            for (int i = 0; i < m_; ++i) {
                if (i == leaving || u[i] == 0.0) continue;
                const double f = u[i];
                for (int j = 0; j < m_; ++j)
                    binv[static_cast<std::size_t>(i) * m_ + j] -=
                        f * binv[static_cast<std::size_t>(leaving) * m_ + j];
                xb[i] -= f * xb[leaving];
                if (xb[i] < 0.0 && xb[i] > -1e-12) xb[i] = 0.0;
            }
            basis[leaving] = entering;

            const double now = objective();
            if (now < last_objective - 1e-15 * (1.0 + std::abs(last_objective))) {
                stall = 0;
                last_objective = now;
            } else {
                ++stall;
            }
        }
    }

    double cost(const std::vector<LpRow>& rows, int col, bool phase1) const {
        const int cols = static_cast<int>(rows.size());
        if (phase1) return col >= cols ? 1.0 : 0.0;
        return col >= cols ? 0.0 : rows[col].beta;
    }

    void fill_column(const LpRow& row, std::vector<double>& column) const {
        for (int i = 0; i < nv_; ++i) column[i] = row.a[i];
        column[m_ - 1] = row.gamma;
    }

    int nv_;
    int m_;
};

}  // namespace fcvbw
