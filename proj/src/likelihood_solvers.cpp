#include "itn/likelihood_solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <string>

#include <Eigen/Cholesky>

#include "itn/errors.hpp"

namespace itn {

namespace {

using Index = Eigen::Index;

// Largest log-multiplier allowed for y during fixed-point sweeps.
const double kMaxLogY = std::log1p(-1e-9);
// y is kept below 1 per node; an unconverged run pressed against that cap
// means the likelihood maximum lies outside the admissible region.
const double kYCapFlag = std::log1p(-1e-6);
constexpr const char* kYCapReason = "y_upper_bound: the likelihood maximum needs y >= 1";

double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }
double logistic(double x) { return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x)); }

// A convex negative log-likelihood over the free log-multipliers. The
// gradient of every objective is (expected - observed) per constraint.
class ConvexProblem {
public:
    virtual ~ConvexProblem() = default;
    virtual Index dim() const = 0;
    virtual bool in_domain(const Vector& theta) const = 0;
    virtual double objective(const Vector& theta) const = 0;
    virtual void derivatives(const Vector& theta, Vector& grad, Matrix& hess) const = 0;
    /// Max relative residual over all constraints.
    virtual double residual(const Vector& theta) const = 0;
    /// One damped Gauss-Seidel fixed-point sweep, in place.
    virtual void sweep(Vector& theta, double damping) const = 0;
};

struct RunStats {
    std::size_t sweeps = 0;
    std::size_t newton = 0;
    double residual = std::numeric_limits<double>::infinity();
    bool converged = false;
};

RunStats minimise(const ConvexProblem& problem, Vector& theta, const SolverConfig& cfg, std::size_t iteration_budget,
                  std::vector<double>* trace) {
    RunStats st;
    st.residual = problem.dim() == 0 ? 0.0 : problem.residual(theta);
    std::size_t used = 0;
    auto record = [&] {
        if (trace) trace->push_back(st.residual);
    };
    record();

    while (used < iteration_budget && st.residual > cfg.tolerance && st.sweeps < cfg.fixed_point_sweeps) {
        Vector candidate = theta;
        problem.sweep(candidate, cfg.damping);
        ++used;
        ++st.sweeps;
        if (!candidate.allFinite() || !problem.in_domain(candidate)) break;
        const double r = problem.residual(candidate);
        if (!(r < st.residual)) break;
        const bool slow = r > cfg.slow_ratio * st.residual;
        theta = std::move(candidate);
        st.residual = r;
        record();
        if (slow) break;
    }

    Vector grad;
    Matrix hess;
    while (used < iteration_budget && st.residual > cfg.tolerance) {
        problem.derivatives(theta, grad, hess);
        const double ridge = 1e-12 * std::max(1.0, hess.diagonal().cwiseAbs().maxCoeff());
        hess.diagonal().array() += ridge;
        Eigen::LDLT<Matrix> ldlt(hess);
        Vector step = ldlt.solve(-grad);
        if (ldlt.info() != Eigen::Success || !step.allFinite() || step.dot(grad) >= 0.0) step = -grad;
        const double longest = step.cwiseAbs().maxCoeff();
        if (longest > 8.0) step *= 8.0 / longest;

        const double f0 = problem.objective(theta);
        const double slope = grad.dot(step);
        double alpha = 1.0;
        bool accepted = false;
        for (int attempt = 0; attempt < 60; ++attempt, alpha *= 0.5) {
            Vector candidate = theta + alpha * step;
            if (!problem.in_domain(candidate)) continue;
            const double f = problem.objective(candidate);
            const double r = problem.residual(candidate);
            if (!std::isfinite(f) || !std::isfinite(r)) continue;
            // Near the optimum the objective is flat to rounding; the residual
            // still decides.
            if (f <= f0 + 1e-4 * alpha * slope || r < st.residual) {
                theta = std::move(candidate);
                st.residual = r;
                accepted = true;
                break;
            }
        }
        ++used;
        ++st.newton;
        if (!accepted) break;
        record();
    }
    st.converged = st.residual <= cfg.tolerance;
    return st;
}

void check_feasible_sequences(const NetworkSummary& s, bool need_strength_consistency) {
    std::vector<std::size_t> bad;
    for (std::size_t i = 0; i < s.n; ++i) {
        const auto k = s.degree[i];
        const auto w = s.strength[i];
        if (k < 0 || w < 0) bad.push_back(i);
        else if (need_strength_consistency && (k > w || (k == 0) != (w == 0))) bad.push_back(i);
    }
    if (!bad.empty()) {
        std::string list;
        for (auto i : bad) list += (list.empty() ? "" : ",") + std::to_string(i);
        throw InfeasibleError("strength below degree, or zero degree with positive strength, at nodes " + list,
                              std::move(bad));
    }
}

// Isolated nodes are pinned at zero, so a node linked to every other
// non-isolated node needs p = 1 against all of them: the multipliers run off
// to infinity. A degree above that count would need a link to an isolated node.
std::vector<std::size_t> full_degree_nodes(const NetworkSummary& s) {
    std::vector<std::size_t> full, over, isolated;
    if (s.n < 2) return full;
    std::int64_t active = 0;
    for (std::size_t i = 0; i < s.n; ++i) {
        if (s.degree[i] > 0) ++active;
        else isolated.push_back(i);
    }
    for (std::size_t i = 0; i < s.n; ++i) {
        if (s.degree[i] == 0) continue;
        if (s.degree[i] > active - 1) over.push_back(i);
        else if (s.degree[i] == active - 1) full.push_back(i);
    }
    if (!over.empty()) {
        auto nodes = over;
        nodes.insert(nodes.end(), isolated.begin(), isolated.end());
        throw InfeasibleError("node " + std::to_string(over.front()) + " has degree " +
                                  std::to_string(s.degree[over.front()]) + " but only " +
                                  std::to_string(active - 1) + " non-isolated partners are available",
                              std::move(nodes));
    }
    return full;
}

double seed_scale(const NetworkSummary& s) { return std::sqrt(2.0 * static_cast<double>(s.link_count) + 1.0); }

double seeded_y(const NetworkSummary& s, std::size_t i) {
    const auto max_s = static_cast<double>(*std::max_element(s.strength.begin(), s.strength.end()));
    const auto si = static_cast<double>(s.strength[i]);
    return si / (si + max_s + 1.0);
}

// ---------------------------------------------------------------- BCM

class BcmProblem final : public ConvexProblem {
public:
    BcmProblem(std::vector<std::size_t> free, Vector k) : free_(std::move(free)), k_(std::move(k)) {}

    Index dim() const override { return static_cast<Index>(free_.size()); }
    bool in_domain(const Vector& theta) const override { return theta.allFinite(); }

    double objective(const Vector& th) const override {
        double f = 0.0;
        for (Index a = 0; a < dim(); ++a) {
            f -= k_[a] * th[a];
            for (Index b = a + 1; b < dim(); ++b) f += softplus(th[a] + th[b]);
        }
        return f;
    }

    void derivatives(const Vector& th, Vector& g, Matrix& h) const override {
        g = -k_;
        h = Matrix::Zero(dim(), dim());
        for (Index a = 0; a < dim(); ++a)
            for (Index b = a + 1; b < dim(); ++b) {
                const double p = logistic(th[a] + th[b]);
                const double v = p * (1.0 - p);
                g[a] += p;
                g[b] += p;
                h(a, b) += v;
                h(b, a) += v;
                h(a, a) += v;
                h(b, b) += v;
            }
    }

    Vector expected(const Vector& th) const {
        Vector e = Vector::Zero(dim());
        for (Index a = 0; a < dim(); ++a)
            for (Index b = a + 1; b < dim(); ++b) {
                const double p = logistic(th[a] + th[b]);
                e[a] += p;
                e[b] += p;
            }
        return e;
    }

    double residual(const Vector& th) const override { return max_relative_residual(expected(th), k_); }

    void sweep(Vector& th, double damping) const override {
        for (Index a = 0; a < dim(); ++a) {
            // z_a <- k_a / sum_b z_b / (1 + z_a z_b)
            double denom = 0.0;
            for (Index b = 0; b < dim(); ++b)
                if (b != a) denom += std::exp(th[b]) / (1.0 + std::exp(th[a] + th[b]));
            th[a] = (1.0 - damping) * th[a] + damping * (std::log(k_[a]) - std::log(denom));
        }
    }

    const std::vector<std::size_t>& free_nodes() const { return free_; }

private:
    std::vector<std::size_t> free_;
    Vector k_;
};

// ------------------------------------------------ geometric (WCM / TS step 2)

// Solves sum_j pi_ij q_ij / (1 - q_ij) = excess_i with q_ij = y_i y_j. The WCM
// uses pi = 1, the two-step model pi = p^ts. `scale` normalises residuals.
class GeometricProblem final : public ConvexProblem {
public:
    GeometricProblem(std::vector<std::size_t> free, Matrix pi, Vector excess, Vector scale)
        : free_(std::move(free)), pi_(std::move(pi)), e_(std::move(excess)), scale_(std::move(scale)) {}

    Index dim() const override { return static_cast<Index>(free_.size()); }
    bool in_domain(const Vector& th) const override { return th.allFinite() && (th.array() <= kMaxLogY).all(); }

    double objective(const Vector& th) const override {
        double f = 0.0;
        for (Index a = 0; a < dim(); ++a) {
            f -= e_[a] * th[a];
            for (Index b = a + 1; b < dim(); ++b)
                if (pi_(a, b) > 0.0) f -= pi_(a, b) * std::log(-std::expm1(th[a] + th[b]));
        }
        return f;
    }

    void derivatives(const Vector& th, Vector& g, Matrix& h) const override {
        g = -e_;
        h = Matrix::Zero(dim(), dim());
        for (Index a = 0; a < dim(); ++a)
            for (Index b = a + 1; b < dim(); ++b) {
                if (pi_(a, b) <= 0.0) continue;
                const double d = -std::expm1(th[a] + th[b]);  // 1 - q
                const double q = 1.0 - d;
                const double m = pi_(a, b) * q / d;
                const double v = pi_(a, b) * q / (d * d);
                g[a] += m;
                g[b] += m;
                h(a, b) += v;
                h(b, a) += v;
                h(a, a) += v;
                h(b, b) += v;
            }
    }

    double residual(const Vector& th) const override {
        Vector g = -e_;
        for (Index a = 0; a < dim(); ++a)
            for (Index b = a + 1; b < dim(); ++b) {
                if (pi_(a, b) <= 0.0) continue;
                const double m = pi_(a, b) / std::expm1(-(th[a] + th[b]));
                g[a] += m;
                g[b] += m;
            }
        return (g.array().abs() / scale_.array()).maxCoeff();
    }

    void sweep(Vector& th, double damping) const override {
        for (Index a = 0; a < dim(); ++a) {
            // y_a <- excess_a / sum_b pi_ab y_b / (1 - y_a y_b)
            double denom = 0.0;
            for (Index b = 0; b < dim(); ++b) {
                if (b == a || pi_(a, b) <= 0.0) continue;
                denom += pi_(a, b) * std::exp(th[b]) / -std::expm1(th[a] + th[b]);
            }
            if (denom <= 0.0) continue;
            const double target = std::log(e_[a]) - std::log(denom);
            th[a] = std::min((1.0 - damping) * th[a] + damping * target, kMaxLogY);
        }
    }

private:
    std::vector<std::size_t> free_;
    Matrix pi_;
    Vector e_;
    Vector scale_;
};

// ---------------------------------------------------------------- ECM

// Variables: tau_i = log(x_i y_i) for every node with k_i > 0, followed by
// v_i = log(y_i) for nodes with s_i > k_i. Nodes with s_i == k_i keep y = 0
// inside the solve. This parametrisation is linear in the natural one, so the
// objective stays convex, and it keeps the s == k boundary finite.
class EcmProblem final : public ConvexProblem {
public:
    EcmProblem(std::vector<std::size_t> nodes, Vector k, Vector s, std::vector<Index> v_slot)
        : nodes_(std::move(nodes)), k_(std::move(k)), s_(std::move(s)), v_slot_(std::move(v_slot)) {
        m_ = static_cast<Index>(nodes_.size());
        nv_ = 0;
        for (auto slot : v_slot_)
            if (slot >= 0) ++nv_;
    }

    Index dim() const override { return m_ + nv_; }

    bool in_domain(const Vector& th) const override {
        if (!th.allFinite()) return false;
        return nv_ == 0 || (th.tail(nv_).array() <= kMaxLogY).all();
    }

    struct Pair {
        double log_z;  // log of the pair partition function
        double p;      // link probability
        double m;      // expected weight beyond the first unit
        double q;
        double d;      // 1 - q
    };

    Pair pair(const Vector& th, Index a, Index b) const {
        const double tt = std::exp(th[a] + th[b]);
        const Index va = v_slot_[a];
        const Index vb = v_slot_[b];
        double q = 0.0;
        double d = 1.0;
        if (va >= 0 && vb >= 0) {
            const double lv = th[m_ + va] + th[m_ + vb];
            d = -std::expm1(lv);
            q = std::exp(lv);
        }
        Pair pr{};
        pr.q = q;
        pr.d = d;
        pr.p = tt / (d + tt);
        pr.m = pr.p * q / d;
        pr.log_z = std::log(d + tt) - std::log(d);
        return pr;
    }

    double objective(const Vector& th) const override {
        double f = 0.0;
        for (Index a = 0; a < m_; ++a) {
            f -= k_[a] * th[a];
            if (v_slot_[a] >= 0) f -= (s_[a] - k_[a]) * th[m_ + v_slot_[a]];
            for (Index b = a + 1; b < m_; ++b) f += pair(th, a, b).log_z;
        }
        return f;
    }

    void derivatives(const Vector& th, Vector& g, Matrix& h) const override {
        g = Vector::Zero(dim());
        h = Matrix::Zero(dim(), dim());
        for (Index a = 0; a < m_; ++a) {
            g[a] -= k_[a];
            if (v_slot_[a] >= 0) g[m_ + v_slot_[a]] -= s_[a] - k_[a];
        }
        for (Index a = 0; a < m_; ++a)
            for (Index b = a + 1; b < m_; ++b) {
                const Pair pr = pair(th, a, b);
                const double var_a = pr.p * (1.0 - pr.p);
                const double cov = (1.0 - pr.p) * pr.m;
                const double var_e = pr.p * pr.q * (1.0 + pr.q) / (pr.d * pr.d) - pr.m * pr.m;
                g[a] += pr.p;
                g[b] += pr.p;
                add_block(h, a, a, var_a);
                add_block(h, b, b, var_a);
                add_pair(h, a, b, var_a);
                const Index va = v_slot_[a] >= 0 ? m_ + v_slot_[a] : -1;
                const Index vb = v_slot_[b] >= 0 ? m_ + v_slot_[b] : -1;
                if (va < 0 || vb < 0) continue;
                g[va] += pr.m;
                g[vb] += pr.m;
                // Each statistic depends on the pair sum of its variables, so
                // all four (node, node) combinations get the same covariance.
                for (Index ta : {a, b})
                    for (Index vv : {va, vb}) add_pair(h, ta, vv, cov);
                add_block(h, va, va, var_e);
                add_block(h, vb, vb, var_e);
                add_pair(h, va, vb, var_e);
            }
    }

    double residual(const Vector& th) const override {
        Vector deg = Vector::Zero(m_);
        Vector str = Vector::Zero(m_);
        for (Index a = 0; a < m_; ++a)
            for (Index b = a + 1; b < m_; ++b) {
                const Pair pr = pair(th, a, b);
                deg[a] += pr.p;
                deg[b] += pr.p;
                str[a] += pr.p + pr.m;
                str[b] += pr.p + pr.m;
            }
        return std::max(max_relative_residual(deg, k_), max_relative_residual(str, s_));
    }

    void sweep(Vector& th, double damping) const override {
        for (Index a = 0; a < m_; ++a) {
            double deg = 0.0;
            double extra = 0.0;
            for (Index b = 0; b < m_; ++b) {
                if (b == a) continue;
                const Pair pr = pair(th, a, b);
                deg += pr.p;
                extra += pr.m;
            }
            if (deg > 0.0) th[a] += damping * (std::log(k_[a]) - std::log(deg));
            const Index va = v_slot_[a];
            if (va >= 0 && extra > 0.0) {
                const double next = th[m_ + va] + damping * (std::log(s_[a] - k_[a]) - std::log(extra));
                th[m_ + va] = std::min(next, kMaxLogY);
            }
        }
    }

    Index node_count() const { return m_; }

private:
    static void add_block(Matrix& h, Index i, Index j, double v) { h(i, j) += v; }
    static void add_pair(Matrix& h, Index i, Index j, double v) {
        h(i, j) += v;
        h(j, i) += v;
    }

    std::vector<std::size_t> nodes_;
    Vector k_;
    Vector s_;
    std::vector<Index> v_slot_;
    Index m_ = 0;
    Index nv_ = 0;
};

void finish_report(SolveReport& report, const RunStats& st) {
    report.fixed_point_sweeps += st.sweeps;
    report.newton_steps += st.newton;
    report.iterations_used = report.fixed_point_sweeps + report.newton_steps;
    report.final_residual = std::max(report.final_residual, st.residual);
}

std::vector<double>* trace_of(SolveReport& r, const SolverConfig& cfg) {
    return cfg.record_trace ? &r.residual_trace : nullptr;
}

void flag_full_degree(SolveReport& report, const std::vector<std::size_t>& full) {
    for (auto i : full) report.degenerate_nodes.push_back({i, "full_degree: linked to every non-isolated node, requires p = 1"});
}

}  // namespace

void SolverConfig::validate() const {
    if (max_iterations == 0) throw DomainError("SolverConfig: max_iterations must be positive");
    if (!(tolerance > 0.0)) throw DomainError("SolverConfig: tolerance must be positive");
    if (!(damping > 0.0 && damping <= 1.0)) throw DomainError("SolverConfig: damping must lie in (0,1]");
    if (!(slow_ratio > 0.0 && slow_ratio <= 1.0)) throw DomainError("SolverConfig: slow_ratio must lie in (0,1]");
}

double max_relative_residual(const Vector& expected, const Vector& observed) {
    if (expected.size() != observed.size()) throw DomainError("max_relative_residual: length mismatch");
    if (expected.size() == 0) return 0.0;
    return ((expected - observed).array().abs() / observed.array().max(1.0)).maxCoeff();
}

std::pair<BcmSolution, SolveReport> solve_bcm(const NetworkSummary& summary, const SolverConfig& cfg) {
    cfg.validate();
    SolveReport report;
    const auto n = static_cast<Index>(summary.n);
    BcmSolution sol{Vector::Zero(n)};
    check_feasible_sequences(summary, false);
    const auto full = full_degree_nodes(summary);

    std::vector<std::size_t> free;
    for (std::size_t i = 0; i < summary.n; ++i) {
        if (summary.degree[i] == 0) report.degenerate_nodes.push_back({i, "isolated: z pinned to 0"});
        else free.push_back(i);
    }
    Vector k(static_cast<Index>(free.size()));
    Vector theta(static_cast<Index>(free.size()));
    const double scale = seed_scale(summary);
    for (std::size_t a = 0; a < free.size(); ++a) {
        const auto ki = static_cast<double>(summary.degree[free[a]]);
        k[static_cast<Index>(a)] = ki;
        theta[static_cast<Index>(a)] =
            cfg.initialization == Initialization::DegreeSeeded ? std::log(ki / scale) : std::log(0.5);
    }
    BcmProblem problem(free, k);

    if (!full.empty()) {
        flag_full_degree(report, full);
        report.final_residual = free.empty() ? 0.0 : problem.residual(theta);
        report.converged = false;
    } else {
        const RunStats st = minimise(problem, theta, cfg, cfg.max_iterations, trace_of(report, cfg));
        finish_report(report, st);
        report.converged = st.converged;
    }
    for (std::size_t a = 0; a < free.size(); ++a)
        sol.z[static_cast<Index>(free[a])] = std::exp(theta[static_cast<Index>(a)]);
    return {std::move(sol), std::move(report)};
}

namespace {

// Shared by the WCM and the second step of the two-step model.
RunStats solve_geometric(const Matrix& pi_full, const Vector& excess, const Vector& strength, const NetworkSummary& summary,
                         const SolverConfig& cfg, std::size_t budget, Vector& y, SolveReport& report,
                         const char* pinned_reason) {
    std::vector<std::size_t> free;
    for (std::size_t i = 0; i < summary.n; ++i) {
        if (excess[static_cast<Index>(i)] > 0.0 && summary.strength[i] > 0) free.push_back(i);
        else report.degenerate_nodes.push_back({i, pinned_reason});
    }
    const auto m = static_cast<Index>(free.size());
    Matrix pi(m, m);
    Vector e(m), scale(m), theta(m);
    for (Index a = 0; a < m; ++a) {
        const auto i = static_cast<Index>(free[static_cast<std::size_t>(a)]);
        e[a] = excess[i];
        scale[a] = std::max(strength[i], 1.0);
        for (Index b = 0; b < m; ++b) pi(a, b) = pi_full(i, static_cast<Index>(free[static_cast<std::size_t>(b)]));
        const double y0 = cfg.initialization == Initialization::DegreeSeeded
                              ? seeded_y(summary, static_cast<std::size_t>(i))
                              : 0.5;
        theta[a] = std::log(y0);
    }
    GeometricProblem problem(free, std::move(pi), std::move(e), std::move(scale));
    const RunStats st = minimise(problem, theta, cfg, budget, trace_of(report, cfg));
    if (!st.converged)
        for (Index a = 0; a < m; ++a)
            if (theta[a] >= kYCapFlag) report.degenerate_nodes.push_back({free[static_cast<std::size_t>(a)], kYCapReason});
    y = Vector::Zero(static_cast<Index>(summary.n));
    for (Index a = 0; a < m; ++a) y[static_cast<Index>(free[static_cast<std::size_t>(a)])] = std::exp(theta[a]);
    return st;
}

}  // namespace

std::pair<WcmSolution, SolveReport> solve_wcm(const NetworkSummary& summary, const SolverConfig& cfg) {
    cfg.validate();
    check_feasible_sequences(summary, false);
    SolveReport report;
    const auto n = static_cast<Index>(summary.n);
    const Vector s = summary.strength_vector();
    Matrix ones = Matrix::Ones(n, n);
    WcmSolution sol;
    const RunStats st = solve_geometric(ones, s, s, summary, cfg, cfg.max_iterations, sol.y, report,
                                        "zero strength: y pinned to 0");
    finish_report(report, st);
    report.converged = st.converged;
    return {std::move(sol), std::move(report)};
}

std::pair<EcmSolution, SolveReport> solve_ecm(const NetworkSummary& summary, const SolverConfig& cfg) {
    cfg.validate();
    check_feasible_sequences(summary, true);
    const auto full = full_degree_nodes(summary);
    SolveReport report;
    const auto n = static_cast<Index>(summary.n);

    std::vector<std::size_t> nodes;
    std::vector<Index> v_slot;
    Index nv = 0;
    for (std::size_t i = 0; i < summary.n; ++i) {
        if (summary.degree[i] == 0) {
            report.degenerate_nodes.push_back({i, "isolated: x and y pinned to 0"});
            continue;
        }
        nodes.push_back(i);
        if (summary.strength[i] > summary.degree[i]) {
            v_slot.push_back(nv++);
        } else {
            v_slot.push_back(-1);
            report.degenerate_nodes.push_back({i, "unit weights (s = k): y at its zero boundary"});
        }
    }
    const auto m = static_cast<Index>(nodes.size());
    Vector k(m), s(m), theta(m + nv);
    const double scale = seed_scale(summary);
    for (Index a = 0; a < m; ++a) {
        const auto i = nodes[static_cast<std::size_t>(a)];
        k[a] = static_cast<double>(summary.degree[i]);
        s[a] = static_cast<double>(summary.strength[i]);
        const bool seeded = cfg.initialization == Initialization::DegreeSeeded;
        const double x0 = seeded ? k[a] / scale : 0.5;
        const double y0 = seeded ? seeded_y(summary, i) : 0.5;
        const Index slot = v_slot[static_cast<std::size_t>(a)];
        theta[a] = slot >= 0 ? std::log(x0 * y0) : std::log(x0);
        if (slot >= 0) theta[m + slot] = std::log(y0);
    }
    EcmProblem problem(nodes, k, s, v_slot);

    if (!full.empty()) {
        flag_full_degree(report, full);
        report.final_residual = problem.residual(theta);
        report.converged = false;
    } else {
        const RunStats st = minimise(problem, theta, cfg, cfg.max_iterations, trace_of(report, cfg));
        finish_report(report, st);
        report.converged = st.converged;
        if (!st.converged)
            for (Index a = 0; a < m; ++a) {
                const Index slot = v_slot[static_cast<std::size_t>(a)];
                if (slot >= 0 && theta[m + slot] >= kYCapFlag)
                    report.degenerate_nodes.push_back({nodes[static_cast<std::size_t>(a)], kYCapReason});
            }
    }

    EcmSolution sol{Vector::Zero(n), Vector::Zero(n)};
    for (Index a = 0; a < m; ++a) {
        const auto i = static_cast<Index>(nodes[static_cast<std::size_t>(a)]);
        const Index slot = v_slot[static_cast<std::size_t>(a)];
        const double t = std::exp(theta[a]);
        const double y = slot >= 0 ? std::exp(theta[m + slot]) : kYFloor;
        sol.y[i] = y;
        sol.x[i] = t / y;
    }
    return {std::move(sol), std::move(report)};
}

std::pair<TsSolution, SolveReport> solve_ts(const NetworkSummary& summary, const SolverConfig& cfg) {
    cfg.validate();
    check_feasible_sequences(summary, true);
    auto [bcm, report] = solve_bcm(summary, cfg);
    const auto n = static_cast<Index>(summary.n);
    TsSolution sol{bcm.z, Vector::Zero(n)};
    if (!report.converged) return {std::move(sol), std::move(report)};

    const Matrix p = bcm_probability_matrix(bcm);
    const Vector s = summary.strength_vector();
    Vector excess(n);
    for (Index i = 0; i < n; ++i) {
        // s == k means every link carries one unit: y = 0 exactly.
        excess[i] = summary.strength[static_cast<std::size_t>(i)] > summary.degree[static_cast<std::size_t>(i)]
                        ? s[i] - p.row(i).sum()
                        : 0.0;
    }
    const std::size_t budget = cfg.max_iterations > report.iterations_used ? cfg.max_iterations - report.iterations_used : 0;
    const RunStats st = solve_geometric(p, excess, s, summary, cfg, budget, sol.y, report,
                                        "no excess strength: y pinned to 0");
    finish_report(report, st);

    // Final check against the full strength constraint, including pinned nodes.
    const Vector strength = ts_weight_matrix(sol).rowwise().sum();
    report.final_residual = std::max(report.final_residual, max_relative_residual(strength, s));
    report.converged = st.converged && report.final_residual <= cfg.tolerance;
    return {std::move(sol), std::move(report)};
}

}  // namespace itn
