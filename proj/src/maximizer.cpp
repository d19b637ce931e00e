#include "fucik/maximizer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <queue>
#include <thread>

#include "fucik/rng.hpp"

namespace fucik {

namespace {

int thread_budget(int n_tasks) {
    int cap = static_cast<int>(std::thread::hardware_concurrency());
    if (cap < 1) cap = 1;
    if (const char* env = std::getenv("FUCIK_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) cap = v;
    }
    return std::max(1, std::min(cap, n_tasks));
}

// Run fn(i) for i in [0, n) on up to thread_budget threads.  Each task writes
// only to its own slot, so scheduling cannot affect the merged result; the
// first thrown exception (by task index) is rethrown after the join.
template <typename Fn>
void parallel_for(int n, Fn&& fn) {
    const int workers = thread_budget(n);
    if (workers <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::exception_ptr> errors(n);
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&]() {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
                try {
                    fn(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

SpectralField random_unit_field(const Transform& transform, double r, Rng& rng) {
    SpectralField v = SpectralField::zero(transform.trunc());
    for (int i = 0; i < v.coeffs.size(); ++i) v.coeffs[i] = rng.normal();
    const double g = G_value(transform.synthesize(v), r, transform);
    v.coeffs /= std::sqrt(std::max(g, 1e-300));
    return v;
}

struct AscentOutcome {
    double ratio = -std::numeric_limits<double>::infinity();
    SpectralField v;
    double residual = std::numeric_limits<double>::infinity();
    bool converged = false;
    int iters = 0;
};

// Ratio ascent from one start.  Keeps the synthesized grid of the iterate in
// step with its coefficients so that line-search trials cost O(nodes): the
// grid of c + tau*dir is V + tau*Vdir by linearity.
//
// refine_endgame: once ratio increments drop below the precision of F/G the
// line search stalls with the residual around (eps*|R|)^(1/4).  The endgame
// switches to fixed-step gradient iterations with a Barzilai-Borwein step,
// tracked by the residual norm, which is still measurable to full precision.
AscentOutcome ascend(SpectralField v, const ShiftedOperator& op, double r,
                     const Transform& transform, const MaximizerConfig& mcfg, int budget,
                     bool refine_endgame = false) {
    AscentOutcome out;
    const Eigen::VectorXd& lambda = transform.modes().lambda;
    Eigen::VectorXd diag(lambda.size());
    for (int i = 0; i < lambda.size(); ++i) diag[i] = op.shifted_diag(lambda[i]);

    Eigen::MatrixXd V = transform.synthesize(v).values;
    {
        const double g0 = transform.node_weight() *
                          (V.cwiseMax(0.0).squaredNorm() + r * (-V).cwiseMax(0.0).squaredNorm());
        if (!(g0 > 0.0)) {
            out.v = v;
            return out;
        }
        const double s = std::sqrt(g0);
        v.coeffs /= s;
        V /= s;
    }

    const double w = transform.node_weight();
    double step = mcfg.step_init;
    double ratio = -std::numeric_limits<double>::infinity();
    int stalled = 0;
    GridField work;
    work.trunc = transform.trunc();

    int iter = 0;
    for (; iter < budget; ++iter) {
        const Eigen::MatrixXd pos = V.cwiseMax(0.0);
        const Eigen::MatrixXd neg = (-V).cwiseMax(0.0);
        const double G = w * (pos.squaredNorm() + r * neg.squaredNorm());
        const double F = (diag.array() * v.coeffs.array().square()).sum();
        const double R = F / G;

        work.values = pos - r * neg;
        SpectralField gw = transform.analyze(work);
        // dir = gradF - R gradG, the ascent direction of F/G on {G = 1}
        Eigen::VectorXd dir = 2.0 * (diag.array() * v.coeffs.array()).matrix() - (2.0 * R) * gw.coeffs;

        if (R > ratio) {
            const double improvement = (R - ratio) / std::max(std::abs(R), 1e-300);
            stalled = (iter > 0 && improvement < mcfg.tol_ratio) ? stalled + 1 : 0;
            ratio = R;
        } else {
            ++stalled;
        }
        out.ratio = ratio;
        out.residual = dir.norm();
        if (out.residual <= mcfg.tol_residual) {
            out.converged = true;
            break;
        }
        if (stalled >= mcfg.stall_window) break;

        dir /= dir.norm();
        // F along c + tau dir is an explicit quadratic.
        const double f1 = (diag.array() * v.coeffs.array() * dir.array()).sum();
        const double f2 = (diag.array() * dir.array().square()).sum();
        SpectralField dir_field;
        dir_field.trunc = transform.trunc();
        dir_field.coeffs = dir;
        const Eigen::MatrixXd Vdir = transform.synthesize(dir_field).values;

        double tau = std::min(step * 2.0, 1e6);
        bool accepted = false;
        while (tau > 1e-16) {
            const Eigen::MatrixXd W = V + tau * Vdir;
            const double Gt =
                w * (W.cwiseMax(0.0).squaredNorm() + r * (-W).cwiseMax(0.0).squaredNorm());
            const double Ft = F + 2.0 * tau * f1 + tau * tau * f2;
            if (Gt > 0.0 && Ft / Gt > R) {
                const double s = std::sqrt(Gt);
                v.coeffs = (v.coeffs + tau * dir) / s;
                V = W / s;
                step = tau;
                accepted = true;
                break;
            }
            tau *= mcfg.backtrack;
        }
        if (!accepted) break;  // no increase along the gradient: numerically stationary
    }
    out.iters = iter;

    if (refine_endgame && !out.converged && out.residual > mcfg.tol_residual) {
        Eigen::VectorXd best_c = v.coeffs;
        double best_res = out.residual;
        Eigen::VectorXd prev_c, prev_d;
        double tau = step;
        int reverts = 0;
        const int refine_budget = std::min(3000, std::max(0, budget - iter));
        for (int it = 0; it < refine_budget; ++it) {
            const Eigen::MatrixXd pos = V.cwiseMax(0.0);
            const Eigen::MatrixXd neg = (-V).cwiseMax(0.0);
            const double G = w * (pos.squaredNorm() + r * neg.squaredNorm());
            const double F = (diag.array() * v.coeffs.array().square()).sum();
            const double R = F / G;
            work.values = pos - r * neg;
            const SpectralField gw = transform.analyze(work);
            Eigen::VectorXd d =
                2.0 * (diag.array() * v.coeffs.array()).matrix() - (2.0 * R) * gw.coeffs;
            const double res = d.norm();
            if (res < best_res) {
                best_res = res;
                best_c = v.coeffs;
            }
            if (res <= mcfg.tol_residual) break;
            // BB iterations are intentionally nonmonotone; only a runaway
            // excursion forces a restart from the best point seen.
            if (res > 1e5 * (best_res + 1e-300)) {
                if (++reverts > 3) break;
                v.coeffs = best_c;
                V = transform.synthesize(v).values;
                tau = mcfg.step_init;
                prev_c.resize(0);
                prev_d.resize(0);
                continue;
            }
            if (prev_d.size() > 0) {
                const Eigen::VectorXd dc = v.coeffs - prev_c;
                const Eigen::VectorXd dd = d - prev_d;
                const double denom = dd.squaredNorm();
                if (denom > 0.0) tau = std::clamp(std::abs(dc.dot(dd)) / denom, 1e-9, 1e3);
            }
            prev_c = v.coeffs;
            prev_d = d;
            SpectralField dir_field;
            dir_field.trunc = transform.trunc();
            dir_field.coeffs = d;
            const Eigen::MatrixXd Vd = transform.synthesize(dir_field).values;
            Eigen::MatrixXd W = V + tau * Vd;
            const double Gt =
                w * (W.cwiseMax(0.0).squaredNorm() + r * (-W).cwiseMax(0.0).squaredNorm());
            if (!(Gt > 0.0)) break;
            const double s = std::sqrt(Gt);
            v.coeffs = (v.coeffs + tau * d) / s;
            V = W / s;
            ++out.iters;
        }
        v.coeffs = best_c;
        V = transform.synthesize(v).values;
        const double G = w * (V.cwiseMax(0.0).squaredNorm() + r * (-V).cwiseMax(0.0).squaredNorm());
        const double F = (diag.array() * v.coeffs.array().square()).sum();
        out.ratio = F / G;
        out.residual = best_res;
        out.converged = best_res <= mcfg.tol_residual;
    }

    out.v = std::move(v);
    return out;
}

}  // namespace

void MaximizerConfig::validate() const {
    if (n_starts < 1 || max_iters < 1 || coarse_iters < 1)
        throw std::invalid_argument("MaximizerConfig: counts must be positive");
    if (!(tol_ratio > 0.0) || !(tol_residual > 0.0) || !(step_init > 0.0))
        throw std::invalid_argument("MaximizerConfig: tolerances must be positive");
    if (!(backtrack > 0.0) || !(backtrack < 1.0))
        throw std::invalid_argument("MaximizerConfig: backtrack must lie in (0,1)");
}

MaximizerResult maximize_ratio(const ShiftedOperator& op, double r, const Transform& transform,
                               const MaximizerConfig& mcfg, const SpectralField* warm_start) {
    mcfg.validate();
    if (!(r > 0.0)) throw DomainError("maximize_ratio: r must be positive");
    if (warm_start != nullptr && !(warm_start->trunc == transform.trunc()))
        throw DomainError("maximize_ratio: warm start truncation mismatch");

    // Start list: +/- every eigenmode of lambda_k in the truncation, the warm
    // start if given, then seeded random fields up to n_starts.
    std::vector<SpectralField> starts;
    const ModeSet& set = transform.modes();
    for (int i = 0; i < set.size(); ++i) {
        if (set.lambda[i] == static_cast<double>(op.lambda_k())) {
            SpectralField e = SpectralField::zero(transform.trunc());
            e.coeffs[i] = 1.0;
            starts.push_back(e);
            e.coeffs[i] = -1.0;
            starts.push_back(std::move(e));
        }
    }
    if (warm_start != nullptr) starts.push_back(*warm_start);
    Rng rng(mcfg.seed);
    while (static_cast<int>(starts.size()) < mcfg.n_starts)
        starts.push_back(random_unit_field(transform, r, rng));

    const int n = static_cast<int>(starts.size());
    std::vector<AscentOutcome> outcomes(n);
    parallel_for(n, [&](int i) {
        outcomes[i] = ascend(starts[i], op, r, transform, mcfg,
                             std::min(mcfg.coarse_iters, mcfg.max_iters));
    });

    // Largest ratio first; ratios within a 1e-12 relative window count as
    // ties (floating noise), resolved by smaller residual, then lower index.
    auto better = [](const AscentOutcome& a, const AscentOutcome& b) {
        const double window = 1e-12 * std::max({1.0, std::abs(a.ratio), std::abs(b.ratio)});
        if (a.ratio > b.ratio + window) return true;
        if (b.ratio > a.ratio + window) return false;
        return a.residual < b.residual;
    };
    int best = 0;
    for (int i = 1; i < n; ++i)
        if (better(outcomes[i], outcomes[best])) best = i;

    // Polish the winner with the full budget and the residual-tracked endgame.
    AscentOutcome polished = outcomes[best];
    if (!polished.converged)
        polished = ascend(outcomes[best].v, op, r, transform, mcfg, mcfg.max_iters, true);
    if (polished.ratio + 1e-12 * std::max(1.0, std::abs(polished.ratio)) < outcomes[best].ratio)
        polished = outcomes[best];

    MaximizerResult result;
    result.a_hat = polished.ratio;
    result.v0 = polished.v;
    result.residual = polished.residual;
    result.converged = polished.converged;
    result.best_start = best;
    result.iters_per_start.reserve(n);
    result.start_values.reserve(n);
    for (const auto& o : outcomes) {
        result.iters_per_start.push_back(o.iters);
        result.start_values.push_back(o.ratio);
    }
    std::vector<double> ratios;
    for (const auto& o : outcomes)
        if (o.converged) ratios.push_back(o.ratio);
    if (polished.converged) ratios.push_back(polished.ratio);
    std::sort(ratios.begin(), ratios.end());
    for (double x : ratios) {
        if (result.distinct_ratios.empty() ||
            std::abs(x - result.distinct_ratios.back()) > 1e-6 * std::max(1.0, std::abs(x)))
            result.distinct_ratios.push_back(x);
    }
    return result;
}

double residual_norm(const SpectralField& v, double a_hat, double r, const ShiftedOperator& op,
                     const Transform& transform) {
    const ModeSet& set = transform.modes();
    const GridField grid = transform.synthesize(v);
    GridField w;
    w.trunc = grid.trunc;
    w.values = grid.values.cwiseMax(0.0) - r * (-grid.values).cwiseMax(0.0);
    const SpectralField proj = transform.analyze(w);
    double acc = 0.0;
    for (int i = 0; i < set.size(); ++i) {
        const double lhs = op.shifted_diag(set.lambda[i]) * v.coeffs[i];
        const double d = lhs - a_hat * proj.coeffs[i];
        acc += d * d;
    }
    return std::sqrt(acc);
}

double brute_force_sup(const ShiftedOperator& op, double r, const Transform& tiny_transform,
                       int n_samples, std::uint64_t seed) {
    const int dim = tiny_transform.modes().size();
    if (dim > 8) throw std::invalid_argument("brute_force_sup: truncation dimension must be <= 8");
    if (n_samples < 1) throw std::invalid_argument("brute_force_sup: need n_samples >= 1");

    // Basis values at the nodes: column i holds mode i on the flattened grid.
    const int nodes = tiny_transform.trunc().grid_s * tiny_transform.trunc().grid_t;
    Eigen::MatrixXd basis(nodes, dim);
    for (int i = 0; i < dim; ++i) {
        SpectralField e = SpectralField::zero(tiny_transform.trunc());
        e.coeffs[i] = 1.0;
        const GridField g = tiny_transform.synthesize(e);
        basis.col(i) = Eigen::Map<const Eigen::VectorXd>(g.values.data(), nodes);
    }
    Eigen::VectorXd diag(dim);
    for (int i = 0; i < dim; ++i) diag[i] = op.shifted_diag(tiny_transform.modes().lambda[i]);
    const double w = tiny_transform.node_weight();

    auto ratio_of = [&](const Eigen::VectorXd& c) {
        const Eigen::VectorXd vals = basis * c;
        const double G =
            w * (vals.cwiseMax(0.0).squaredNorm() + r * (-vals).cwiseMax(0.0).squaredNorm());
        if (!(G > 0.0)) return -std::numeric_limits<double>::infinity();
        const double F = (diag.array() * c.array().square()).sum();
        return F / G;
    };

    Rng rng(seed);
    // Keep the best 100 directions (min-heap on ratio).
    using Item = std::pair<double, Eigen::VectorXd>;
    auto cmp = [](const Item& a, const Item& b) { return a.first > b.first; };
    std::priority_queue<Item, std::vector<Item>, decltype(cmp)> top(cmp);
    const int keep = 100;
    for (int s = 0; s < n_samples; ++s) {
        Eigen::VectorXd c(dim);
        for (int i = 0; i < dim; ++i) c[i] = rng.normal();
        const double q = ratio_of(c);
        if (static_cast<int>(top.size()) < keep)
            top.emplace(q, std::move(c));
        else if (q > top.top().first) {
            top.pop();
            top.emplace(q, std::move(c));
        }
    }

    // Derivative-free polish: shrinking-radius random search, independent of
    // the gradient machinery it is checking.
    std::vector<Item> finalists;
    while (!top.empty()) {
        finalists.push_back(top.top());
        top.pop();
    }
    auto polish = [&](Item& item, double radius_lo, int tries_per_level) {
        double radius = 0.3;
        while (radius > radius_lo) {
            for (int t = 0; t < tries_per_level; ++t) {
                Eigen::VectorXd c = item.second;
                for (int i = 0; i < dim; ++i) c[i] += radius * rng.normal();
                const double q = ratio_of(c);
                if (q > item.first) {
                    item.first = q;
                    item.second = std::move(c);
                }
            }
            radius *= 0.6;
        }
    };
    for (auto& item : finalists) polish(item, 1e-4, 30);
    std::sort(finalists.begin(), finalists.end(),
              [](const Item& a, const Item& b) { return a.first > b.first; });
    const int deep = std::min<int>(3, static_cast<int>(finalists.size()));
    for (int i = 0; i < deep; ++i) polish(finalists[i], 1e-9, 120);

    double best = -std::numeric_limits<double>::infinity();
    for (const auto& item : finalists) best = std::max(best, item.first);
    return best;
}

}  // namespace fucik
