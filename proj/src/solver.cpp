#include "dckm/solver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "dckm/decorrelation.hpp"
#include "dckm/errors.hpp"
#include "dckm/rng.hpp"

namespace dckm {

namespace {

void check_shapes(const DataMatrix& x, const CentroidMatrix& f, const AssignmentMatrix& g) {
    if (static_cast<std::size_t>(f.rows()) != x.d()) {
        throw ShapeMismatch("centroid matrix has " + std::to_string(f.rows()) + " rows, expected d=" +
                            std::to_string(x.d()));
    }
    if (static_cast<std::size_t>(f.cols()) != g.k()) {
        throw ShapeMismatch("centroid matrix has " + std::to_string(f.cols()) +
                            " columns, assignment has K=" + std::to_string(g.k()));
    }
    if (g.n() != x.n()) {
        throw ShapeMismatch("assignment has " + std::to_string(g.n()) + " rows, expected n=" +
                            std::to_string(x.n()));
    }
}

void check_length(const DataMatrix& x, const Vector& v, const char* what) {
    if (static_cast<std::size_t>(v.size()) != x.n()) {
        throw ShapeMismatch(std::string(what) + " has length " + std::to_string(v.size()) +
                            ", expected n=" + std::to_string(x.n()));
    }
}

// plain sequential sum over features
double squared_distance(const Matrix& x, Eigen::Index i, const CentroidMatrix& f, Eigen::Index k) {
    double acc = 0.0;
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        const double diff = x(i, j) - f(j, k);
        acc += diff * diff;
    }
    return acc;
}

// Nearest centroid among clusters with usable[k] set.
Labels assign_nearest(const Matrix& x, const CentroidMatrix& f, const std::vector<bool>& usable) {
    Labels labels(static_cast<std::size_t>(x.rows()), 0);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        int best_k = -1;
        for (Eigen::Index k = 0; k < f.cols(); ++k) {
            if (!usable[static_cast<std::size_t>(k)]) continue;
            const double dist = squared_distance(x, i, f, k);
            if (best_k < 0 || dist < best) {
                best = dist;
                best_k = static_cast<int>(k);
            }
        }
        labels[static_cast<std::size_t>(i)] = best_k;
    }
    return labels;
}

struct ClusterMeans {
    CentroidMatrix centroids;
    std::vector<bool> valid;
};

ClusterMeans weighted_means(const Matrix& x, const Vector& w, const AssignmentMatrix& g) {
    const auto k = static_cast<Eigen::Index>(g.k());
    ClusterMeans out{CentroidMatrix::Zero(x.cols(), k), std::vector<bool>(g.k(), false)};
    Vector mass = Vector::Zero(k);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        const int c = g.label(static_cast<std::size_t>(i));
        out.centroids.col(c) += w(i) * x.row(i).transpose();
        mass(c) += w(i);
    }
    for (Eigen::Index c = 0; c < k; ++c) {
        if (mass(c) > kGroupMassEpsilon) {
            out.centroids.col(c) /= mass(c);
            out.valid[static_cast<std::size_t>(c)] = true;
        } else {
            out.centroids.col(c).setZero();
        }
    }
    return out;
}

double sum_penalty(double sum_w) { return (sum_w - 1.0) * (sum_w - 1.0); }

}  // namespace

Vector sample_residuals(const DataMatrix& x, const CentroidMatrix& f, const AssignmentMatrix& g) {
    check_shapes(x, f, g);
    Vector r(static_cast<Eigen::Index>(x.n()));
    for (Eigen::Index i = 0; i < r.size(); ++i) {
        r(i) = squared_distance(x.values(), i, f, g.label(static_cast<std::size_t>(i)));
    }
    return r;
}

double weighted_kmeans_loss(const DataMatrix& x, const Vector& w, const CentroidMatrix& f,
                            const AssignmentMatrix& g) {
    check_length(x, w, "weight vector");
    return w.dot(sample_residuals(x, f, g));
}

ObjectiveTerms objective_terms(const DataMatrix& x, const Vector& w, const CentroidMatrix& f,
                               const AssignmentMatrix& g, const HyperParams& hp) {
    check_length(x, w, "weight vector");
    if ((w.array() < 0.0).any()) throw InvalidArgument("weights must be non-negative");
    ObjectiveTerms t;
    t.reconstruction = weighted_kmeans_loss(x, w, f, g);
    if (hp.lambda1 != 0.0) {
        const auto b = balance_loss(x, w);
        t.balance = b.value;
        t.skipped_features = b.skipped;
    }
    t.weight_norm = w.squaredNorm();
    t.sum_penalty = sum_penalty(w.sum());
    t.total = t.reconstruction + hp.lambda1 * t.balance + hp.lambda2 * t.weight_norm +
              hp.lambda3 * t.sum_penalty;
    return t;
}

double objective(const DataMatrix& x, const SampleWeights& w, const CentroidMatrix& f,
                 const AssignmentMatrix& g, const HyperParams& hp) {
    return objective_terms(x, w.w(), f, g, hp).total;
}

CentroidMatrix update_F(const DataMatrix& x, const Vector& w, const AssignmentMatrix& g) {
    check_length(x, w, "weight vector");
    if (g.n() != x.n()) throw ShapeMismatch("assignment rows do not match data rows");
    auto means = weighted_means(x.values(), w, g);
    for (std::size_t c = 0; c < g.k(); ++c) {
        if (!means.valid[c]) throw EmptyCluster(c);
    }
    return std::move(means.centroids);
}

CentroidMatrix update_F(const DataMatrix& x, const SampleWeights& w, const AssignmentMatrix& g) {
    return update_F(x, w.w(), g);
}

AssignmentMatrix update_G(const DataMatrix& x, const CentroidMatrix& f) {
    if (static_cast<std::size_t>(f.rows()) != x.d()) {
        throw ShapeMismatch("centroid matrix rows do not match feature count");
    }
    if (f.cols() < 1) throw InvalidArgument("need at least one centroid");
    if (!f.allFinite()) throw InvalidArgument("centroid matrix has non-finite entries");
    return AssignmentMatrix(assign_nearest(x.values(), f, std::vector<bool>(static_cast<std::size_t>(f.cols()), true)),
                            static_cast<std::size_t>(f.cols()));
}

CentroidMatrix update_F_with_recovery(const DataMatrix& x, const Vector& w, AssignmentMatrix& g,
                                      std::size_t* reseeds) {
    check_length(x, w, "weight vector");
    const Matrix& v = x.values();
    int failures = 0;
    std::size_t previous_empty = g.k() + 1;
    for (;;) {
        auto means = weighted_means(v, w, g);
        const auto empty = static_cast<std::size_t>(std::count(means.valid.begin(), means.valid.end(), false));
        if (empty == 0) return std::move(means.centroids);
        if (empty >= previous_empty && ++failures >= kMaxReseedAttempts) {
            const auto first = static_cast<std::size_t>(
                std::find(means.valid.begin(), means.valid.end(), false) - means.valid.begin());
            throw EmptyCluster(first);
        }
        previous_empty = empty;
        if (empty == g.k()) throw EmptyCluster(0);

        const auto target = static_cast<Eigen::Index>(
            std::find(means.valid.begin(), means.valid.end(), false) - means.valid.begin());
        const auto sizes = g.cluster_sizes();
        Eigen::Index donor = -1;
        double best = -1.0;
        for (Eigen::Index i = 0; i < v.rows(); ++i) {
            const int c = g.label(static_cast<std::size_t>(i));
            if (!means.valid[static_cast<std::size_t>(c)] || sizes[static_cast<std::size_t>(c)] < 2) continue;
            const double score = w(i) * squared_distance(v, i, means.centroids, c);
            if (score > best) {
                best = score;
                donor = i;
            }
        }
        if (donor < 0) throw EmptyCluster(static_cast<std::size_t>(target));

        means.centroids.col(target) = v.row(donor).transpose();
        means.valid[static_cast<std::size_t>(target)] = true;
        g = AssignmentMatrix(assign_nearest(v, means.centroids, means.valid), g.k());
        if (reseeds != nullptr) ++*reseeds;
    }
}

double omega_objective(const DataMatrix& x, const Vector& residuals, const Vector& omega,
                       const HyperParams& hp) {
    check_length(x, omega, "omega");
    const Vector w = omega.array().square().matrix();
    double j = 0.0;
    if (residuals.size() != 0) {
        check_length(x, residuals, "residual vector");
        j += w.dot(residuals);
    }
    if (hp.lambda1 != 0.0) j += hp.lambda1 * balance_loss(x, w).value;
    j += hp.lambda2 * w.squaredNorm() + hp.lambda3 * sum_penalty(w.sum());
    return j;
}

Vector omega_gradient(const DataMatrix& x, const Vector& residuals, const Vector& omega,
                      const HyperParams& hp) {
    check_length(x, omega, "omega");
    const Vector w = omega.array().square().matrix();
    Vector grad = Vector::Zero(omega.size());
    if (residuals.size() != 0) {
        check_length(x, residuals, "residual vector");
        grad.array() += 2.0 * omega.array() * residuals.array();
    }
    if (hp.lambda1 != 0.0) grad += hp.lambda1 * balance_gradient(x, omega).gradient;
    grad.array() += 4.0 * hp.lambda2 * omega.array().cube();
    grad.array() += 4.0 * hp.lambda3 * (w.sum() - 1.0) * omega.array();
    return grad;
}

double omega_objective(const DataMatrix& x, const CentroidMatrix& f, const AssignmentMatrix& g,
                       const Vector& omega, const HyperParams& hp) {
    return omega_objective(x, sample_residuals(x, f, g), omega, hp);
}

Vector omega_gradient(const DataMatrix& x, const CentroidMatrix& f, const AssignmentMatrix& g,
                      const Vector& omega, const HyperParams& hp) {
    return omega_gradient(x, sample_residuals(x, f, g), omega, hp);
}

WeightUpdate descend_omega(const DataMatrix& x, const Vector& residuals, const Vector& omega,
                           const HyperParams& hp, std::size_t max_steps) {
    Vector current = omega;
    double j_current = omega_objective(x, residuals, current, hp);
    WeightUpdate out{SampleWeights::from_omega(omega), 0, false, j_current, j_current};

    for (std::size_t step = 0; step < max_steps; ++step) {
        const Vector grad = omega_gradient(x, residuals, current, hp);
        const double grad_sq = grad.squaredNorm();
        if (grad_sq == 0.0 || !std::isfinite(grad_sq)) break;

        double t = hp.grad_step;
        bool accepted = false;
        while (t >= kMinLineSearchStep) {
            Vector candidate = current - t * grad;
            if ((candidate.array().square().sum()) > 0.0) {
                const double j_candidate = omega_objective(x, residuals, candidate, hp);
                if (std::isfinite(j_candidate) && j_candidate <= j_current - kArmijoConstant * t * grad_sq) {
                    current = std::move(candidate);
                    j_current = j_candidate;
                    accepted = true;
                    break;
                }
            }
            t *= hp.backtrack_shrink;
        }
        if (!accepted) {
            out.stalled = true;
            break;
        }
        ++out.steps;
    }
    if (out.steps > 0) out.weights.set_omega(std::move(current));
    out.objective_after = j_current;
    return out;
}

WeightUpdate update_w(const DataMatrix& x, const CentroidMatrix& f, const AssignmentMatrix& g,
                      const Vector& omega, const HyperParams& hp) {
    return descend_omega(x, sample_residuals(x, f, g), omega, hp, hp.max_w_iters);
}

SweepReport sweep(const DataMatrix& x, FitState& state, const HyperParams& hp) {
    SweepReport report;
    AssignmentMatrix g = state.assignment;
    state.centroids = update_F_with_recovery(x, state.weights.w(), g, &report.reseeds);
    AssignmentMatrix next = update_G(x, state.centroids);
    report.assignment_changed = !(next == state.assignment);
    state.assignment = std::move(next);

    if (hp.learn_weights) {
        auto upd = update_w(x, state.centroids, state.assignment, state.weights.omega(), hp);
        report.weights_changed = upd.steps > 0;
        report.weight_steps = upd.steps;
        report.stalled = upd.stalled;
        state.weights = std::move(upd.weights);
    }
    const auto terms = objective_terms(x, state.weights.w(), state.centroids, state.assignment, hp);
    report.objective = terms.total;
    report.skipped_features = terms.skipped_features;
    return report;
}

Labels initial_labels(std::size_t n, std::size_t k, std::uint64_t seed) {
    Rng rng(seed);
    return rng.labels(n, k);
}

FitResult fit(const DataMatrix& x, const HyperParams& hp, const std::optional<Labels>& init_labels) {
    hp.validate();
    const auto report = validate_data(x);
    if (!report.ok) {
        throw DataError("invalid data: " + (report.messages.empty() ? std::string("unknown") : report.messages.front()));
    }
    if (hp.k > x.n()) throw InvalidArgument("k exceeds the number of samples");

    Labels init = init_labels ? *init_labels : initial_labels(x.n(), hp.k, hp.seed);
    if (init.size() != x.n()) throw ShapeMismatch("initial labels do not match sample count");

    FitState state{SampleWeights::uniform(x.n()), CentroidMatrix(), AssignmentMatrix(std::move(init), hp.k)};
    FitResult result{CentroidMatrix(), state.assignment, state.weights, {}, {}, false, 0, 0, 0, hp.seed};

    for (std::size_t it = 0; it < hp.max_outer_iters; ++it) {
        const auto rep = sweep(x, state, hp);
        result.objective_history.push_back(rep.objective);
        if (hp.record_assignments) result.assignment_history.push_back(state.assignment.labels());
        result.skipped_features_last = rep.skipped_features;
        result.line_search_stalls += rep.stalled ? 1 : 0;
        ++result.iterations;

        const auto& h = result.objective_history;
        if (!rep.assignment_changed && !rep.weights_changed) {
            result.converged = true;
            break;
        }
        if (h.size() >= 2) {
            const double prev = h[h.size() - 2];
            if (std::abs(h.back() - prev) <= hp.outer_tol * std::max(1.0, std::abs(prev))) {
                result.converged = true;
                break;
            }
        }
    }
    result.centroids = std::move(state.centroids);
    result.assignment = std::move(state.assignment);
    result.weights = std::move(state.weights);
    return result;
}

RestartResults fit_restarts(const DataMatrix& x, const HyperParams& hp) {
    hp.validate();
    std::vector<std::optional<FitResult>> slots(hp.restarts);
    std::vector<std::exception_ptr> errors(hp.restarts);
    std::atomic<std::size_t> next{0};

    auto worker = [&]() {
        for (std::size_t r = next++; r < hp.restarts; r = next++) {
            try {
                HyperParams run = hp;
                run.seed = hp.seed + r;
                slots[r] = fit(x, run);
            } catch (...) {
                errors[r] = std::current_exception();
            }
        }
    };
    const std::size_t threads =
        std::min<std::size_t>(hp.restarts, std::max(1u, std::thread::hardware_concurrency()));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    RestartResults out;
    out.runs.reserve(hp.restarts);
    for (auto& s : slots) out.runs.push_back(std::move(*s));
    for (std::size_t r = 1; r < out.runs.size(); ++r) {
        if (out.runs[r].final_objective() < out.runs[out.best].final_objective()) out.best = r;
    }
    return out;
}

}  // namespace dckm
