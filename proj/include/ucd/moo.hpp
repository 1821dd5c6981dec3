#pragma once

#include <algorithm>
#include <array>
#include <cfenv>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <tuple>
#include <vector>

#include "ucd/detection.hpp"
#include "ucd/error.hpp"
#include "ucd/graph.hpp"
#include "ucd/metrics.hpp"
#include "ucd/parallel.hpp"
#include "ucd/perturbation.hpp"
#include "ucd/random.hpp"

namespace ucd {

/// T = 20% of the original link count, rounded to nearest with ties to even.
inline std::size_t default_budget(std::size_t edge_count) {
    const int saved = std::fegetround();
    std::fesetround(FE_TONEAREST);
    const double t = std::nearbyint(0.2 * static_cast<double>(edge_count));
    std::fesetround(saved);
    return static_cast<std::size_t>(std::max(1.0, t));
}

struct AttackConfig {
    std::size_t omega = 30;
    double p_c = 0.5;
    double p_m = 0.8;
    std::size_t budget = 0;  // T; 0 means default_budget(|E|)
    std::size_t max_iterations = 500;
    BiasMode bias = BiasMode::Uniform;
    Detector detector = Detector::Louvain;
    std::uint64_t detector_seed = 0;  // pins the clean-graph ground truth
    std::uint64_t seed = 1;
    unsigned threads = 1;

    void validate() const {
        if (omega < 2 || omega % 2 != 0) throw ValidationError("population size must be even and at least 2");
        if (!(p_c >= 0.0 && p_c <= 1.0)) throw ValidationError("crossover probability must lie in [0, 1]");
        if (!(p_m >= 0.0 && p_m <= 1.0)) throw ValidationError("mutation probability must lie in [0, 1]");
        if (max_iterations < 1) throw ValidationError("max_iterations must be at least 1");
        if (threads < 1) throw ValidationError("threads must be at least 1");
    }

    std::size_t resolved_budget(const Graph& g) const { return budget > 0 ? budget : default_budget(g.edge_count()); }
};

/// Evaluates individuals against a fixed ground truth.
///
/// Results are cached by the set of modified links, so an unchanged or
/// re-discovered graph keeps its first fitness. Detector seeds derive from
/// (run seed, iteration, batch index); cache lookups and seed assignment
/// happen in batch order before any detector runs, which keeps results
/// independent of thread scheduling.
class FitnessEvaluator {
public:
    FitnessEvaluator(const Graph& base, Partition ground_truth, Detector detector, std::size_t budget,
                     std::uint64_t run_seed, unsigned threads = 1)
        : base_(base), ground_truth_(std::move(ground_truth)), detector_(detector), budget_(budget),
          run_seed_(run_seed), threads_(std::max(1u, threads)) {
        if (budget_ == 0) throw ValidationError("budget T must be positive");
        if (ground_truth_.node_count() != base_.node_count())
            throw ValidationError("ground truth does not cover the graph");
        cache_.emplace(std::vector<Edge>{}, Evaluation{{0.0, 1.0}, modularity(base_, ground_truth_), 0});
    }

    const Graph& base() const { return base_; }
    const Partition& ground_truth() const { return ground_truth_; }
    std::size_t budget() const { return budget_; }
    std::size_t detector_calls() const { return detector_calls_; }

    /// Uncached single evaluation with an explicit detector seed.
    Evaluation evaluate_uncached(const Graph& perturbed, std::uint64_t detector_seed) const {
        const auto modified = edge_set_difference_size(base_, perturbed);
        const auto found = detect(perturbed, detector_, detector_seed);
        return {{dari(ground_truth_, found), dat_from_modified(modified, budget_)}, modularity(perturbed, found),
                modified};
    }

    void evaluate(std::span<Individual> batch, std::size_t iteration) {
        struct Job {
            std::vector<Edge> key;
            std::size_t index;
            Evaluation result;
        };
        std::vector<Job> jobs;
        std::vector<std::optional<std::size_t>> job_of(batch.size());
        std::map<std::vector<Edge>, std::size_t> pending;
        for (std::size_t i = 0; i < batch.size(); ++i) {
            if (batch[i].evaluation) continue;
            auto key = edge_difference(base_, batch[i].perturbed);
            if (auto hit = cache_.find(key); hit != cache_.end()) {
                batch[i].evaluation = hit->second;
                continue;
            }
            if (auto p = pending.find(key); p != pending.end()) {
                job_of[i] = p->second;
                continue;
            }
            pending.emplace(key, jobs.size());
            job_of[i] = jobs.size();
            jobs.push_back({std::move(key), i, {}});
        }

        auto run = [&](std::size_t j) {
            const auto seed = derive_seed({run_seed_, iteration, jobs[j].index});
            jobs[j].result = evaluate_uncached(batch[jobs[j].index].perturbed, seed);
        };
        parallel_for(jobs.size(), threads_, run);

        detector_calls_ += jobs.size();
        for (std::size_t i = 0; i < batch.size(); ++i)
            if (job_of[i]) batch[i].evaluation = jobs[*job_of[i]].result;
        for (auto& job : jobs) cache_.emplace(std::move(job.key), job.result);
    }

private:
    const Graph& base_;
    Partition ground_truth_;
    Detector detector_;
    std::size_t budget_;
    std::uint64_t run_seed_;
    unsigned threads_;
    std::size_t detector_calls_ = 0;
    std::map<std::vector<Edge>, Evaluation> cache_;
};

/// Fitness of one individual with a given detector seed (no caching).
inline FitnessPoint evaluate_fitness(const Individual& ind, const Graph& original, const Partition& ground_truth,
                                     Detector detector, std::uint64_t detector_seed, std::size_t budget) {
    FitnessEvaluator eval(original, ground_truth, detector, budget, 0);
    if (ind.perturbed == original) return {0.0, 1.0};
    return eval.evaluate_uncached(ind.perturbed, detector_seed).fitness;
}

/// Deb's fast non-dominated sort (maximizing both coordinates). Every
/// index appears in exactly one front; indices ascend within a front.
inline std::vector<std::vector<std::size_t>> fast_nondominated_sort(std::span<const FitnessPoint> points) {
    const std::size_t n = points.size();
    std::vector<std::vector<std::size_t>> dominated_by_me(n);
    std::vector<std::size_t> domination_count(n, 0);
    std::vector<std::vector<std::size_t>> fronts;
    std::vector<std::size_t> current;
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t q = 0; q < n; ++q) {
            if (p == q) continue;
            if (dominates(points[p], points[q]))
                dominated_by_me[p].push_back(q);
            else if (dominates(points[q], points[p]))
                ++domination_count[p];
        }
        if (domination_count[p] == 0) current.push_back(p);
    }
    while (!current.empty()) {
        std::vector<std::size_t> next;
        for (std::size_t p : current)
            for (std::size_t q : dominated_by_me[p])
                if (--domination_count[q] == 0) next.push_back(q);
        std::sort(next.begin(), next.end());
        fronts.push_back(std::move(current));
        current = std::move(next);
    }
    return fronts;
}

/// NSGA-II crowding distance within one front. Boundary points of each
/// objective are infinite; interior points sum normalized neighbor gaps.
/// Ties are broken so that the dat order reverses the dari order on a
/// non-dominated front, so duplicated extremes mark the same copy.
inline std::vector<double> crowding_distance(std::span<const FitnessPoint> front) {
    const std::size_t n = front.size();
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> distance(n, 0.0);
    if (n <= 2) {
        std::fill(distance.begin(), distance.end(), inf);
        return distance;
    }
    auto accumulate = [&](auto value, auto before) {
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), before);
        distance[order.front()] = inf;
        distance[order.back()] = inf;
        const double span = value(front[order.back()]) - value(front[order.front()]);
        if (span <= 0.0) return;
        for (std::size_t k = 1; k + 1 < n; ++k)
            distance[order[k]] += (value(front[order[k + 1]]) - value(front[order[k - 1]])) / span;
    };
    accumulate([](const FitnessPoint& p) { return p.dari; },
               [&](std::size_t x, std::size_t y) {
                   return std::tuple(front[x].dari, -front[x].dat, x) < std::tuple(front[y].dari, -front[y].dat, y);
               });
    accumulate([](const FitnessPoint& p) { return p.dat; },
               [&](std::size_t x, std::size_t y) {
                   return std::tuple(front[x].dat, -front[x].dari, y) < std::tuple(front[y].dat, -front[y].dari, x);
               });
    return distance;
}

/// Indices of the `omega` survivors out of `points`: whole fronts by rank,
/// the partially admitted front truncated by descending crowding distance
/// (ties by index). Points with dat < 0 (over budget) rank after every
/// feasible front, ordered by dat descending.
inline std::vector<std::size_t> elite_select_indices(std::span<const FitnessPoint> points, std::size_t omega) {
    if (points.size() < omega) throw ValidationError("selection pool smaller than omega");
    std::vector<std::size_t> feasible;
    std::vector<std::size_t> infeasible;
    for (std::size_t i = 0; i < points.size(); ++i) (points[i].dat >= 0.0 ? feasible : infeasible).push_back(i);

    std::vector<FitnessPoint> fp;
    for (std::size_t i : feasible) fp.push_back(points[i]);

    std::vector<std::size_t> chosen;
    for (const auto& front : fast_nondominated_sort(fp)) {
        if (chosen.size() == omega) break;
        if (chosen.size() + front.size() <= omega) {
            for (std::size_t k : front) chosen.push_back(feasible[k]);
            continue;
        }
        std::vector<FitnessPoint> members;
        for (std::size_t k : front) members.push_back(fp[k]);
        const auto dist = crowding_distance(members);
        std::vector<std::size_t> order(front.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return dist[x] > dist[y]; });
        for (std::size_t k = 0; chosen.size() < omega; ++k) chosen.push_back(feasible[front[order[k]]]);
    }
    std::stable_sort(infeasible.begin(), infeasible.end(),
                     [&](std::size_t x, std::size_t y) { return points[x].dat > points[y].dat; });
    for (std::size_t k = 0; chosen.size() < omega; ++k) chosen.push_back(infeasible[k]);
    return chosen;
}

inline std::vector<FitnessPoint> fitness_of(std::span<const Individual> pop) {
    std::vector<FitnessPoint> out;
    out.reserve(pop.size());
    for (const auto& ind : pop) {
        if (!ind.evaluation) throw ValidationError("individual has not been evaluated");
        out.push_back(ind.evaluation->fitness);
    }
    return out;
}

/// Reduces a 2*omega pool back to omega individuals.
inline std::vector<Individual> elite_select(std::vector<Individual> pool, std::size_t omega) {
    if (pool.size() != 2 * omega)
        throw ValidationError("elite selection expects 2*omega=" + std::to_string(2 * omega) + " individuals, got " +
                              std::to_string(pool.size()));
    const auto points = fitness_of(pool);
    std::vector<Individual> out;
    out.reserve(omega);
    for (std::size_t i : elite_select_indices(points, omega)) out.push_back(std::move(pool[i]));
    return out;
}

struct ArchiveEntry {
    FitnessPoint fitness;
    Individual individual;
};

/// All-time non-dominated set of feasible solutions.
struct ParetoArchive {
    std::vector<ArchiveEntry> entries;  // sorted by dari ascending
    std::vector<double> hv_history;
    std::vector<std::vector<FitnessPoint>> front_history;

    /// Inserts the individual unless it is infeasible, dominated, or equal
    /// to an archived point. Returns true when inserted.
    bool offer(const Individual& ind) {
        if (!ind.evaluation) throw ValidationError("individual has not been evaluated");
        const FitnessPoint p = ind.evaluation->fitness;
        if (p.dat < 0.0) return false;
        for (const auto& e : entries)
            if (e.fitness == p || dominates(e.fitness, p)) return false;
        std::erase_if(entries, [&](const ArchiveEntry& e) { return dominates(p, e.fitness); });
        auto pos = std::lower_bound(entries.begin(), entries.end(), p, [](const ArchiveEntry& e, const FitnessPoint& q) {
            return e.fitness.dari < q.dari;
        });
        entries.insert(pos, ArchiveEntry{p, ind});
        return true;
    }

    std::vector<FitnessPoint> points() const {
        std::vector<FitnessPoint> out;
        for (const auto& e : entries) out.push_back(e.fitness);
        return out;
    }

    double hypervolume() const {
        const auto pts = points();
        return hypervolume_2d(pts);
    }

    /// Farthest-left, exact-center and farthest-right entries along dari.
    std::optional<std::array<const ArchiveEntry*, 3>> representatives() const {
        if (entries.empty()) return std::nullopt;
        return std::array<const ArchiveEntry*, 3>{&entries.front(), &entries[(entries.size() - 1) / 2],
                                                  &entries.back()};
    }
};

struct IterationStats {
    std::size_t iteration = 0;
    double hypervolume = 0.0;
    std::size_t front_size = 0;  // |F0| of the population
    std::size_t archive_size = 0;
    double best_dari = 0.0;
    double best_dat = 0.0;
    std::array<double, 3> modularity{};  // left, center, right archive solutions
    std::array<FitnessPoint, 3> representative{};
};

struct UcdRun {
    AttackConfig config;
    std::size_t budget = 0;
    Partition ground_truth;
    ParetoArchive archive;
    std::vector<Individual> population;
    std::vector<Individual> final_front;
    std::vector<IterationStats> iterations;
    std::size_t detector_calls = 0;
};

/// Observer hook called with every freshly evaluated batch (tests use it to
/// audit every individual the optimizer ever scores).
using EvaluationObserver = std::function<void(std::span<const Individual>)>;

/// Degree-preserving NSGA-II attack: initialization, then per iteration
/// random disjoint pairing with crossover, mutation, fitness, elite
/// selection and archive update.
inline UcdRun run_ucd(const Graph& g, const AttackConfig& config, const EvaluationObserver& observer = {}) {
    config.validate();
    UcdRun run;
    run.config = config;
    run.budget = config.resolved_budget(g);
    run.config.budget = run.budget;
    run.ground_truth = detect(g, config.detector, config.detector_seed);

    Rng rng(config.seed);
    FitnessEvaluator evaluator(g, run.ground_truth, config.detector, run.budget, config.seed, config.threads);

    auto population = initialize_population(g, config.omega, run.budget, rng);
    evaluator.evaluate(population, 0);
    if (observer) observer(population);
    for (const auto& ind : population) run.archive.offer(ind);

    auto within_budget = [&](const Individual& ind) {
        return edge_set_difference_size(g, ind.perturbed) <= run.budget;
    };

    for (std::size_t it = 1; it <= config.max_iterations; ++it) {
        std::vector<std::size_t> order(population.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        rng.shuffle(order);

        std::vector<Individual> children;
        children.reserve(population.size());
        for (std::size_t k = 0; k + 1 < order.size(); k += 2) {
            const auto& p1 = population[order[k]];
            const auto& p2 = population[order[k + 1]];
            auto [c1, c2] = crossover(p1, p2, config.p_c, rng);
            if (!within_budget(c1)) c1 = p1;
            if (!within_budget(c2)) c2 = p2;
            children.push_back(std::move(c1));
            children.push_back(std::move(c2));
        }
        for (auto& child : children) {
            auto mutated = mutate(child, config.p_m, config.bias, run.ground_truth, rng);
            if (within_budget(mutated)) child = std::move(mutated);
        }

        evaluator.evaluate(children, it);
        if (observer) observer(children);
        for (const auto& c : children) run.archive.offer(c);

        std::vector<Individual> pool = std::move(population);
        for (auto& c : children) pool.push_back(std::move(c));
        population = elite_select(std::move(pool), config.omega);

        const auto points = fitness_of(population);
        const auto fronts = fast_nondominated_sort(points);
        std::vector<FitnessPoint> f0;
        for (std::size_t i : fronts.front()) f0.push_back(points[i]);

        IterationStats stats;
        stats.iteration = it;
        stats.hypervolume = run.archive.hypervolume();
        stats.front_size = f0.size();
        stats.archive_size = run.archive.entries.size();
        for (const auto& e : run.archive.entries) {
            stats.best_dari = std::max(stats.best_dari, e.fitness.dari);
            stats.best_dat = std::max(stats.best_dat, e.fitness.dat);
        }
        if (auto reps = run.archive.representatives()) {
            for (std::size_t r = 0; r < 3; ++r) {
                stats.modularity[r] = (*reps)[r]->individual.evaluation->modularity;
                stats.representative[r] = (*reps)[r]->fitness;
            }
        }
        run.archive.hv_history.push_back(stats.hypervolume);
        run.archive.front_history.push_back(std::move(f0));
        run.iterations.push_back(stats);
    }

    const auto points = fitness_of(population);
    const auto fronts = fast_nondominated_sort(points);
    for (std::size_t i : fronts.front()) run.final_front.push_back(population[i]);
    run.population = std::move(population);
    run.detector_calls = evaluator.detector_calls();
    return run;
}

} // namespace ucd
