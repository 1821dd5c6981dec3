#pragma once

#include <algorithm>
#include <array>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include "ucd/detection.hpp"
#include "ucd/error.hpp"
#include "ucd/graph.hpp"
#include "ucd/metrics.hpp"
#include "ucd/parallel.hpp"
#include "ucd/perturbation.hpp"
#include "ucd/random.hpp"

namespace ucd {

/// A fixed-size set of unconstrained edge edits: deletions of existing
/// links and additions of absent ones. Both lists stay sorted.
struct EditGenome {
    std::vector<Edge> deletions;
    std::vector<Edge> additions;

    std::size_t size() const { return deletions.size() + additions.size(); }
    auto operator<=>(const EditGenome&) const = default;
};

/// Throws unless the genome holds exactly `budget` distinct edits that are
/// valid deletions/additions on g.
inline void check_genome(const Graph& g, const EditGenome& genome, std::size_t budget) {
    if (genome.size() != budget)
        throw ValidationError("genome holds " + std::to_string(genome.size()) + " edits, budget is " +
                              std::to_string(budget));
    auto distinct = [](const std::vector<Edge>& v) {
        return std::is_sorted(v.begin(), v.end()) && std::adjacent_find(v.begin(), v.end()) == v.end();
    };
    if (!distinct(genome.deletions) || !distinct(genome.additions))
        throw ValidationError("genome edits must be sorted and distinct");
    for (const Edge& e : genome.deletions)
        if (e.v >= g.node_count() || !g.has_edge(e.u, e.v)) throw ValidationError("deletion of a missing link");
    for (const Edge& e : genome.additions)
        if (e.u == e.v || e.v >= g.node_count() || g.has_edge(e.u, e.v))
            throw ValidationError("addition of an existing link or self-loop");
}

inline Graph apply_genome(Graph g, const EditGenome& genome) {
    for (const Edge& e : genome.deletions) g.remove_edge(e.u, e.v);
    for (const Edge& e : genome.additions) g.add_edge(e.u, e.v);
    return g;
}

inline std::size_t non_edge_count(const Graph& g) {
    const std::size_t n = g.node_count();
    return n * (n - 1) / 2 - g.edge_count();
}

struct GaqConfig {
    std::size_t omega = 30;
    double p_c = 0.5;
    double p_m = 0.8;
    std::size_t max_iterations = 500;
    std::uint64_t detector_seed = 0;  // pins the clean detection
    std::uint64_t seed = 1;
    unsigned threads = 1;

    void validate() const {
        if (omega < 2 || omega % 2 != 0) throw ValidationError("population size must be even and at least 2");
        if (!(p_c >= 0.0 && p_c <= 1.0)) throw ValidationError("crossover probability must lie in [0, 1]");
        if (!(p_m >= 0.0 && p_m <= 1.0)) throw ValidationError("mutation probability must lie in [0, 1]");
        if (max_iterations < 1) throw ValidationError("max_iterations must be at least 1");
    }
};

struct GaqResult {
    EditGenome best;
    Graph perturbed;
    double best_fitness = 0.0;        // modularity decrease of `best`
    std::vector<double> trace;        // best fitness after initialization and each generation
    std::size_t detector_calls = 0;
};

/// Hook to audit every genome the GA produces (after each operator).
using GenomeObserver = std::function<void(const EditGenome&)>;

namespace detail {

class EditSampler {
public:
    explicit EditSampler(const Graph& g) : g_(g), edges_(g.edges()) {}

    // A fresh edit not already in the genome; deletion or addition with
    // equal probability when both are available.
    std::pair<bool, Edge> fresh(const EditGenome& genome, Rng& rng) const {
        const bool can_delete = genome.deletions.size() < edges_.size();
        const bool can_add = genome.additions.size() < non_edge_count(g_);
        if (!can_delete && !can_add) throw ValidationError("no edit left to sample");
        const bool del = can_delete && (!can_add || rng.bernoulli(0.5));
        if (del) {
            while (true) {
                const Edge e = rng.pick(edges_);
                if (!std::binary_search(genome.deletions.begin(), genome.deletions.end(), e)) return {true, e};
            }
        }
        const auto n = g_.node_count();
        while (true) {
            const auto u = static_cast<NodeId>(rng.index(n));
            const auto v = static_cast<NodeId>(rng.index(n));
            if (u == v || g_.has_edge(u, v)) continue;
            const Edge e(u, v);
            if (!std::binary_search(genome.additions.begin(), genome.additions.end(), e)) return {false, e};
        }
    }

    void insert(EditGenome& genome, bool deletion, const Edge& e) const {
        auto& list = deletion ? genome.deletions : genome.additions;
        list.insert(std::lower_bound(list.begin(), list.end(), e), e);
    }

    EditGenome random(std::size_t budget, Rng& rng) const {
        EditGenome genome;
        while (genome.size() < budget) {
            auto [del, e] = fresh(genome, rng);
            insert(genome, del, e);
        }
        return genome;
    }

private:
    const Graph& g_;
    std::vector<Edge> edges_;
};

// Tagged edit: first = true for a deletion.
using TaggedEdit = std::pair<bool, Edge>;

inline std::vector<TaggedEdit> tagged(const EditGenome& g) {
    std::vector<TaggedEdit> out;
    for (const Edge& e : g.deletions) out.emplace_back(true, e);
    for (const Edge& e : g.additions) out.emplace_back(false, e);
    return out;
}

// Shared edits go to both children; each remaining edit of either parent
// goes to one child at random. Children are then repaired to the budget by
// dropping random non-shared edits or drawing fresh ones.
inline std::pair<EditGenome, EditGenome> uniform_crossover(const EditGenome& p1, const EditGenome& p2,
                                                          std::size_t budget, const EditSampler& sampler,
                                                          Rng& rng) {
    const auto a = tagged(p1);
    const auto b = tagged(p2);
    const std::set<TaggedEdit> in_a(a.begin(), a.end());
    const std::set<TaggedEdit> in_b(b.begin(), b.end());
    std::vector<TaggedEdit> shared;
    std::vector<TaggedEdit> rest;
    for (const auto& t : a) (in_b.count(t) ? shared : rest).push_back(t);
    for (const auto& t : b)
        if (!in_a.count(t)) rest.push_back(t);

    std::array<std::vector<TaggedEdit>, 2> own;
    for (const auto& t : rest) own[rng.bernoulli(0.5) ? 0 : 1].push_back(t);

    std::array<EditGenome, 2> children;
    for (std::size_t k = 0; k < 2; ++k) {
        rng.shuffle(own[k]);
        const std::size_t room = budget - shared.size();
        if (own[k].size() > room) own[k].resize(room);
        for (const auto& [del, e] : shared) sampler.insert(children[k], del, e);
        for (const auto& [del, e] : own[k]) sampler.insert(children[k], del, e);
        while (children[k].size() < budget) {
            auto [del, e] = sampler.fresh(children[k], rng);
            sampler.insert(children[k], del, e);
        }
    }
    return {std::move(children[0]), std::move(children[1])};
}

// Replaces one random edit by a fresh one.
inline void swap_one_edit(EditGenome& genome, const EditSampler& sampler, Rng& rng) {
    if (genome.size() == 0) return;
    auto [del, e] = sampler.fresh(genome, rng);
    const std::size_t victim = rng.index(genome.size());
    if (victim < genome.deletions.size())
        genome.deletions.erase(genome.deletions.begin() + static_cast<std::ptrdiff_t>(victim));
    else
        genome.additions.erase(genome.additions.begin() +
                               static_cast<std::ptrdiff_t>(victim - genome.deletions.size()));
    sampler.insert(genome, del, e);
}

} // namespace detail

/// Single-objective GA baseline: maximizes the modularity decrease
/// Q(clean graph, clean detection) - Q(perturbed, detection on perturbed)
/// over exactly `budget` unconstrained edge edits.
///
/// Each genome is scored once (fitness is cached per genome), and survivors
/// are the best omega of parents plus children, so the trace never drops.
inline GaqResult run_gaq(const Graph& g, Detector detector, std::size_t budget, const GaqConfig& config,
                         const GenomeObserver& observer = {}) {
    config.validate();
    if (budget > g.edge_count() || budget > non_edge_count(g))
        throw ValidationError("budget " + std::to_string(budget) + " exceeds the deletable or addable link count");

    GaqResult result;
    result.perturbed = g;
    if (budget == 0) {
        result.trace.assign(config.max_iterations + 1, 0.0);
        return result;
    }

    const double clean_q = modularity(g, detect(g, detector, config.detector_seed));
    detail::EditSampler sampler(g);
    Rng rng(config.seed);
    std::map<EditGenome, double> cache;

    auto score = [&](std::vector<EditGenome>& genomes, std::size_t iteration) {
        std::vector<std::size_t> todo;
        std::map<EditGenome, std::size_t> pending;
        for (std::size_t i = 0; i < genomes.size(); ++i)
            if (!cache.count(genomes[i]) && pending.emplace(genomes[i], i).second) todo.push_back(i);
        std::vector<double> values(todo.size());
        parallel_for(todo.size(), config.threads, [&](std::size_t j) {
            const auto perturbed = apply_genome(g, genomes[todo[j]]);
            const auto found = detect(perturbed, detector, derive_seed({config.seed, iteration, todo[j]}));
            values[j] = clean_q - modularity(perturbed, found);
        });
        for (std::size_t j = 0; j < todo.size(); ++j) cache.emplace(genomes[todo[j]], values[j]);
        result.detector_calls += todo.size();
    };
    auto audit = [&](const EditGenome& genome) {
        if (observer) observer(genome);
    };

    std::vector<EditGenome> population;
    for (std::size_t i = 0; i < config.omega; ++i) {
        population.push_back(sampler.random(budget, rng));
        audit(population.back());
    }
    score(population, 0);

    auto best_of = [&](const std::vector<EditGenome>& pop) {
        return *std::max_element(pop.begin(), pop.end(), [&](const EditGenome& x, const EditGenome& y) {
            return cache.at(x) < cache.at(y);
        });
    };
    result.trace.push_back(cache.at(best_of(population)));

    for (std::size_t it = 1; it <= config.max_iterations; ++it) {
        std::vector<std::size_t> order(population.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        rng.shuffle(order);
        std::vector<EditGenome> children;
        for (std::size_t k = 0; k + 1 < order.size(); k += 2) {
            const auto& p1 = population[order[k]];
            const auto& p2 = population[order[k + 1]];
            if (rng.bernoulli(config.p_c)) {
                auto [c1, c2] = detail::uniform_crossover(p1, p2, budget, sampler, rng);
                children.push_back(std::move(c1));
                children.push_back(std::move(c2));
            } else {
                children.push_back(p1);
                children.push_back(p2);
            }
            audit(children[children.size() - 2]);
            audit(children.back());
        }
        for (auto& child : children) {
            if (rng.bernoulli(config.p_m)) {
                detail::swap_one_edit(child, sampler, rng);
                audit(child);
            }
        }
        score(children, it);

        std::vector<EditGenome> pool = std::move(population);
        for (auto& c : children) pool.push_back(std::move(c));
        std::vector<std::size_t> rank(pool.size());
        std::iota(rank.begin(), rank.end(), std::size_t{0});
        std::stable_sort(rank.begin(), rank.end(),
                         [&](std::size_t x, std::size_t y) { return cache.at(pool[x]) > cache.at(pool[y]); });
        population.clear();
        for (std::size_t k = 0; k < config.omega; ++k) population.push_back(pool[rank[k]]);
        result.trace.push_back(cache.at(population.front()));
    }

    result.best = population.front();
    result.best_fitness = cache.at(result.best);
    result.perturbed = apply_genome(g, result.best);
    return result;
}

/// Runs GAQ once per budget and scores each best graph as (DARI, DAT)
/// against the pinned clean detection, with DAT measured on budget T.
inline std::vector<FitnessPoint> gaq_representative_points(const Graph& g, Detector detector,
                                                           std::span<const std::size_t> budgets,
                                                           const GaqConfig& config, std::size_t T) {
    const auto truth = detect(g, detector, config.detector_seed);
    std::vector<FitnessPoint> out;
    for (std::size_t b : budgets) {
        const auto run = run_gaq(g, detector, b, config);
        out.push_back({dari(truth, detect(run.perturbed, detector, config.detector_seed)),
                       dat(g, run.perturbed, T)});
    }
    return out;
}

/// One random degree-preserving perturbation and its fitness.
struct PerturbationSample {
    std::size_t moves = 0;
    std::size_t modified_links = 0;
    FitnessPoint fitness;
};

/// Draws `samples` independent perturbations, each with k ~ U[0, T/4]
/// random rewirings, and scores them with the detector at a pinned seed so
/// the zero-move sample scores exactly (0, 1).
inline std::vector<PerturbationSample> random_perturbations(const Graph& g, Detector detector, std::size_t samples,
                                                            std::size_t T, std::uint64_t seed,
                                                            std::uint64_t detector_seed = 0, unsigned threads = 1) {
    if (samples == 0) throw ValidationError("samples must be at least 1");
    if (T == 0) throw ValidationError("budget T must be positive");
    if (!has_valid_move(g)) throw UnperturbableGraph("graph admits no degree-preserving rewiring");
    const auto truth = detect(g, detector, detector_seed);
    const auto active = detail::active_nodes(g);

    std::vector<PerturbationSample> out(samples);
    parallel_for(samples, threads, [&](std::size_t i) {
        Rng rng(derive_seed({seed, i}));
        const auto k = static_cast<std::size_t>(rng.between(0, static_cast<std::int64_t>(max_initial_moves(T))));
        Individual ind = Individual::clean(g);
        std::size_t failures = 0;
        while (ind.moves.size() < k && failures < 100 * (k + 1)) {
            if (auto m = sample_rewiring(ind.perturbed, rng.pick(active), rng))
                ind.push(*m);
            else
                ++failures;
        }
        const auto modified = edge_set_difference_size(g, ind.perturbed);
        const auto found = detect(ind.perturbed, detector, detector_seed);
        out[i] = {ind.moves.size(), modified, {dari(truth, found), dat_from_modified(modified, T)}};
    });
    return out;
}

} // namespace ucd
