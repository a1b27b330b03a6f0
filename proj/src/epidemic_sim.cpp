#include "netsir/epidemic_sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>

namespace netsir {

namespace {

enum : std::uint8_t { kS = 0, kI = 1, kR = 2 };

class GridRecorder {
public:
    GridRecorder(const std::vector<double>& grid, Trajectory& tr) : grid_(grid), tr_(tr) {
        tr_.times = grid;
        tr_.S.reserve(grid.size());
        tr_.I.reserve(grid.size());
        tr_.R.reserve(grid.size());
    }
    // Records every grid time strictly before t with the current counts.
    void until(double t, int s, int i, int r) {
        while (next_ < grid_.size() && grid_[next_] < t) push(s, i, r);
    }
    void finish(int s, int i, int r) {
        while (next_ < grid_.size()) push(s, i, r);
    }

private:
    void push(int s, int i, int r) {
        tr_.S.push_back(s);
        tr_.I.push_back(i);
        tr_.R.push_back(r);
        ++next_;
    }
    const std::vector<double>& grid_;
    Trajectory& tr_;
    std::size_t next_ = 0;
};

double exponential(std::mt19937_64& rng, double rate) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    return -std::log1p(-u(rng)) / rate;
}

double uniform01(std::mt19937_64& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

// Set of ids with O(1) insert, erase and uniform draw.
class IndexedSet {
public:
    explicit IndexedSet(std::size_t universe) : pos_(universe, -1) {}
    bool contains(int id) const { return pos_[static_cast<std::size_t>(id)] >= 0; }
    void insert(int id) {
        if (contains(id)) return;
        pos_[static_cast<std::size_t>(id)] = static_cast<int>(items_.size());
        items_.push_back(id);
    }
    void erase(int id) {
        const int p = pos_[static_cast<std::size_t>(id)];
        if (p < 0) return;
        const int last = items_.back();
        items_[static_cast<std::size_t>(p)] = last;
        pos_[static_cast<std::size_t>(last)] = p;
        items_.pop_back();
        pos_[static_cast<std::size_t>(id)] = -1;
    }
    std::size_t size() const { return items_.size(); }
    bool empty() const { return items_.empty(); }
    int at(std::size_t k) const { return items_[k]; }
    const std::vector<int>& items() const { return items_; }

private:
    std::vector<int> items_;
    std::vector<int> pos_;
};

void check_bookkeeping(const Graph& g, const std::vector<std::uint8_t>& state, const std::vector<std::uint8_t>& alive,
                       const IndexedSet& si) {
    std::vector<int> expected;
    for (int e = 0; e < static_cast<int>(g.edges.size()); ++e) {
        if (!alive[static_cast<std::size_t>(e)]) continue;
        const auto [u, v] = g.edges[static_cast<std::size_t>(e)];
        const auto su = state[static_cast<std::size_t>(u)], sv = state[static_cast<std::size_t>(v)];
        if ((su == kS && sv == kI) || (su == kI && sv == kS)) expected.push_back(e);
    }
    std::vector<int> actual = si.items();
    std::sort(actual.begin(), actual.end());
    if (actual != expected) throw std::logic_error("live S-I edge set diverged from a full recount");
}

}  // namespace

Trajectory gillespie_run(const Graph& graph, const ModelParams& params, const std::vector<int>& initial_infectives,
                         std::uint64_t seed, const std::vector<double>& grid, bool verify_bookkeeping) {
    params.validate();
    if (initial_infectives.empty()) throw std::invalid_argument("need at least one initial infective");
    const int n = graph.n;
    std::vector<std::uint8_t> state(static_cast<std::size_t>(n), kS);
    std::vector<std::uint8_t> alive(graph.edges.size(), 1);
    IndexedSet si(graph.edges.size());
    IndexedSet infectives(static_cast<std::size_t>(n));
    std::mt19937_64 rng(seed);

    Trajectory tr;
    tr.n = n;
    GridRecorder rec(grid, tr);
    int S = n, I = 0, R = 0;

    const auto infect = [&](int v) {
        state[static_cast<std::size_t>(v)] = kI;
        infectives.insert(v);
        --S;
        ++I;
        for (int e : graph.incident(v)) {
            if (!alive[static_cast<std::size_t>(e)]) continue;
            const int u = graph.other_end(e, v);
            if (u == v) continue;
            if (state[static_cast<std::size_t>(u)] == kI)
                si.erase(e);
            else if (state[static_cast<std::size_t>(u)] == kS)
                si.insert(e);
        }
    };
    const auto recover = [&](int v) {
        state[static_cast<std::size_t>(v)] = kR;
        infectives.erase(v);
        --I;
        ++R;
        for (int e : graph.incident(v)) si.erase(e);
    };

    for (int v : initial_infectives) {
        if (v < 0 || v >= n) throw std::invalid_argument("initial infective out of range");
        if (state[static_cast<std::size_t>(v)] != kS) throw std::invalid_argument("duplicate initial infective");
        infect(v);
    }
    if (verify_bookkeeping) check_bookkeeping(graph, state, alive, si);

    const double a = params.edge_rate();
    const double p_transmit = a > 0.0 ? params.beta / a : 0.0;
    double t = 0.0;
    while (I > 0) {
        const double edge_total = a * static_cast<double>(si.size());
        const double total = edge_total + params.gamma * static_cast<double>(I);
        if (!(total > 0.0)) break;
        const double t_next = t + exponential(rng, total);
        rec.until(t_next, S, I, R);
        t = t_next;
        if (uniform01(rng) * total < edge_total) {
            const int e = si.at(uniform_index(rng, si.size()));
            if (uniform01(rng) < p_transmit) {
                const auto [u, v] = graph.edges[static_cast<std::size_t>(e)];
                infect(state[static_cast<std::size_t>(u)] == kS ? u : v);
            } else {
                alive[static_cast<std::size_t>(e)] = 0;
                si.erase(e);
            }
        } else {
            recover(infectives.at(uniform_index(rng, infectives.size())));
        }
        if (verify_bookkeeping) check_bookkeeping(graph, state, alive, si);
    }
    rec.finish(S, I, R);
    tr.final_size = n - S;
    tr.extinction_time = t;
    return tr;
}

Trajectory effective_degree_run(const std::vector<int>& degree_sequence, const ModelParams& params,
                                const std::vector<long>& initial_per_degree, std::uint64_t seed,
                                const std::vector<double>& grid) {
    params.validate();
    if (degree_sequence.empty()) throw std::invalid_argument("degree sequence is empty");
    const int m = *std::max_element(degree_sequence.begin(), degree_sequence.end());
    if (m < 0 || *std::min_element(degree_sequence.begin(), degree_sequence.end()) < 0)
        throw std::invalid_argument("degrees must be nonnegative");
    if (static_cast<int>(initial_per_degree.size()) > m + 1)
        throw std::invalid_argument("initial infectives have degrees beyond the sequence");

    std::vector<long> X(static_cast<std::size_t>(m) + 1, 0), Y(static_cast<std::size_t>(m) + 1, 0);
    for (int d : degree_sequence) ++X[static_cast<std::size_t>(d)];
    long i0 = 0;
    for (std::size_t k = 0; k < initial_per_degree.size(); ++k) {
        if (initial_per_degree[k] < 0 || initial_per_degree[k] > X[k])
            throw std::invalid_argument("more initial infectives than nodes of that degree");
        X[k] -= initial_per_degree[k];
        Y[k] += initial_per_degree[k];
        i0 += initial_per_degree[k];
    }
    if (i0 == 0) throw std::invalid_argument("need at least one initial infective");

    long XE = 0, YE = 0, Z = 0;
    for (int k = 0; k <= m; ++k) {
        XE += k * X[static_cast<std::size_t>(k)];
        YE += k * Y[static_cast<std::size_t>(k)];
    }
    const int n = static_cast<int>(degree_sequence.size());
    int S = n - static_cast<int>(i0), I = static_cast<int>(i0), R = 0;

    std::mt19937_64 rng(seed);
    Trajectory tr;
    tr.n = n;
    GridRecorder rec(grid, tr);
    const double a = params.edge_rate();
    const double p_transmit = a > 0.0 ? params.beta / a : 0.0;
    const auto shift = [](std::vector<long>& v, int from, int to, long& stubs) {
        --v[static_cast<std::size_t>(from)];
        ++v[static_cast<std::size_t>(to)];
        stubs -= from - to;
    };

    double t = 0.0;
    while (I > 0) {
        const long T = XE + YE + Z;
        const double fire = T >= 2 ? a * static_cast<double>(YE) : 0.0;
        const double total = fire + params.gamma * static_cast<double>(I);
        if (!(total > 0.0)) break;
        const double t_next = t + exponential(rng, total);
        rec.until(t_next, S, I, R);
        t = t_next;

        if (uniform01(rng) * total < fire) {
            // firing infective chosen in proportion to its free stubs
            long pick = std::uniform_int_distribution<long>(0, YE - 1)(rng);
            int i = 1;
            for (; i <= m; ++i) {
                pick -= i * Y[static_cast<std::size_t>(i)];
                if (pick < 0) break;
            }
            // partner uniform over the other T - 1 free stubs
            long r = std::uniform_int_distribution<long>(0, T - 2)(rng);
            if (r < i - 1) {
                shift(Y, i, i - 2, YE);
                continue;
            }
            r -= i - 1;
            if (r < XE) {
                int j = 1;
                for (; j <= m; ++j) {
                    r -= j * X[static_cast<std::size_t>(j)];
                    if (r < 0) break;
                }
                shift(Y, i, i - 1, YE);
                if (uniform01(rng) < p_transmit) {
                    --X[static_cast<std::size_t>(j)];
                    XE -= j;
                    ++Y[static_cast<std::size_t>(j - 1)];
                    YE += j - 1;
                    --S;
                    ++I;
                } else {
                    shift(X, j, j - 1, XE);
                }
                continue;
            }
            r -= XE;
            const long other_inf = YE - i;
            if (r < other_inf) {
                int j = 1;
                for (; j <= m; ++j) {
                    r -= j * Y[static_cast<std::size_t>(j)] - (j == i ? i : 0);
                    if (r < 0) break;
                }
                shift(Y, i, i - 1, YE);
                shift(Y, j, j - 1, YE);
                continue;
            }
            --Z;
            shift(Y, i, i - 1, YE);
        } else {
            long pick = std::uniform_int_distribution<long>(0, I - 1)(rng);
            int i = 0;
            for (; i <= m; ++i) {
                pick -= Y[static_cast<std::size_t>(i)];
                if (pick < 0) break;
            }
            --Y[static_cast<std::size_t>(i)];
            YE -= i;
            Z += i;
            --I;
            ++R;
        }
    }
    rec.finish(S, I, R);
    tr.final_size = n - S;
    tr.extinction_time = t;
    return tr;
}

namespace {

std::vector<long> largest_remainder(const std::vector<double>& weights, long total) {
    const double wsum = std::accumulate(weights.begin(), weights.end(), 0.0);
    std::vector<long> out(weights.size(), 0);
    if (wsum <= 0.0 || total == 0) return out;
    std::vector<std::pair<double, std::size_t>> rem;
    long assigned = 0;
    for (std::size_t k = 0; k < weights.size(); ++k) {
        const double exact = static_cast<double>(total) * weights[k] / wsum;
        out[k] = static_cast<long>(std::floor(exact));
        assigned += out[k];
        rem.emplace_back(exact - static_cast<double>(out[k]), k);
    }
    std::stable_sort(rem.begin(), rem.end(), [](const auto& l, const auto& r) { return l.first > r.first; });
    for (std::size_t q = 0; assigned < total && q < rem.size(); ++q, ++assigned) ++out[rem[q].second];
    return out;
}

}  // namespace

std::vector<long> proportional_initial_counts(const std::vector<int>& degree_sequence, int i0) {
    if (i0 < 1 || i0 > static_cast<int>(degree_sequence.size()))
        throw std::invalid_argument("initial infective count out of range");
    const int m = *std::max_element(degree_sequence.begin(), degree_sequence.end());
    std::vector<double> freq(static_cast<std::size_t>(m) + 1, 0.0);
    for (int d : degree_sequence) freq[static_cast<std::size_t>(d)] += 1.0;
    auto counts = largest_remainder(freq, i0);
    for (std::size_t k = 0; k < counts.size(); ++k) counts[k] = std::min(counts[k], static_cast<long>(freq[k]));
    return counts;
}

std::vector<int> choose_initial_by_degree(const std::vector<int>& degree_sequence, int i0, std::uint64_t seed) {
    const auto counts = proportional_initial_counts(degree_sequence, i0);
    std::vector<std::vector<int>> by_degree(counts.size());
    for (int v = 0; v < static_cast<int>(degree_sequence.size()); ++v)
        by_degree[static_cast<std::size_t>(degree_sequence[static_cast<std::size_t>(v)])].push_back(v);
    std::mt19937_64 rng(seed);
    std::vector<int> out;
    for (std::size_t k = 0; k < counts.size(); ++k) {
        auto& pool = by_degree[k];
        for (long c = 0; c < counts[k]; ++c) {
            const std::size_t j = static_cast<std::size_t>(c) + uniform_index(rng, pool.size() - static_cast<std::size_t>(c));
            std::swap(pool[static_cast<std::size_t>(c)], pool[j]);
            out.push_back(pool[static_cast<std::size_t>(c)]);
        }
    }
    return out;
}

std::vector<int> choose_initial_uniform(int n, int i0, std::uint64_t seed) {
    if (i0 < 1 || i0 > n) throw std::invalid_argument("initial infective count out of range");
    std::vector<int> nodes(static_cast<std::size_t>(n));
    std::iota(nodes.begin(), nodes.end(), 0);
    std::mt19937_64 rng(seed);
    for (int c = 0; c < i0; ++c) {
        const std::size_t j = static_cast<std::size_t>(c) + uniform_index(rng, static_cast<std::size_t>(n - c));
        std::swap(nodes[static_cast<std::size_t>(c)], nodes[j]);
    }
    nodes.resize(static_cast<std::size_t>(i0));
    return nodes;
}

std::vector<int> mr_degree_sequence(const DegreeDistribution& dist, int n) {
    if (n < 1) throw std::invalid_argument("node count must be positive");
    const auto counts = largest_remainder(dist.pmf(), n);
    std::vector<int> seq;
    seq.reserve(static_cast<std::size_t>(n));
    for (std::size_t k = 0; k < counts.size(); ++k) seq.insert(seq.end(), static_cast<std::size_t>(counts[k]), static_cast<int>(k));
    return seq;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    // splitmix64 finalizer over a combination of both inputs
    std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

Trajectory simulate_once(const EnsembleConfig& config, std::uint64_t seed) {
    const std::uint64_t structure_seed = derive_seed(seed, 1);
    const std::uint64_t initial_seed = derive_seed(seed, 2);
    std::vector<int> seq;
    if (config.network == NetworkKind::mr)
        seq = config.degree_sequence.empty() ? mr_degree_sequence(config.dist, config.n) : config.degree_sequence;
    else
        seq = sample_degrees(config.dist, config.n, structure_seed);

    if (config.engine == Engine::gillespie) {
        const Graph g = build_mr(seq, derive_seed(structure_seed, 3));
        const auto init = config.network == NetworkKind::mr ? choose_initial_by_degree(seq, config.i0, initial_seed)
                                                            : choose_initial_uniform(g.n, config.i0, initial_seed);
        return gillespie_run(g, config.params, init, seed, config.grid);
    }
    std::vector<long> counts;
    if (config.network == NetworkKind::mr) {
        counts = proportional_initial_counts(seq, config.i0);
    } else {
        const auto init = choose_initial_uniform(static_cast<int>(seq.size()), config.i0, initial_seed);
        counts.assign(static_cast<std::size_t>(*std::max_element(seq.begin(), seq.end())) + 1, 0);
        for (int v : init) ++counts[static_cast<std::size_t>(seq[static_cast<std::size_t>(v)])];
    }
    return effective_degree_run(seq, config.params, counts, seed, config.grid);
}

int worker_count(int requested, int n_tasks) {
    int w = requested;
    if (w <= 0) {
        if (const char* env = std::getenv("NETSIR_THREADS")) w = std::atoi(env);
        if (w <= 0) w = static_cast<int>(std::thread::hardware_concurrency());
    }
    return std::max(1, std::min(w, n_tasks));
}

RunEnsemble run_ensemble(const EnsembleConfig& config, int n_runs, std::uint64_t master_seed) {
    if (n_runs < 1) throw std::invalid_argument("need at least one run");
    RunEnsemble ens;
    ens.n = config.network == NetworkKind::mr && !config.degree_sequence.empty()
                ? static_cast<int>(config.degree_sequence.size())
                : config.n;
    ens.grid = config.grid;
    ens.seeds.resize(static_cast<std::size_t>(n_runs));
    ens.final_sizes.resize(static_cast<std::size_t>(n_runs));
    ens.extinction_times.resize(static_cast<std::size_t>(n_runs));
    if (config.keep_trajectories) ens.trajectories.resize(static_cast<std::size_t>(n_runs));
    for (int r = 0; r < n_runs; ++r) ens.seeds[static_cast<std::size_t>(r)] = derive_seed(master_seed, static_cast<std::uint64_t>(r));

    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    const auto work = [&] {
        for (int r = next++; r < n_runs && !failed; r = next++) {
            try {
                auto tr = simulate_once(config, ens.seeds[static_cast<std::size_t>(r)]);
                ens.final_sizes[static_cast<std::size_t>(r)] = tr.final_size;
                ens.extinction_times[static_cast<std::size_t>(r)] = tr.extinction_time;
                if (config.keep_trajectories) ens.trajectories[static_cast<std::size_t>(r)] = std::move(tr);
            } catch (...) {
                if (!failed.exchange(true)) failure = std::current_exception();
            }
        }
    };
    const int workers = worker_count(config.threads, n_runs);
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);
    return ens;
}

MajorSplit classify_major(const RunEnsemble& ensemble, double threshold_fraction) {
    if (!(threshold_fraction > 0.0 && threshold_fraction < 1.0))
        throw std::invalid_argument("major-outbreak threshold must lie in (0,1)");
    if (ensemble.final_sizes.empty()) throw std::invalid_argument("ensemble is empty");
    MajorSplit split;
    const double cut = threshold_fraction * ensemble.n;
    for (int f : ensemble.final_sizes) (f > cut ? split.major : split.minor).push_back(f);
    split.p_hat = static_cast<double>(split.major.size()) / static_cast<double>(ensemble.final_sizes.size());
    return split;
}

TrajectorySummary summarize_trajectories(const RunEnsemble& ensemble) {
    if (ensemble.trajectories.empty()) throw std::invalid_argument("ensemble kept no trajectories");
    TrajectorySummary s;
    s.times = ensemble.grid;
    const std::size_t g = s.times.size();
    const double runs = static_cast<double>(ensemble.trajectories.size());
    const auto moments = [&](auto member, std::vector<double>& mean, std::vector<double>& sd) {
        mean.assign(g, 0.0);
        sd.assign(g, 0.0);
        for (std::size_t k = 0; k < g; ++k) {
            double m = 0.0;
            for (const auto& tr : ensemble.trajectories) m += (tr.*member)[k];
            m /= runs;
            double v = 0.0;
            for (const auto& tr : ensemble.trajectories) v += ((tr.*member)[k] - m) * ((tr.*member)[k] - m);
            mean[k] = m;
            sd[k] = runs > 1.0 ? std::sqrt(v / (runs - 1.0)) : 0.0;
        }
    };
    moments(&Trajectory::S, s.S_mean, s.S_sd);
    moments(&Trajectory::I, s.I_mean, s.I_sd);
    moments(&Trajectory::R, s.R_mean, s.R_sd);
    return s;
}

}  // namespace netsir
