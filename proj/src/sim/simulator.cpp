#include "faasplan/sim/simulator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <limits>
#include <queue>

#include <fmt/format.h>

#include "faasplan/core/errors.hpp"
#include "faasplan/core/parallel.hpp"
#include "faasplan/core/random.hpp"

namespace faasplan::sim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Request {
    std::uint32_t fn = 0;
    double arrival = 0.0;
    double work = 0.0;
};

// CPU job: a request execution or, with loading_uses_cpu, a container load.
struct Job {
    std::uint32_t fn = 0;
    bool load = false;
    std::uint32_t request = 0;  // slot in the request pool when !load
};

template <typename T>
using MinHeap = std::priority_queue<T, std::vector<T>, std::greater<T>>;

class Cpu {
public:
    Cpu(CpuDiscipline discipline, int cores) : discipline_(discipline), cores_(cores) {}

    void add(double t, double work, std::uint32_t job) {
        if (discipline_ == CpuDiscipline::processor_sharing) {
            advance(t);
            ps_.emplace(virtual_ + work, job);
            return;
        }
        if (static_cast<int>(running_.size()) < cores_)
            running_.emplace(t + work, job);
        else
            waiting_.emplace_back(work, job);
    }

    [[nodiscard]] double next_completion() const {
        if (discipline_ == CpuDiscipline::processor_sharing) {
            if (ps_.empty()) return kInf;
            return last_ + std::max(0.0, ps_.top().first - virtual_) / rate();
        }
        return running_.empty() ? kInf : running_.top().first;
    }

    std::uint32_t pop(double t) {
        if (discipline_ == CpuDiscipline::processor_sharing) {
            advance(t);
            const auto job = ps_.top().second;
            ps_.pop();
            return job;
        }
        const auto job = running_.top().second;
        running_.pop();
        if (!waiting_.empty()) {
            running_.emplace(t + waiting_.front().first, waiting_.front().second);
            waiting_.pop_front();
        }
        return job;
    }

private:
    [[nodiscard]] double rate() const {
        const auto n = static_cast<double>(ps_.size());
        return n <= cores_ ? 1.0 : cores_ / n;
    }

    void advance(double t) {
        if (!ps_.empty()) virtual_ += (t - last_) * rate();
        last_ = t;
    }

    CpuDiscipline discipline_;
    int cores_;
    // processor sharing: virtual time grows at the per-job service rate
    double virtual_ = 0.0;
    double last_ = 0.0;
    MinHeap<std::pair<double, std::uint32_t>> ps_;
    // fcfs
    MinHeap<std::pair<double, std::uint32_t>> running_;
    std::deque<std::pair<double, std::uint32_t>> waiting_;
};

template <typename T>
class SlotPool {
public:
    std::uint32_t put(T v) {
        if (!free_.empty()) {
            const auto s = free_.back();
            free_.pop_back();
            items_[s] = v;
            return s;
        }
        items_.push_back(v);
        return static_cast<std::uint32_t>(items_.size() - 1);
    }
    T take(std::uint32_t s) {
        free_.push_back(s);
        return items_[s];
    }
    T& operator[](std::uint32_t s) { return items_[s]; }

private:
    std::vector<T> items_;
    std::vector<std::uint32_t> free_;
};

struct TimerEvent {
    double time;
    std::uint32_t fn;
    std::uint64_t generation;
    bool operator>(const TimerEvent& o) const { return time > o.time; }
};

struct Container {
    ContainerStatus status = ContainerStatus::unloaded;
    std::uint64_t generation = 0;  // bumps invalidate pending idle timers
    std::uint32_t in_service = 0;
    std::vector<std::uint32_t> pending;  // requests waiting for the load
    double active_since = 0.0;           // start of the current loading/busy spell
};

class Run {
public:
    Run(const SimConfig& cfg, std::uint64_t seed)
        : cfg_(cfg),
          n_(cfg.workload.size()),
          cpu_(cfg.cpu, cfg.cores),
          arrivals_rng_(make_stream(seed, StreamId::arrivals)),
          choice_rng_(make_stream(seed, StreamId::function_choice)),
          service_rng_(make_stream(seed, StreamId::service)),
          cold_rng_(make_stream(seed, StreamId::cold_start)),
          containers_(n_),
          responses_(n_),
          busy_time_(n_, 0.0),
          min_slack_(n_, kInf) {
        cumulative_.resize(n_);
        double c = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            c += cfg.workload.functions[i].popularity;
            cumulative_[i] = c;
        }
        out_.seed = seed;
        out_.functions.resize(n_);
    }

    ReplicationResult execute() {
        const double horizon = cfg_.horizon;
        double next_arrival = cfg_.workload.lambda_total > 0.0
                                  ? sample_exponential(cfg_.workload.lambda_total, arrivals_rng_)
                                  : kInf;
        note_memory(0.0);
        for (;;) {
            const double t_disp = dispatch_.empty() ? kInf : dispatch_.front().first;
            const double t_timer = timers_.empty() ? kInf : timers_.top().time;
            const double t_load = loads_.empty() ? kInf : loads_.top().first;
            const double t_cpu = cpu_.next_completion();
            const double t = std::min({next_arrival, t_disp, t_timer, t_load, t_cpu});
            if (t > horizon) break;
            ++out_.events;
            if (t == t_cpu) {
                on_cpu_completion(t);
            } else if (t == t_load) {
                const auto fn = loads_.top().second;
                loads_.pop();
                on_loaded(t, fn);
            } else if (t == t_disp) {
                const auto slot = dispatch_.front().second;
                dispatch_.pop_front();
                on_reach_function(t, slot);
            } else if (t == t_timer) {
                const auto ev = timers_.top();
                timers_.pop();
                auto& c = containers_[ev.fn];
                if (c.generation == ev.generation && c.status == ContainerStatus::idle)
                    set_status(t, ev.fn, ContainerStatus::unloaded);
            } else {
                on_arrival(t);
                next_arrival = t + sample_exponential(cfg_.workload.lambda_total, arrivals_rng_);
            }
        }
        finish(horizon);
        return std::move(out_);
    }

private:
    void on_arrival(double t) {
        ++out_.arrivals_total;
        const double u = std::generate_canonical<double, 53>(choice_rng_) * cumulative_.back();
        auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
        // upper_bound never lands on a zero-popularity entry.
        if (it == cumulative_.end()) --it;
        const auto fn = static_cast<std::uint32_t>(it - cumulative_.begin());
        const auto slot = requests_.put({fn, t, 0.0});
        if (cfg_.dispatcher_delay > 0.0)
            dispatch_.emplace_back(t + cfg_.dispatcher_delay, slot);
        else
            on_reach_function(t, slot);
    }

    void on_reach_function(double t, std::uint32_t slot) {
        const auto fn = requests_[slot].fn;
        auto& c = containers_[fn];
        if (requests_[slot].arrival >= cfg_.warmup) {
            auto& st = out_.functions[fn];
            ++st.arrivals;
            if (c.status == ContainerStatus::idle || c.status == ContainerStatus::busy) ++st.hits;
        }
        switch (c.status) {
            case ContainerStatus::unloaded: {
                c.pending.push_back(slot);
                set_status(t, fn, ContainerStatus::loading);
                const auto& f = cfg_.workload.functions[fn];
                const double work = cfg_.cold_start == ColdStartDistribution::deterministic
                                        ? 1.0 / f.alpha
                                        : sample_exponential(f.alpha, cold_rng_);
                if (cfg_.loading_uses_cpu)
                    cpu_.add(t, work, jobs_.put({fn, true, 0}));
                else
                    loads_.emplace(t + work, fn);
                break;
            }
            case ContainerStatus::loading:
                c.pending.push_back(slot);
                break;
            case ContainerStatus::idle:
                ++c.generation;
                set_status(t, fn, ContainerStatus::busy);
                start_service(t, slot);
                break;
            case ContainerStatus::busy:
                start_service(t, slot);
                break;
        }
    }

    void start_service(double t, std::uint32_t slot) {
        auto& r = requests_[slot];
        r.work = sample_exponential(cfg_.workload.functions[r.fn].mu, service_rng_);
        ++containers_[r.fn].in_service;
        cpu_.add(t, r.work, jobs_.put({r.fn, false, slot}));
    }

    void on_loaded(double t, std::uint32_t fn) {
        auto& c = containers_[fn];
        set_status(t, fn, ContainerStatus::busy);
        auto pending = std::move(c.pending);
        c.pending.clear();
        for (auto slot : pending) start_service(t, slot);
    }

    void on_cpu_completion(double t) {
        const Job job = jobs_.take(cpu_.pop(t));
        if (job.load) {
            on_loaded(t, job.fn);
            return;
        }
        const Request r = requests_.take(job.request);
        ++out_.completions_total;
        if (r.arrival >= cfg_.warmup) {
            const double w = t - r.arrival;
            responses_[r.fn].push_back(w);
            min_slack_[r.fn] = std::min(min_slack_[r.fn], w - r.work);
        }
        auto& c = containers_[r.fn];
        if (--c.in_service > 0) return;
        const double ttl = cfg_.idle_times[r.fn];
        if (ttl <= 0.0) {
            set_status(t, r.fn, ContainerStatus::unloaded);
            return;
        }
        set_status(t, r.fn, ContainerStatus::idle);
        if (std::isfinite(ttl)) timers_.push({t + ttl, r.fn, ++c.generation});
    }

    double footprint(std::uint32_t fn, ContainerStatus s) const {
        const auto& f = cfg_.workload.functions[fn];
        switch (s) {
            case ContainerStatus::unloaded:
                return 0.0;
            case ContainerStatus::idle:
                return f.theta_off;
            case ContainerStatus::loading:
            case ContainerStatus::busy:
                return f.theta_on;
        }
        return 0.0;
    }

    static bool active(ContainerStatus s) { return s == ContainerStatus::loading || s == ContainerStatus::busy; }

    void set_status(double t, std::uint32_t fn, ContainerStatus s) {
        auto& c = containers_[fn];
        if (active(c.status) && !active(s)) add_busy(fn, c.active_since, t);
        if (!active(c.status) && active(s)) c.active_since = t;
        note_memory(t);
        memory_ += footprint(fn, s) - footprint(fn, c.status);
        c.status = s;
        if (t >= cfg_.warmup) record_memory(t);
    }

    void add_busy(std::uint32_t fn, double from, double to) {
        from = std::max(from, cfg_.warmup);
        if (to > from) busy_time_[fn] += to - from;
    }

    // Integrates the current level up to t.
    void note_memory(double t) {
        if (t < cfg_.warmup) return;
        if (!observing_) {
            observing_ = true;
            mem_last_ = cfg_.warmup;
            record_memory(cfg_.warmup);
        }
        mem_area_ += memory_ * (t - mem_last_);
        mem_last_ = t;
    }

    void record_memory(double t) {
        // Cancellation in the running sum can leave tiny negatives.
        if (std::abs(memory_) < 1e-9) memory_ = 0.0;
        out_.max_memory = std::max(out_.max_memory, memory_);
        if (cfg_.record_trace) {
            if (!out_.trace.empty() && out_.trace.back().first == t)
                out_.trace.back().second = memory_;
            else
                out_.trace.emplace_back(t, memory_);
        }
    }

    void finish(double horizon) {
        note_memory(horizon);
        const double span = horizon - cfg_.warmup;
        out_.mean_memory = span > 0.0 ? mem_area_ / span : memory_;
        out_.in_flight = out_.arrivals_total - out_.completions_total;
        for (std::uint32_t fn = 0; fn < n_; ++fn) {
            if (active(containers_[fn].status)) add_busy(fn, containers_[fn].active_since, horizon);
            auto& st = out_.functions[fn];
            st.utilization = span > 0.0 ? busy_time_[fn] / span : 0.0;
            auto& w = responses_[fn];
            st.completions = w.size();
            st.min_slack = w.empty() ? 0.0 : min_slack_[fn];
            if (w.empty()) continue;
            double sum = 0.0;
            for (double x : w) sum += x;
            st.mean_response = sum / w.size();
            double ss = 0.0;
            for (double x : w) ss += (x - st.mean_response) * (x - st.mean_response);
            st.response_sd = w.size() > 1 ? std::sqrt(ss / (w.size() - 1)) : 0.0;
            const auto k = static_cast<std::size_t>(std::ceil(0.95 * w.size())) - 1;
            std::nth_element(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(k), w.end());
            st.p95_response = w[k];
        }
    }

    const SimConfig& cfg_;
    std::size_t n_;
    Cpu cpu_;
    Rng arrivals_rng_;
    Rng choice_rng_;
    Rng service_rng_;
    Rng cold_rng_;
    std::vector<double> cumulative_;
    std::vector<Container> containers_;
    SlotPool<Request> requests_;
    SlotPool<Job> jobs_;
    std::deque<std::pair<double, std::uint32_t>> dispatch_;
    MinHeap<TimerEvent> timers_;
    MinHeap<std::pair<double, std::uint32_t>> loads_;

    std::vector<std::vector<double>> responses_;
    std::vector<double> busy_time_;
    std::vector<double> min_slack_;
    double memory_ = 0.0;
    double mem_area_ = 0.0;
    double mem_last_ = 0.0;
    bool observing_ = false;
    ReplicationResult out_;
};

Summary summarize(const std::vector<double>& v) {
    Summary s;
    if (v.empty()) return s;
    for (double x : v) s.mean += x;
    s.mean /= v.size();
    if (v.size() > 1) {
        double ss = 0.0;
        for (double x : v) ss += (x - s.mean) * (x - s.mean);
        s.sd = std::sqrt(ss / (v.size() - 1));
    }
    return s;
}

}  // namespace

void SimConfig::validate() const {
    workload.validate();
    if (idle_times.size() != workload.size())
        throw InvalidArgument(fmt::format("expected {} idle times, got {}", workload.size(), idle_times.size()));
    for (double t : idle_times)
        if (!(t >= 0.0)) throw InvalidArgument(fmt::format("idle time must be >= 0 (got {})", t));
    if (cores < 1) throw InvalidArgument(fmt::format("cores must be >= 1 (got {})", cores));
    if (!(horizon > 0.0) || !std::isfinite(horizon))
        throw InvalidArgument(fmt::format("horizon must be finite and > 0 (got {})", horizon));
    if (!(warmup >= 0.0) || !(horizon > warmup))
        throw InvalidArgument(fmt::format("need 0 <= warmup < horizon (warmup {}, horizon {})", warmup, horizon));
    if (replications < 1) throw InvalidArgument("replications must be >= 1");
    if (!(dispatcher_delay >= 0.0)) throw InvalidArgument("dispatcher delay must be >= 0");
}

double FunctionStats::response_se() const {
    return completions > 1 ? response_sd / std::sqrt(static_cast<double>(completions)) : 0.0;
}

ReplicationResult run_replication(const SimConfig& config, std::uint64_t seed) {
    config.validate();
    return Run(config, seed).execute();
}

SimResult simulate(const SimConfig& config, std::size_t workers) {
    config.validate();
    SimResult res;
    res.replications.resize(static_cast<std::size_t>(config.replications));
    parallel_for(res.replications.size(), workers, [&](std::size_t r) {
        const std::array<std::uint64_t, 1> coord{r};
        res.replications[r] = Run(config, derive_seed(config.seed, coord)).execute();
    });

    const std::size_t n = config.workload.size();
    std::vector<double> buf(res.replications.size());
    auto collect = [&](auto&& get) {
        for (std::size_t r = 0; r < res.replications.size(); ++r) buf[r] = get(res.replications[r]);
        return summarize(buf);
    };
    for (std::size_t i = 0; i < n; ++i) {
        res.response_time.push_back(collect([i](const auto& rr) { return rr.functions[i].mean_response; }));
        res.hit_rate.push_back(collect([i](const auto& rr) { return rr.functions[i].hit_rate(); }));
        res.utilization.push_back(collect([i](const auto& rr) { return rr.functions[i].utilization; }));
    }
    res.mean_memory = collect([](const auto& rr) { return rr.mean_memory; });
    res.max_memory = collect([](const auto& rr) { return rr.max_memory; });
    return res;
}

std::vector<std::pair<double, double>> memory_timeseries(const SimConfig& config) {
    SimConfig c = config;
    c.record_trace = true;
    c.validate();
    const std::array<std::uint64_t, 1> coord{0};
    return Run(c, derive_seed(c.seed, coord)).execute().trace;
}

double horizon_for_samples(const WorkloadSpec& workload, double warmup, double samples, double max_arrivals) {
    if (!(samples > 0.0)) throw InvalidArgument("samples must be > 0");
    double lambda_min = kInf;
    for (std::size_t i = 0; i < workload.size(); ++i) {
        const double l = workload.arrival_rate(i);
        if (l > 0.0) lambda_min = std::min(lambda_min, l);
    }
    if (!std::isfinite(lambda_min)) throw InvalidArgument("workload has no arrivals");
    return warmup + std::min(samples / lambda_min, max_arrivals / workload.lambda_total);
}

double default_warmup(const std::vector<double>& idle_times, double floor) {
    double w = floor;
    for (double t : idle_times)
        if (std::isfinite(t)) w = std::max(w, 2.0 * t);
    return w;
}

}  // namespace faasplan::sim
