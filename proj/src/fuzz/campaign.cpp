#include "pipecleaner/fuzz/campaign.hpp"

#include <atomic>
#include <chrono>
#include <stdexcept>
#include <thread>

#include "pipecleaner/fuzz/mutate.hpp"

namespace pipecleaner::fuzz {

namespace {

constexpr std::size_t kBatchSize = 32;

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double unit_interval(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

struct Pending {
    FuzzCase fuzz_case;
    Rng rng;
    interp::RunResult result;
    bool done = false;
};

struct CorpusEntry {
    std::uint64_t id;
    std::string input;
};

} // namespace

std::uint64_t case_seed(std::uint64_t rng_seed, std::uint64_t id) { return splitmix64(rng_seed ^ splitmix64(id)); }

CampaignResult fuzz_loop(const CampaignConfig& config, const minic::Program& program, const policy::Policy& policy,
                         triage::TriageState& state, const triage::SecretRuleSet& rules)
{
    if (config.seeds.empty())
        throw std::invalid_argument("campaign needs at least one seed");
    if (!(config.time_budget_s > 0))
        throw std::invalid_argument("time budget must be positive");

    using Clock = std::chrono::steady_clock;
    const auto start = Clock::now();
    const auto deadline = start + std::chrono::duration_cast<Clock::duration>(
                                      std::chrono::duration<double>(config.time_budget_s));
    const std::uint64_t limit = config.max_iterations.value_or(UINT64_MAX);
    const unsigned workers = std::max(1u, config.workers);

    CampaignResult out;
    std::vector<CorpusEntry> corpus;
    std::vector<std::string> corpus_inputs;
    for (std::size_t i = 0; i < config.seeds.size(); ++i) {
        corpus.push_back({i + 1, config.seeds[i]});
        corpus_inputs.push_back(config.seeds[i]);
    }

    std::uint64_t next_id = 1;
    bool out_of_time = false;
    while (next_id <= limit && !out_of_time) {
        if (Clock::now() >= deadline)
            break;

        // Generate the batch against a fixed corpus snapshot.
        std::vector<Pending> batch;
        while (batch.size() < kBatchSize && next_id <= limit) {
            Pending p{FuzzCase{next_id, {}, std::nullopt}, Rng(case_seed(config.rng_seed, next_id)), {}, false};
            if (next_id <= config.seeds.size()) {
                p.fuzz_case.input = config.seeds[next_id - 1];
            } else {
                const CorpusEntry& parent = corpus[draw(p.rng, corpus.size())];
                p.fuzz_case.parent_id = parent.id;
                p.fuzz_case.input = mutate(parent.input, p.rng, corpus_inputs);
            }
            batch.push_back(std::move(p));
            ++next_id;
        }

        // Workers claim cases in id order, so the finished cases form a prefix.
        std::atomic<std::size_t> cursor{0};
        auto work = [&] {
            for (;;) {
                if (Clock::now() >= deadline)
                    return;
                std::size_t i = cursor.fetch_add(1);
                if (i >= batch.size())
                    return;
                batch[i].result = interp::exec_program(program, policy, batch[i].fuzz_case.input, config.limits);
                batch[i].done = true;
            }
        };
        if (workers == 1) {
            work();
        } else {
            std::vector<std::jthread> pool;
            for (unsigned w = 0; w < workers; ++w)
                pool.emplace_back(work);
        }

        for (auto& p : batch) {
            if (!p.done) {
                out_of_time = true;
                break;
            }
            ++out.total_testcases;
            const auto& r = p.result;
            std::visit(
                [&](const auto& o) {
                    using T = std::decay_t<decltype(o)>;
                    if constexpr (std::is_same_v<T, interp::Exit>)
                        ++out.counts.exits;
                    else if constexpr (std::is_same_v<T, policy::FailStop>)
                        ++out.counts.failstops;
                    else if constexpr (std::is_same_v<T, interp::Crash>)
                        ++out.counts.crashes;
                    else if constexpr (std::is_same_v<T, interp::StepLimit>)
                        ++out.counts.steplimits;
                    else
                        ++out.counts.ooms;
                },
                r.outcome);
            out.shadow_checks += r.stats.shadow_checks;
            out.shadow_disagreements += r.stats.shadow_disagreements;

            auto action = triage::process_result(r, p.fuzz_case.id, p.fuzz_case.input, state, rules);
            bool seed = p.fuzz_case.id <= config.seeds.size();
            if (!seed && (action == triage::Action::NewBug || unit_interval(p.rng) < config.retention_prob)) {
                corpus.push_back({p.fuzz_case.id, p.fuzz_case.input});
                corpus_inputs.push_back(p.fuzz_case.input);
            }
        }
    }

    out.corpus_size = corpus.size();
    out.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
    out.triage = state;
    return out;
}

} // namespace pipecleaner::fuzz
