#include "fqlens/sim/mating.hpp"

#include "fqlens/error.hpp"
#include "fqlens/rng.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>

namespace fqlens::sim {

PanmixiaSchedule::PanmixiaSchedule(
    std::vector<std::string> demes,
    const std::vector<std::pair<std::uint32_t, std::map<std::string, double>>>& entries)
    : demes_(std::move(demes)) {
    if (demes_.empty()) throw ConfigError("schedule needs at least one deme");
    if (std::set<std::string>(demes_.begin(), demes_.end()).size() != demes_.size()) {
        throw ConfigError("schedule lists a deme twice");
    }
    if (entries.empty()) throw ConfigError("schedule needs at least one entry");
    if (entries.front().first != 0) throw ConfigError("the first schedule entry must start at generation 0");
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto& [from, rho] = entries[i];
        if (i > 0 && from <= entries[i - 1].first) {
            throw ConfigError("schedule from_generation values must strictly increase");
        }
        ScheduleEntry e;
        e.from_generation = from;
        for (const auto& d : demes_) {
            auto it = rho.find(d);
            if (it == rho.end()) {
                throw ConfigError("schedule entry at generation " + std::to_string(from) + " lacks deme '" + d + "'");
            }
            if (!(it->second >= 0.0 && it->second <= 1.0)) {
                throw ConfigError("rho for deme '" + d + "' must lie in [0, 1]");
            }
            e.rho.push_back(it->second);
        }
        for (const auto& [name, v] : rho) {
            if (std::find(demes_.begin(), demes_.end(), name) == demes_.end()) {
                throw ConfigError("schedule names unknown deme '" + name + "'");
            }
        }
        entries_.push_back(std::move(e));
    }
}

double PanmixiaSchedule::rho(std::uint16_t deme, std::uint32_t generation) const {
    if (entries_.empty()) throw ConfigError("empty schedule");
    const ScheduleEntry* cur = &entries_.front();
    for (const auto& e : entries_) {
        if (e.from_generation > generation) break;
        cur = &e;
    }
    return cur->rho.at(deme);
}

namespace {

class Pools {
public:
    Pools(std::size_t n_demes, std::size_t n_members) : pools_(2 * n_demes), where_(n_members) {}

    std::vector<std::uint32_t>& pool(std::uint16_t deme, Sex s) { return pools_[2 * deme + static_cast<int>(s)]; }

    void insert(std::uint32_t local, std::uint16_t deme, Sex s) {
        auto& p = pool(deme, s);
        where_[local] = p.size();
        p.push_back(local);
    }

    void erase(std::uint32_t local, std::uint16_t deme, Sex s) {
        auto& p = pool(deme, s);
        const std::size_t at = where_[local];
        where_[p.back()] = at;
        p[at] = p.back();
        p.pop_back();
    }

private:
    std::vector<std::vector<std::uint32_t>> pools_;
    std::vector<std::size_t> where_;
};

}  // namespace

std::vector<Couple> pair_generation(const Pedigree& ped, std::uint32_t generation,
                                    const PanmixiaSchedule& schedule, const KinshipCalculator& kin,
                                    std::uint64_t seed, PairingStats* stats) {
    const auto members = ped.generation(generation);
    const std::size_t n = members.size();
    const std::size_t n_demes = schedule.demes().size();
    PairingStats st;
    std::vector<Couple> couples;
    if (n == 0) {
        if (stats) *stats = st;
        return couples;
    }

    Philox rng(seed, stream_id(StreamTag::pairing, generation, 0));
    Pools pools(n_demes, n);
    for (std::uint32_t i = 0; i < n; ++i) {
        const auto& p = ped[members[i]];
        if (p.deme >= n_demes) throw ConfigError("individual in a deme missing from the schedule");
        pools.insert(i, p.deme, p.sex);
    }
    std::vector<std::uint32_t> order(n);
    for (std::uint32_t i = 0; i < n; ++i) order[i] = i;
    for (std::size_t i = n - 1; i > 0; --i) std::swap(order[i], order[rng.below(i + 1)]);

    std::vector<char> matched(n, 0);
    std::unordered_map<std::size_t, std::size_t> swaps;
    std::vector<std::vector<std::uint32_t>*> lists;

    // Uniform eligible candidate from the union of `lists`: walk a lazily
    // shuffled permutation of the union and take the first eligible entry.
    auto search = [&](IndividualId visitor) -> std::int64_t {
        std::size_t total = 0;
        for (auto* l : lists) total += l->size();
        swaps.clear();
        auto get = [&](std::size_t k) {
            auto it = swaps.find(k);
            return it == swaps.end() ? k : it->second;
        };
        for (std::size_t i = 0; i < total; ++i) {
            const std::size_t j = i + rng.below(total - i);
            const std::size_t vj = get(j);
            swaps[j] = get(i);
            std::size_t k = vj;
            std::uint32_t local = 0;
            for (auto* l : lists) {
                if (k < l->size()) {
                    local = (*l)[k];
                    break;
                }
                k -= l->size();
            }
            if (kin.eligibility(visitor, members[local]).eligible) return local;
            ++st.refusals;
        }
        return -1;
    };

    for (const std::uint32_t v : order) {
        if (matched[v]) continue;
        const auto& me = ped[members[v]];
        pools.erase(v, me.deme, me.sex);
        const Sex want = opposite(me.sex);
        const double rho = schedule.rho(me.deme, generation);
        const bool cross_first = rng.uniform() < rho;

        std::int64_t found = -1;
        for (int attempt = 0; attempt < 2 && found < 0; ++attempt) {
            const bool cross = (attempt == 0) == cross_first;
            // ρ = 0 (strict endogamy) and ρ = 1 (strict exogamy) never fall back.
            if ((cross && rho == 0.0) || (!cross && rho == 1.0)) continue;
            lists.clear();
            for (std::uint16_t d = 0; d < n_demes; ++d) {
                if ((d != me.deme) == cross) lists.push_back(&pools.pool(d, want));
            }
            found = search(members[v]);
        }
        if (found < 0) continue;

        const auto partner = static_cast<std::uint32_t>(found);
        const auto& other = ped[members[partner]];
        pools.erase(partner, other.deme, other.sex);
        matched[v] = matched[partner] = 1;
        Couple c;
        c.mother = me.sex == Sex::female ? me.id : other.id;
        c.father = me.sex == Sex::female ? other.id : me.id;
        couples.push_back(c);
        if (me.deme != other.deme) ++st.cross_deme;
    }
    st.couples = couples.size();
    st.unmatched = n - 2 * couples.size();
    if (stats) *stats = st;
    return couples;
}

}  // namespace fqlens::sim
