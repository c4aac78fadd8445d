#include "fqlens/sim/kinship.hpp"

#include "fqlens/error.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace fqlens::sim {

namespace {

__extension__ using u128 = unsigned __int128;

constexpr unsigned kMaxExp = 62;

}  // namespace

// ── Dyadic ──────────────────────────────────────────────────────────────────

Dyadic::Dyadic(std::uint64_t num, unsigned exp) : num_(num), exp_(exp) {
    if (exp > kMaxExp) throw DomainError("dyadic exponent exceeds 62");
    normalise();
}

void Dyadic::normalise() noexcept {
    if (num_ == 0) {
        exp_ = 0;
        return;
    }
    const unsigned tz = static_cast<unsigned>(std::countr_zero(num_));
    const unsigned k = std::min(tz, exp_);
    num_ >>= k;
    exp_ -= k;
}

double Dyadic::to_double() const noexcept { return std::ldexp(static_cast<double>(num_), -static_cast<int>(exp_)); }

std::string Dyadic::str() const {
    if (exp_ == 0) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(std::uint64_t{1} << exp_);
}

Dyadic Dyadic::half() const {
    if (num_ == 0) return {};
    if ((num_ & 1u) == 0) return Dyadic(num_ >> 1, exp_);
    return Dyadic(num_, exp_ + 1);
}

Dyadic operator+(Dyadic a, Dyadic b) {
    if (a.exp_ < b.exp_) std::swap(a, b);
    const unsigned shift = a.exp_ - b.exp_;
    const u128 bn = static_cast<u128>(b.num_) << shift;
    const u128 sum = static_cast<u128>(a.num_) + bn;
    if (sum >> 64) throw DomainError("dyadic addition overflows 64 bits");
    return Dyadic(static_cast<std::uint64_t>(sum), a.exp_);
}

std::strong_ordering operator<=>(Dyadic a, Dyadic b) noexcept {
    const unsigned e = std::max(a.exp_, b.exp_);
    const u128 x = static_cast<u128>(a.num_) << (e - a.exp_);
    const u128 y = static_cast<u128>(b.num_) << (e - b.exp_);
    return x <=> y;
}

std::string_view to_string(Relationship r) noexcept {
    switch (r) {
        case Relationship::self: return "self";
        case Relationship::unrelated: return "unrelated";
        case Relationship::lineal: return "lineal";
        case Relationship::siblings: return "siblings";
        case Relationship::avuncular: return "avuncular";
        case Relationship::first_cousins: return "first_cousins";
        case Relationship::removed_cousins: return "removed_cousins";
        case Relationship::distant: return "distant";
    }
    return "?";
}

std::string_view to_string(Refusal r) noexcept {
    switch (r) {
        case Refusal::none: return "none";
        case Refusal::self: return "self";
        case Refusal::same_sex: return "same_sex";
        case Refusal::kinship: return "kinship";
        case Refusal::lineal: return "lineal";
        case Refusal::siblings: return "siblings";
        case Refusal::avuncular: return "avuncular";
        case Refusal::parallel_cousins: return "parallel_cousins";
        case Refusal::removed_cousins: return "removed_cousins";
        case Refusal::distant_kinship: return "distant_kinship";
    }
    return "?";
}

// ── KinshipCalculator ───────────────────────────────────────────────────────

std::int64_t KinshipCalculator::floor_for(IndividualId a, IndividualId b) const {
    if (window_ == kUnboundedWindow) return -1;
    const auto g = std::max(ped_.at(a).generation, ped_.at(b).generation);
    return static_cast<std::int64_t>(g) - static_cast<std::int64_t>(window_);
}

bool KinshipCalculator::is_cut(IndividualId x, std::int64_t floor) const noexcept {
    const auto& p = ped_[x];
    return p.is_founder() || static_cast<std::int64_t>(p.generation) <= floor;
}

Dyadic KinshipCalculator::phi(IndividualId a, IndividualId b, std::int64_t floor,
                              std::unordered_map<std::uint64_t, Dyadic>& memo) const {
    if (a == b) {
        if (is_cut(a, floor)) return Dyadic(1, 1);
        const auto& p = ped_[a];
        return (Dyadic::one() + phi(p.mother, p.father, floor, memo)).half();
    }
    if (a < b) std::swap(a, b);
    const std::uint64_t key = (static_cast<std::uint64_t>(a) << 32) | b;
    if (auto it = memo.find(key); it != memo.end()) return it->second;

    // Recurse on an individual that cannot be an ancestor of the other: the
    // larger id when it has parents in the window, else the smaller one
    // (the larger is then a window founder with no ancestors at all).
    Dyadic out;
    IndividualId x = a;
    IndividualId y = b;
    if (is_cut(x, floor)) std::swap(x, y);
    if (!is_cut(x, floor)) {
        const auto& p = ped_[x];
        out = (phi(p.mother, y, floor, memo) + phi(p.father, y, floor, memo)).half();
    }
    memo.emplace(key, out);
    return out;
}

void KinshipCalculator::ancestors(IndividualId x, std::int64_t floor, std::vector<Ancestor>& out) const {
    out.clear();
    out.push_back({x, 0, kNoParent});
    for (std::size_t i = 0; i < out.size(); ++i) {
        const Ancestor cur = out[i];
        if (is_cut(cur.id, floor)) continue;
        const auto& p = ped_[cur.id];
        out.push_back({p.mother, cur.depth + 1, cur.id});
        out.push_back({p.father, cur.depth + 1, cur.id});
    }
    std::sort(out.begin(), out.end(), [](const Ancestor& l, const Ancestor& r) {
        return l.id != r.id ? l.id < r.id : l.depth < r.depth;
    });
}

Dyadic KinshipCalculator::kinship(IndividualId a, IndividualId b) const {
    ped_.at(a);
    ped_.at(b);
    std::unordered_map<std::uint64_t, Dyadic> memo;
    return phi(a, b, floor_for(a, b), memo);
}

namespace {

template <typename A>
RelationshipInfo classify(const Pedigree& ped, const std::vector<A>& xa, const std::vector<A>& xb) {
    bool lineal = false, siblings = false, avuncular = false, cousins = false, removed = false,
         distant = false, all_cross = true;
    unsigned best_r[4] = {~0u, ~0u, ~0u, ~0u};  // per m ∈ {0,1,2,≥3}
    unsigned distant_m = ~0u;
    std::size_t i = 0, j = 0;
    while (i < xa.size() && j < xb.size()) {
        if (xa[i].id < xb[j].id) {
            ++i;
        } else if (xb[j].id < xa[i].id) {
            ++j;
        } else {
            const IndividualId c = xa[i].id;
            std::size_t i_end = i, j_end = j;
            while (i_end < xa.size() && xa[i_end].id == c) ++i_end;
            while (j_end < xb.size() && xb[j_end].id == c) ++j_end;
            for (std::size_t u = i; u < i_end; ++u) {
                for (std::size_t v = j; v < j_end; ++v) {
                    const unsigned da = xa[u].depth, db = xb[v].depth;
                    const unsigned m = std::min(da, db);
                    const unsigned r = da > db ? da - db : db - da;
                    const unsigned slot = std::min(m, 3u);
                    best_r[slot] = std::min(best_r[slot], r);
                    if (m == 0) {
                        lineal = true;
                    } else if (m == 1) {
                        (r == 0 ? siblings : avuncular) = true;
                    } else if (m == 2 && r == 0) {
                        cousins = true;
                        if (ped[xa[u].via].sex == ped[xb[v].via].sex) all_cross = false;
                    } else if (m == 2) {
                        removed = true;
                    } else {
                        distant = true;
                        distant_m = std::min(distant_m, m);
                    }
                }
            }
            i = i_end;
            j = j_end;
        }
    }
    RelationshipInfo info;
    if (lineal) {
        info = {Relationship::lineal, 0, best_r[0], false};
    } else if (siblings) {
        info = {Relationship::siblings, 1, 0, false};
    } else if (avuncular) {
        info = {Relationship::avuncular, 1, best_r[1], false};
    } else if (cousins) {
        info = {Relationship::first_cousins, 2, 0, all_cross};
    } else if (removed) {
        info = {Relationship::removed_cousins, 2, best_r[2], false};
    } else if (distant) {
        info = {Relationship::distant, distant_m, best_r[3], false};
    }
    return info;
}

bool share_any(const auto& xa, const auto& xb) {
    std::size_t i = 0, j = 0;
    while (i < xa.size() && j < xb.size()) {
        if (xa[i].id == xb[j].id) return true;
        if (xa[i].id < xb[j].id) {
            ++i;
        } else {
            ++j;
        }
    }
    return false;
}

}  // namespace

RelationshipInfo KinshipCalculator::relationship(IndividualId a, IndividualId b) const {
    ped_.at(a);
    ped_.at(b);
    if (a == b) return {Relationship::self, 0, 0, false};
    const auto floor = floor_for(a, b);
    std::vector<Ancestor> xa, xb;
    ancestors(a, floor, xa);
    ancestors(b, floor, xb);
    return classify(ped_, xa, xb);
}

bool KinshipCalculator::may_share_ancestors(IndividualId a, IndividualId b) const {
    ped_.at(a);
    ped_.at(b);
    if (a == b) return true;
    const auto floor = floor_for(a, b);
    std::vector<Ancestor> xa, xb;
    ancestors(a, floor, xa);
    ancestors(b, floor, xb);
    return share_any(xa, xb);
}

Eligibility KinshipCalculator::eligibility(IndividualId a, IndividualId b) const {
    const auto& pa = ped_.at(a);
    const auto& pb = ped_.at(b);
    Eligibility e;
    auto refuse = [&](Refusal r) {
        e.reason = r;
        return e;
    };
    // φ and the relationship are reported even for refusals decided earlier
    // in the table.
    const auto floor = floor_for(a, b);
    std::unordered_map<std::uint64_t, Dyadic> memo;
    if (a == b) {
        e.phi = phi(a, b, floor, memo);
        e.relation.kind = Relationship::self;
        return refuse(Refusal::self);
    }
    thread_local std::vector<Ancestor> xa, xb;
    ancestors(a, floor, xa);
    ancestors(b, floor, xb);
    const bool related = share_any(xa, xb);
    if (related) {
        e.phi = phi(a, b, floor, memo);
        e.relation = classify(ped_, xa, xb);
    }
    if (pa.sex == pb.sex) return refuse(Refusal::same_sex);
    if (!related) {
        e.eligible = true;
        return e;
    }
    const Dyadic eighth(1, 3), sixteenth(1, 4);
    if (e.phi >= eighth) return refuse(Refusal::kinship);
    switch (e.relation.kind) {
        case Relationship::lineal: return refuse(Refusal::lineal);
        case Relationship::siblings: return refuse(Refusal::siblings);
        case Relationship::avuncular: return refuse(Refusal::avuncular);
        case Relationship::removed_cousins: return refuse(Refusal::removed_cousins);
        case Relationship::first_cousins:
            if (!e.relation.cross) return refuse(Refusal::parallel_cousins);
            if (e.phi > sixteenth) return refuse(Refusal::kinship);
            break;
        case Relationship::self:
        case Relationship::unrelated:
        case Relationship::distant:
            if (e.phi >= sixteenth) return refuse(Refusal::distant_kinship);
            break;
    }
    e.eligible = true;
    return e;
}

Dyadic kinship_coefficient(const Pedigree& ped, IndividualId a, IndividualId b) {
    return KinshipCalculator(ped).kinship(a, b);
}

Eligibility mate_eligibility(const Pedigree& ped, IndividualId a, IndividualId b) {
    return KinshipCalculator(ped).eligibility(a, b);
}

}  // namespace fqlens::sim
