// =============================================================================
// kinship.hpp - Exact pedigree kinship and the mating rule table.
//
// Kinship coefficients of a finite pedigree are dyadic rationals, so they are
// carried exactly as n / 2^k. φ follows the usual recursion:
//
//   φ(x, x) = ½ (1 + φ(mother(x), father(x)))
//   φ(a, b) = ½ (φ(mother(a), b) + φ(father(a), b))   a the later-born
//   founders are unrelated and not inbred.
//
// A KinshipCalculator may be given a window of W generations: for a pair whose
// later member is in generation g, individuals of generation ≤ g − W are
// treated as founders. The simulator uses W = 4 (great-great-grandparents),
// which keeps every query O(4^W) and still sees every relationship the rule
// table names.
//
// Rule table (first match wins):
//
//   same individual                                  refused (self)
//   same sex                                         refused (same_sex)
//   φ ≥ 1/8                                          refused (kinship)
//   one is an ancestor of the other                  refused (lineal)
//   share a parent                                   refused (siblings)
//   uncle/aunt and nephew/niece, any removal         refused (avuncular)
//   first cousins, some connecting pair same-sexed   refused (parallel_cousins)
//   first cousins once or more removed               refused (removed_cousins)
//   first cousins, all connecting pairs cross-sexed  eligible if φ ≤ 1/16
//   anything more distant                            eligible if φ < 1/16
// =============================================================================
#pragma once

#include "fqlens/sim/pedigree.hpp"

#include <compare>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace fqlens::sim {

/// Non-negative dyadic rational num / 2^exp, kept in lowest terms.
class Dyadic {
public:
    constexpr Dyadic() = default;
    /// Throws DomainError when exp > 62.
    Dyadic(std::uint64_t num, unsigned exp);

    static Dyadic zero() { return {}; }
    static Dyadic one() { return {1, 0}; }

    std::uint64_t numerator() const noexcept { return num_; }
    unsigned exponent() const noexcept { return exp_; }
    double to_double() const noexcept;
    /// "0", "1", "1/16", "3/32", ...
    std::string str() const;

    Dyadic half() const;
    /// Throws DomainError on overflow.
    friend Dyadic operator+(Dyadic a, Dyadic b);
    friend bool operator==(const Dyadic&, const Dyadic&) = default;
    friend std::strong_ordering operator<=>(Dyadic a, Dyadic b) noexcept;

private:
    void normalise() noexcept;

    std::uint64_t num_ = 0;
    unsigned exp_ = 0;
};

enum class Relationship : std::uint8_t {
    self,
    unrelated,        ///< no common ancestor inside the window
    lineal,
    siblings,         ///< full or half
    avuncular,
    first_cousins,    ///< full or half
    removed_cousins,  ///< first cousins once or more removed
    distant,          ///< common ancestors only at depth ≥ 3
};

enum class Refusal : std::uint8_t {
    none,
    self,
    same_sex,
    kinship,
    lineal,
    siblings,
    avuncular,
    parallel_cousins,
    removed_cousins,
    distant_kinship,
};

std::string_view to_string(Relationship r) noexcept;
std::string_view to_string(Refusal r) noexcept;

struct RelationshipInfo {
    Relationship kind = Relationship::unrelated;
    /// Closest common-ancestor depth on the nearer side (m) and the depth
    /// difference (removal); meaningful for kinds other than self/unrelated.
    unsigned depth = 0;
    unsigned removal = 0;
    /// First cousins only: every connecting sibling pair is opposite-sexed.
    bool cross = false;
};

struct Eligibility {
    bool eligible = false;
    Refusal reason = Refusal::none;
    Dyadic phi;
    RelationshipInfo relation;
};

inline constexpr unsigned kUnboundedWindow = std::numeric_limits<unsigned>::max();

class KinshipCalculator {
public:
    explicit KinshipCalculator(const Pedigree& ped, unsigned window = kUnboundedWindow)
        : ped_(ped), window_(window) {}

    unsigned window() const noexcept { return window_; }

    /// Throws LookupError for unknown ids.
    Dyadic kinship(IndividualId a, IndividualId b) const;
    RelationshipInfo relationship(IndividualId a, IndividualId b) const;
    Eligibility eligibility(IndividualId a, IndividualId b) const;

    /// Cheap pre-check: false guarantees no common ancestor in the window
    /// (and therefore φ = 0 and no named relationship).
    bool may_share_ancestors(IndividualId a, IndividualId b) const;

private:
    struct Ancestor {
        IndividualId id;
        unsigned depth;
        IndividualId via;  ///< child of `id` on the path (kNoParent at depth 0)
    };

    std::int64_t floor_for(IndividualId a, IndividualId b) const;
    bool is_cut(IndividualId x, std::int64_t floor) const noexcept;
    Dyadic phi(IndividualId a, IndividualId b, std::int64_t floor,
               std::unordered_map<std::uint64_t, Dyadic>& memo) const;
    void ancestors(IndividualId x, std::int64_t floor, std::vector<Ancestor>& out) const;

    const Pedigree& ped_;
    unsigned window_;
};

/// Exact φ over the whole pedigree.
Dyadic kinship_coefficient(const Pedigree& ped, IndividualId a, IndividualId b);

/// Rule table over the whole pedigree (no window).
Eligibility mate_eligibility(const Pedigree& ped, IndividualId a, IndividualId b);

}  // namespace fqlens::sim
