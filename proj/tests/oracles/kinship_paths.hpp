// Kinship by path counting, in exact rational arithmetic.
//
//   φ(a, b) = Σ_A Σ_paths (1/2)^(n1 + n2 + 1) (1 + F_A)
//
// over common ancestors A (a or b themselves included) and pairs of upward
// paths a → A, b → A that share no individual other than A; F_A = φ(mother,
// father) of A, 0 for founders. φ(a, a) = (1 + F_a) / 2.
//
// The pedigree is read from the TSV fixture directly, without the library.
#pragma once

#include <boost/rational.hpp>

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

using Fraction = boost::rational<long long>;

struct PedRow {
    long long mother = -1;
    long long father = -1;
    char sex = 'F';
};

/// One "# pair a b φ relation outcome" annotation of a fixture.
struct PairNote {
    long long a = 0;
    long long b = 0;
    Fraction phi;
    std::string relation;
    std::string outcome;  ///< "eligible" or the refusal name
};

struct Fixture {
    std::vector<PedRow> rows;
    std::vector<PairNote> pairs;
};

inline Fraction parse_fraction(const std::string& s) {
    const auto slash = s.find('/');
    if (slash == std::string::npos) return Fraction(std::stoll(s));
    return Fraction(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
}

inline Fixture read_fixture(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open fixture " + path);
    Fixture fx;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream ss(line.substr(1));
            std::string tag;
            ss >> tag;
            if (tag == "pair") {
                PairNote p;
                std::string phi;
                ss >> p.a >> p.b >> phi >> p.relation >> p.outcome;
                p.phi = parse_fraction(phi);
                fx.pairs.push_back(p);
            }
            continue;
        }
        if (header) {
            header = false;
            continue;
        }
        std::istringstream ss(line);
        std::string id, sex, deme, gen, mother, father;
        std::getline(ss, id, '\t');
        std::getline(ss, sex, '\t');
        std::getline(ss, deme, '\t');
        std::getline(ss, gen, '\t');
        std::getline(ss, mother, '\t');
        std::getline(ss, father, '\t');
        PedRow r;
        r.sex = sex.at(0);
        if (mother != ".") r.mother = std::stoll(mother);
        if (father != ".") r.father = std::stoll(father);
        fx.rows.push_back(r);
    }
    return fx;
}

class PathKinship {
public:
    explicit PathKinship(std::vector<PedRow> rows) : rows_(std::move(rows)) {}

    Fraction phi(long long a, long long b) {
        if (a == b) return (Fraction(1) + inbreeding(a)) / 2;
        std::vector<std::vector<long long>> pa, pb;
        collect(a, {a}, pa);
        collect(b, {b}, pb);
        Fraction total(0);
        for (const auto& x : pa) {
            for (const auto& y : pb) {
                if (x.back() != y.back() || !disjoint(x, y)) continue;
                const long long n = static_cast<long long>(x.size() + y.size() - 2);
                total += Fraction(1, 1LL << (n + 1)) * (Fraction(1) + inbreeding(x.back()));
            }
        }
        return total;
    }

    Fraction inbreeding(long long x) {
        const auto& r = rows_.at(static_cast<std::size_t>(x));
        if (r.mother < 0) return Fraction(0);
        auto it = memo_.find(x);
        if (it != memo_.end()) return it->second;
        const Fraction f = phi(r.mother, r.father);
        memo_[x] = f;
        return f;
    }

private:
    /// Every upward path starting at `path.front()`, the trivial one included.
    void collect(long long x, std::vector<long long> path, std::vector<std::vector<long long>>& out) {
        out.push_back(path);
        const auto& r = rows_.at(static_cast<std::size_t>(x));
        for (long long p : {r.mother, r.father}) {
            if (p < 0) continue;
            auto next = path;
            next.push_back(p);
            collect(p, std::move(next), out);
        }
    }

    static bool disjoint(const std::vector<long long>& x, const std::vector<long long>& y) {
        for (std::size_t i = 0; i + 1 < x.size(); ++i) {
            for (std::size_t j = 0; j + 1 < y.size(); ++j) {
                if (x[i] == y[j]) return false;
            }
            if (x[i] == y.back()) return false;
        }
        for (std::size_t j = 0; j + 1 < y.size(); ++j) {
            if (y[j] == x.back()) return false;
        }
        return true;
    }

    std::vector<PedRow> rows_;
    std::map<long long, Fraction> memo_;
};

}  // namespace oracle
