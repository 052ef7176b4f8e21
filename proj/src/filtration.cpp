#include "doobdec/filtration.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace doobdec {

std::string to_string(const AtomId& a) {
    std::ostringstream os;
    os << "(" << a.level << "," << a.index << ")";
    return os.str();
}

FiltrationTree FiltrationTree::build(const std::vector<int>& counts) {
    if (counts.empty()) throw StructureError("branching list is empty");
    std::vector<std::vector<int>> per_atom(counts.size());
    int atoms = 1;
    for (std::size_t n = 0; n < counts.size(); ++n) {
        if (counts[n] < 1)
            throw StructureError("branching count at level " + std::to_string(n) +
                                 " must be >= 1, got " + std::to_string(counts[n]));
        per_atom[n].assign(atoms, counts[n]);
        atoms *= counts[n];
    }
    return build_general(per_atom);
}

FiltrationTree FiltrationTree::build_general(
    const std::vector<std::vector<int>>& counts_per_atom) {
    if (counts_per_atom.empty()) throw StructureError("branching list is empty");
    FiltrationTree t;
    t.level_sizes_.push_back(1);
    t.children_.resize(counts_per_atom.size());
    for (std::size_t n = 0; n < counts_per_atom.size(); ++n) {
        const auto& counts = counts_per_atom[n];
        if (static_cast<int>(counts.size()) != t.level_sizes_.back())
            throw StructureError("level " + std::to_string(n) + " lists " +
                                 std::to_string(counts.size()) + " atoms, expected " +
                                 std::to_string(t.level_sizes_.back()));
        int next = 0;
        t.children_[n].resize(counts.size());
        for (std::size_t s = 0; s < counts.size(); ++s) {
            if (counts[s] < 1)
                throw StructureError("atom " + to_string({(int)n, (int)s}) +
                                     " would have " + std::to_string(counts[s]) +
                                     " children");
            auto& ch = t.children_[n][s];
            ch.resize(counts[s]);
            std::iota(ch.begin(), ch.end(), next);
            next += counts[s];
        }
        t.level_sizes_.push_back(next);
    }
    t.index_structure();
    return t;
}

FiltrationTree FiltrationTree::from_parts(
    std::vector<int> level_sizes, std::vector<std::vector<std::vector<int>>> children) {
    if (level_sizes.size() < 2)
        throw StructureError("a tree needs at least levels 0 and 1");
    if (children.size() + 1 != level_sizes.size())
        throw StructureError("children lists do not match the level count");
    for (std::size_t n = 0; n < children.size(); ++n)
        if (static_cast<int>(children[n].size()) != level_sizes[n])
            throw StructureError("children at level " + std::to_string(n) +
                                 " list " + std::to_string(children[n].size()) +
                                 " atoms, level size is " + std::to_string(level_sizes[n]));
    FiltrationTree t;
    t.level_sizes_ = std::move(level_sizes);
    t.children_ = std::move(children);
    t.index_structure();
    return t;
}

void FiltrationTree::index_structure() {
    const int N = depth();
    parents_.assign(N + 1, {});
    for (int n = 1; n <= N; ++n) parents_[n].assign(level_sizes_[n], {});
    for (int n = 0; n < N; ++n)
        for (int s = 0; s < level_sizes_[n]; ++s)
            for (int c : children_[n][s])
                if (c >= 0 && c < level_sizes_[n + 1]) parents_[n + 1][c].push_back(s);

    // Leaf sets bottom-up; an atom's content is the union of its children's.
    leaf_sets_.assign(N + 1, {});
    leaf_sets_[N].resize(level_sizes_[N]);
    for (int j = 0; j < level_sizes_[N]; ++j) leaf_sets_[N][j] = {j};
    for (int n = N - 1; n >= 0; --n) {
        leaf_sets_[n].resize(level_sizes_[n]);
        for (int s = 0; s < level_sizes_[n]; ++s) {
            auto& out = leaf_sets_[n][s];
            for (int c : children_[n][s]) {
                if (c < 0 || c >= level_sizes_[n + 1]) continue;
                const auto& sub = leaf_sets_[n + 1][c];
                out.insert(out.end(), sub.begin(), sub.end());
            }
            std::sort(out.begin(), out.end());
            out.erase(std::unique(out.begin(), out.end()), out.end());
        }
    }
}

int FiltrationTree::atom_count(int level) const {
    if (level < 0 || level > depth())
        throw StructureError("level " + std::to_string(level) + " out of range [0," +
                             std::to_string(depth()) + "]");
    return level_sizes_[level];
}

const std::vector<int>& FiltrationTree::children(int level, int index) const {
    if (level < 0 || level >= depth()) throw StructureError("no children at level " + std::to_string(level));
    if (index < 0 || index >= level_sizes_[level])
        throw StructureError("atom " + to_string({level, index}) + " out of range");
    return children_[level][index];
}

int FiltrationTree::parent(int level, int index) const {
    if (level < 1 || level > depth())
        throw StructureError("no parent at level " + std::to_string(level));
    if (index < 0 || index >= level_sizes_[level])
        throw StructureError("atom " + to_string({level, index}) + " out of range");
    const auto& p = parents_[level][index];
    if (p.size() != 1)
        throw StructureError("atom " + to_string({level, index}) + " has " +
                             std::to_string(p.size()) + " parents");
    return p[0];
}

const std::vector<int>& FiltrationTree::leaves_under(int level, int index) const {
    if (level < 0 || level > depth() || index < 0 || index >= level_sizes_[level])
        throw StructureError("atom " + to_string({level, index}) + " out of range");
    return leaf_sets_[level][index];
}

ConditionAReport check_condition_a(const FiltrationTree& tree) {
    ConditionAReport rep;
    const int N = tree.depth();

    if (tree.atom_count(0) != 1) {
        rep.covering = false;
        rep.violations.push_back("level 0 must consist of the single atom Omega, found " +
                                 std::to_string(tree.atom_count(0)));
    }

    for (int n = 0; n < N; ++n) {
        // claims[j] = parents of next-level atom j at this step
        std::vector<std::vector<int>> claims(tree.atom_count(n + 1));
        for (int s = 0; s < tree.atom_count(n); ++s) {
            const auto& ch = tree.children(n, s);
            if (ch.empty()) {
                rep.nested = false;
                rep.violations.push_back("atom " + to_string({n, s}) +
                                         " is not refined by any atom of level " +
                                         std::to_string(n + 1));
            }
            for (int c : ch) {
                if (c < 0 || c >= tree.atom_count(n + 1)) {
                    rep.nested = false;
                    rep.violations.push_back("atom " + to_string({n, s}) +
                                             " links to invalid child index " +
                                             std::to_string(c));
                    continue;
                }
                claims[c].push_back(s);
            }
        }
        for (int j = 0; j < tree.atom_count(n + 1); ++j) {
            if (claims[j].empty()) {
                rep.covering = false;
                rep.violations.push_back("level " + std::to_string(n) +
                                         " does not cover atom " + to_string({n + 1, j}));
            } else if (claims[j].size() > 1) {
                rep.disjoint = false;
                rep.violations.push_back(
                    "atoms " + to_string({n, claims[j][0]}) + " and " +
                    to_string({n, claims[j][1]}) + " overlap on " + to_string({n + 1, j}));
            }
        }
    }

    rep.minimality = true;
    rep.minimality_note =
        "minimality clause constrains only infinite descending chains; "
        "vacuously satisfied at finite depth " + std::to_string(N);
    return rep;
}

}  // namespace doobdec
