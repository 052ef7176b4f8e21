#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "doobdec/filtration.hpp"

using doobdec::AtomId;
using doobdec::FiltrationTree;
using doobdec::StructureError;

TEST_CASE("uniform branching builds the expected level sizes") {
    auto tree = FiltrationTree::build({2, 2});
    CHECK(tree.depth() == 2);
    CHECK(tree.atom_count(0) == 1);
    CHECK(tree.atom_count(1) == 2);
    CHECK(tree.atom_count(2) == 4);
    CHECK(tree.leaf_count() == 4);

    CHECK(tree.children(0, 0) == std::vector<int>{0, 1});
    CHECK(tree.children(1, 0) == std::vector<int>{0, 1});
    CHECK(tree.children(1, 1) == std::vector<int>{2, 3});
}

TEST_CASE("general branching allows uneven children") {
    auto tree = FiltrationTree::build_general({{3}, {1, 2, 2}});
    CHECK(tree.depth() == 2);
    CHECK(tree.atom_count(1) == 3);
    CHECK(tree.atom_count(2) == 5);
    CHECK(tree.children(1, 0) == std::vector<int>{0});
    CHECK(tree.children(1, 2) == std::vector<int>{3, 4});
}

TEST_CASE("parent and leaves_under are consistent with children") {
    auto tree = FiltrationTree::build({2, 3});
    for (int s = 0; s < tree.atom_count(1); ++s)
        for (int c : tree.children(1, s)) CHECK(tree.parent(2, c) == s);

    CHECK(tree.leaves_under(0, 0) == std::vector<int>{0, 1, 2, 3, 4, 5});
    CHECK(tree.leaves_under(1, 1) == std::vector<int>{3, 4, 5});
    CHECK(tree.leaves_under(2, 4) == std::vector<int>{4});
}

TEST_CASE("invalid branching counts are rejected") {
    CHECK_THROWS_AS(FiltrationTree::build({2, 0}), StructureError);
    CHECK_THROWS_AS(FiltrationTree::build({-1}), StructureError);
    CHECK_THROWS_AS(FiltrationTree::build({}), StructureError);
    CHECK_THROWS_AS(FiltrationTree::build_general({{2}, {2}}), StructureError);
}

TEST_CASE("partition check passes on a well-formed tree and notes minimality") {
    auto tree = FiltrationTree::build({3, 2, 2});
    auto rep = doobdec::check_condition_a(tree);
    CHECK(rep.pass());
    CHECK(rep.violations.empty());
    CHECK(!rep.minimality_note.empty());
}

TEST_CASE("overlapping children break disjointness") {
    // Both level-1 atoms claim leaf 0.
    auto tree = FiltrationTree::from_parts({1, 2, 2}, {{{0, 1}}, {{0}, {0, 1}}});
    auto rep = doobdec::check_condition_a(tree);
    CHECK(!rep.disjoint);
    CHECK(!rep.pass());
    CHECK(!rep.violations.empty());
}

TEST_CASE("an unclaimed atom breaks covering") {
    // Leaf 2 exists but no level-1 atom lists it.
    auto tree = FiltrationTree::from_parts({1, 2, 3}, {{{0, 1}}, {{0}, {1}}});
    auto rep = doobdec::check_condition_a(tree);
    CHECK(!rep.covering);
    CHECK(!rep.pass());
}

TEST_CASE("a childless non-leaf atom breaks nesting") {
    auto tree = FiltrationTree::from_parts({1, 2, 1}, {{{0, 1}}, {{0}, {}}});
    auto rep = doobdec::check_condition_a(tree);
    CHECK(!rep.nested);
}

TEST_CASE("a child index out of range breaks nesting") {
    auto tree = FiltrationTree::from_parts({1, 1, 1}, {{{0}}, {{0, 7}}});
    auto rep = doobdec::check_condition_a(tree);
    CHECK(!rep.nested);
}

TEST_CASE("two roots break covering") {
    auto tree = FiltrationTree::from_parts({2, 2}, {{{0}, {1}}});
    auto rep = doobdec::check_condition_a(tree);
    CHECK(!rep.covering);
}

TEST_CASE("atom ids print as level/index pairs") {
    CHECK(doobdec::to_string(AtomId{2, 1}) == "(2,1)");
    CHECK((AtomId{1, 0}) == (AtomId{1, 0}));
    CHECK_FALSE((AtomId{1, 0}) == (AtomId{2, 0}));
}
