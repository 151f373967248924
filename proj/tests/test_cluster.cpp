#include "doctest.h"

#include "feedmine/cluster.hpp"
#include "feedmine/errors.hpp"
#include "feedmine/rng.hpp"

#include "test_support.hpp"

#include <algorithm>
#include <string>
#include <vector>

using namespace feedmine;

namespace {

struct ExpectedCluster {
    std::string name;
    std::vector<std::string> members;
};

const std::vector<ExpectedCluster> kExpected = {
    {"BIPOC x MentalHealth", {"bipocanxiety", "blackmentalhealth", "browndepression"}},
    {"BIPOC x LGBTQIA x PhysicalHealth",
     {"blackdisabledpride", "chronicillnessqpoc", "disabledqueerbipoc"}},
    {"BIPOC x WomenAFAB", {"blackladies", "mixedrace", "wocbeauty"}},
    {"LowSES x MentalHealth", {"brokeanddepressed", "poormentalhealth", "strugglingminds"}},
    {"WomenAFAB x LowSES x GlobalSouth x MentalHealth",
     {"depressedaunties", "globalsouthwomen", "strugglingmoms"}},
    {"WomenAFAB x LGBTQIA x GlobalSouth",
     {"desilesbians", "queerwomenglobal", "southernsapphics"}},
    {"GlobalSouth x PhysicalHealth",
     {"globaldisabled", "latamchronic", "southasianhealth"}},
    {"LGBTQIA x LowSES", {"lgbtlowincome", "queerbroke", "transpoverty"}},
};

std::vector<CommunityCluster> cluster_fixture(const std::vector<MembershipVector> &vectors,
                                              Linkage linkage = Linkage::average) {
    const Dendrogram d = agglomerate(vectors, linkage);
    auto clusters = cut_at_gap(d, vectors, 2.0);
    name_clusters(clusters);
    return clusters;
}

} // namespace

TEST_CASE("parse_memberships reads bits and flags single-axis rows") {
    const std::string csv =
        "subreddit,bipoc,women_afab,lgbtqia,low_ses,global_south,physical_health,mental_health\n"
        "alpha,1,0,1,0,0,0,0\n"
        "solo,0,0,0,1,0,0,0\n";
    const MembershipFile f = parse_memberships(csv);
    REQUIRE(f.vectors.size() == 2);
    CHECK(f.vectors[0].subreddit == "alpha");
    CHECK(f.vectors[0].bits[0] == 1);
    CHECK(f.vectors[0].bits[2] == 1);
    CHECK(f.vectors[0].popcount() == 2);
    REQUIRE(f.vectors.size() == 2);
    REQUIRE(f.warnings.size() == 1);
    CHECK(f.warnings[0].find("solo") != std::string::npos);

    CHECK_THROWS_AS(parse_memberships("subreddit,bipoc\nx,1\n"), ParseError);
    CHECK_THROWS_AS(
        parse_memberships(
            "subreddit,bipoc,women_afab,lgbtqia,low_ses,global_south,physical_health,mental_health\n"
            "bad,2,0,0,0,0,0,0\n"),
        ParseError);
}

TEST_CASE("agglomerate produces n-1 merges with nondecreasing heights") {
    const MembershipFile f = load_memberships(testsup::fixture_path("memberships8.csv"));
    REQUIRE(f.vectors.size() == 24);
    const Dendrogram d = agglomerate(f.vectors, Linkage::average);
    CHECK(d.leaves.size() == 24);
    REQUIRE(d.merges.size() == 23);
    for (std::size_t i = 1; i < d.merges.size(); ++i)
        CHECK(d.merges[i].height >= d.merges[i - 1].height);
}

TEST_CASE("cut_at_gap recovers the eight disjoint groups with expected names") {
    const MembershipFile f = load_memberships(testsup::fixture_path("memberships8.csv"));
    const auto clusters = cluster_fixture(f.vectors);
    REQUIRE(clusters.size() == kExpected.size());
    for (std::size_t i = 0; i < clusters.size(); ++i) {
        CHECK(clusters[i].name == kExpected[i].name);
        CHECK(clusters[i].members == kExpected[i].members);
        for (int a = 0; a < kAxisCount; ++a) {
            const bool axis_in_name =
                kExpected[i].name.find(to_string(static_cast<MarginAxis>(a))) !=
                std::string::npos;
            CHECK(clusters[i].profile[a] == (axis_in_name ? 1.0 : 0.0));
        }
    }
}

TEST_CASE("input permutation does not change the clustering") {
    const MembershipFile f = load_memberships(testsup::fixture_path("memberships8.csv"));
    const auto baseline = cluster_fixture(f.vectors);
    Rng rng(5);
    for (int round = 0; round < 10; ++round) {
        std::vector<MembershipVector> shuffled = f.vectors;
        rng.shuffle(shuffled);
        const auto clusters = cluster_fixture(shuffled);
        REQUIRE(clusters.size() == baseline.size());
        for (std::size_t i = 0; i < clusters.size(); ++i) {
            CHECK(clusters[i].name == baseline[i].name);
            CHECK(clusters[i].members == baseline[i].members);
        }
    }
}

TEST_CASE("all linkages agree on well-separated groups") {
    const MembershipFile f = load_memberships(testsup::fixture_path("memberships8.csv"));
    for (Linkage linkage : {Linkage::average, Linkage::complete, Linkage::single}) {
        const auto clusters = cluster_fixture(f.vectors, linkage);
        REQUIRE(clusters.size() == kExpected.size());
        for (std::size_t i = 0; i < clusters.size(); ++i)
            CHECK(clusters[i].members == kExpected[i].members);
    }
}

TEST_CASE("name_clusters labels mixed profiles") {
    CommunityCluster c;
    c.members = {"a", "b"};
    c.profile = {0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0}; // no axis above one half
    std::vector<CommunityCluster> v{c};
    name_clusters(v);
    CHECK(v[0].name == "Mixed");
}

TEST_CASE("dendrogram dot and clusters json render") {
    const MembershipFile f = load_memberships(testsup::fixture_path("memberships8.csv"));
    const Dendrogram d = agglomerate(f.vectors, Linkage::average);
    const std::string dot = dendrogram_dot(d);
    CHECK(dot.rfind("digraph", 0) == 0);
    CHECK(dot.find("blackladies") != std::string::npos);

    const auto clusters = cluster_fixture(f.vectors);
    const std::string json = clusters_json(clusters);
    CHECK(json.find("BIPOC x WomenAFAB") != std::string::npos);
    CHECK(json.find("members") != std::string::npos);
}

TEST_CASE("linkage names round trip") {
    CHECK(to_string(Linkage::average) == "average");
    CHECK(linkage_from_string("complete") == Linkage::complete);
    CHECK_THROWS_AS(linkage_from_string("ward"), ConfigError);
}
